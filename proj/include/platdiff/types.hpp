#ifndef PLATDIFF_TYPES_HPP
#define PLATDIFF_TYPES_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "platdiff/errors.hpp"

namespace platdiff {

// Ratio floor below which the complement potential alpha*m is treated as
// degenerate rather than clamped.
inline constexpr double kPotentialFloor = 1e-12;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Parameters of the platform diffusion block: external force intercept and
// covariate loadings, imitation force, market-potential law, and the
// observation/state noise variances.
struct PlatformParams {
  double p0 = 0.0;
  Eigen::VectorXd beta;  // loadings on competitor-usage covariates X_t
  Eigen::VectorXd rho;   // loadings on governance covariates Z_t
  double q = 0.0;
  double M0 = 1.0;
  double kappa = 0.0;
  double obs_var = 1.0;    // V_p
  double state_var = 1.0;  // W_p

  void validate(int x_dim, int z_dim) const {
    if (M0 <= 0.0) throw NonPositivePotential("PlatformParams: M0 must be > 0");
    if (obs_var <= 0.0 || state_var <= 0.0)
      throw Error("PlatformParams: noise variances must be > 0");
    if (beta.size() != x_dim || rho.size() != z_dim)
      throw DimensionMismatch("PlatformParams: covariate loading size mismatch");
  }
};

// Per-complement parameters: relevance, churn, external/internal force
// coefficients, noise variances, and optional interaction-variant loadings.
struct ComplementParams {
  double alpha = 0.1;  // relevance fraction, in (0,1)
  double delta = 0.0;  // daily dis-adoption rate, in (0,1)
  double p0 = 0.0;
  double p1 = 0.0;  // platform release signal PV
  double p2 = 0.0;  // complement release signal AV
  double q0 = 0.0;
  double q1 = 0.0;  // rating variance RTV
  double q2 = 0.0;  // observational learning OL
  double q3 = 0.0;  // rating mean STAVG
  double obs_var = 1.0;    // V_j
  double state_var = 1.0;  // W_j
  // Interaction-variant loadings (PV*AV, RTV*OL, RTV*STAVG); zero when the
  // interaction terms are disabled.
  double p_int = 0.0;
  double q_int_rtv_ol = 0.0;
  double q_int_rtv_stavg = 0.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw Error("ComplementParams: alpha must lie in (0,1)");
    if (!(delta >= 0.0 && delta < 1.0))
      throw Error("ComplementParams: delta must lie in [0,1)");
    if (obs_var <= 0.0 || state_var <= 0.0)
      throw Error("ComplementParams: noise variances must be > 0");
  }
};

// Fixed ordering of the complement parameter vector used by the hierarchy.
inline constexpr int kThetaDim = 9;
inline const std::array<const char*, kThetaDim> kThetaNames = {
    "alpha", "delta", "p0", "p1", "p2", "q0", "q1", "q2", "q3"};

Eigen::VectorXd theta_vector(const ComplementParams& c);
void apply_theta(ComplementParams& c, const Eigen::VectorXd& theta);

// Dummy design and coefficient layer of the parameter hierarchy
// Theta_j = D_j * eta + eps_j, with diagonal residual covariance.
struct HierarchyDesign {
  Eigen::MatrixXd D;          // J x K (intercept + dummies)
  Eigen::MatrixXd eta;        // K x 9
  Eigen::VectorXd sigma_eps;  // 9 diagonal residual variances
};

// Day-level platform covariates: competitor usage X, governance Z, and the
// rescaled cumulative add-on count A.
struct PlatformFrame {
  Eigen::VectorXd X;
  Eigen::VectorXd Z;
  double A = 0.0;
};

// Day-level complement covariates, all in transformed (model) units.
struct ComplementFrame {
  double pv = 0.0;     // smoothed platform-release signal
  double av = 0.0;     // smoothed complement-release signal
  double rtv = 0.0;    // rating variance
  double stavg = 0.0;  // rating mean
  double ol = 0.0;     // observational-learning share
};

// One complement's slice of the unbalanced panel. All vectors are aligned to
// days launch..end (inclusive); index k corresponds to day launch + k.
struct ComplementSeries {
  std::string id;
  std::string category;
  int launch = 1;
  int end = 1;
  std::vector<double> y;  // observed cumulative downloads (NaN = missing)
  std::vector<double> pv, av, rtv, stavg, ol;
  Eigen::VectorXd dummies;  // hierarchy design row (intercept first)

  int length() const { return end - launch + 1; }

  ComplementFrame frame(int day) const {
    if (day < launch || day > end)
      throw WindowViolation("complement frame requested outside [launch, end]");
    const int k = day - launch;
    return {pv[k], av[k], rtv[k], stavg[k], ol[k]};
  }
};

// The assembled unbalanced panel. Platform vectors are indexed by day t=1..T
// at offset t-1; complements carry their own windows.
struct ObservationPanel {
  int T = 0;
  std::vector<double> y_platform;
  std::vector<Eigen::VectorXd> X;  // competitor usage per day
  std::vector<Eigen::VectorXd> Z;  // governance covariates per day
  std::vector<double> A;           // cumulative add-ons per day
  std::vector<ComplementSeries> complements;

  PlatformFrame platform_frame(int day) const {
    if (day < 1 || day > T) throw WindowViolation("platform frame out of range");
    return {X[day - 1], Z[day - 1], A[day - 1]};
  }

  int x_dim() const { return X.empty() ? 0 : static_cast<int>(X[0].size()); }
  int z_dim() const { return Z.empty() ? 0 : static_cast<int>(Z[0].size()); }
};

// Latent cumulative-adopter trajectories. Platform path has T+1 entries
// (m_0..m_T); complement paths have length()+1 entries (state at launch-1,
// then one per observed day).
struct LatentPaths {
  std::vector<double> m;
  std::vector<std::vector<double>> n;
};

}  // namespace platdiff

#endif  // PLATDIFF_TYPES_HPP
