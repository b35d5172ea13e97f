#ifndef PLATDIFF_ENDOGENEITY_HPP
#define PLATDIFF_ENDOGENEITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "platdiff/types.hpp"

namespace platdiff::endogeneity {

// Latent-instrumental-variable test of the correlation between the platform
// state noise and the measurement noise of a suspect covariate, modeled as a
// noisy proxy of a latent AR(1) process.
struct LIVConfig {
  int model = 1;  // 1: plain AR(1) latent drift, 2: instrument-augmented

  // Fixed drift coefficients of the diffusion equation under test.
  double p0 = 0.0;
  double p1 = 0.0;  // loading on the latent covariate
  double p2 = 0.0;  // loading on the instrument (model 2 drift term is gamma3)
  double q = 0.0;
  double M0 = 1.0;
  double kappa = 0.0;

  // Priors.
  double gamma_prior_var = 100.0;
  double psi_ig_shape = 3.0;
  double psi_ig_scale = 0.01;
  double v_ig_shape = 3.0;
  double v_ig_scale = 0.01;
  double sigma_iw_df = 5.0;      // inverse-Wishart degrees of freedom
  double sigma_iw_scale = 0.01;  // scale matrix = this * identity

  int iterations = 2000;
  int burnin = -1;  // negative: 25%
  int thin = 2;
  std::uint64_t seed = 1;

  void validate() const;
};

// Aligned series for the AMO-contribution test. `a` is the cumulative add-on
// covariate entering the market potential (constant zero when unused).
struct LIVSlice {
  std::vector<double> y;   // platform observations
  std::vector<double> z1;  // suspect covariate (noisy proxy of the latent level)
  std::vector<double> z2;  // instrument (may be empty under model 1)
  std::vector<double> a;   // cumulative add-on covariate (may be empty)
};

struct IntervalSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  bool significant = false;  // CI excludes zero
};

struct LIVResult {
  IntervalSummary corr;      // Corr(w_t, measurement noise)
  IntervalSummary sigma21;   // off-diagonal covariance
  std::vector<double> latent_mean;  // posterior mean latent path (index 0 = mu_0)
  long nonstationary_rejects = 0;
  bool uninformative = false;
  LIVConfig config;  // echo
};

LIVResult liv_fit(const LIVSlice& slice, const LIVConfig& config);

// Per-complement release test: two smoothed-release proxies measured jointly
// with the complement diffusion noise (3x3 Sigma).
struct LIVReleaseSlice {
  std::string id;
  std::vector<double> y;   // complement observations, index k = day launch+k
  std::vector<double> pv;  // platform-release proxy
  std::vector<double> av;  // complement-release proxy
  std::vector<double> m;   // platform path, m[k] = state at day launch+k-1
  ComplementParams params; // fixed drift coefficients (p1/p2 load the proxies)
};

struct LIVReleaseResult {
  std::string id;
  IntervalSummary corr_pv;     // Corr(w, platform-release noise)
  IntervalSummary corr_av;     // Corr(w, complement-release noise)
  IntervalSummary sigma_w_pv;
  IntervalSummary sigma_w_av;
  long nonstationary_rejects = 0;
  bool uninformative = false;  // a proxy carried no signal (e.g. zero releases)
};

LIVReleaseResult liv_fit_releases(const LIVReleaseSlice& slice, const LIVConfig& config);

}  // namespace platdiff::endogeneity

#endif  // PLATDIFF_ENDOGENEITY_HPP
