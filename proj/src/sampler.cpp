#include "platdiff/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platdiff/core_model.hpp"
#include "platdiff/filter.hpp"

namespace platdiff::sampler {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
// Floor applied to the platform path when it conditions the complement block,
// keeping the adoption potential alpha*m strictly positive.
constexpr double kConditioningFloor = 1e-6;

double gauss_loglik(double resid, double var) {
  return -0.5 * (kLogTwoPi + std::log(var) + resid * resid / var);
}

double inverse_gamma_draw(double shape, double scale, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / scale);
  double x = g(rng);
  while (!(x > 0.0)) x = g(rng);
  return 1.0 / x;
}

double normal_draw(std::mt19937_64& rng, double mean = 0.0, double sd = 1.0) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

// Draw from N(mean, A^{-1}) where A = X'X/w + diag(1/prior_var) and
// mean = A^{-1} (X'r/w + prior_mean/prior_var).
Eigen::VectorXd conjugate_regression_draw(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& r, double noise_var,
                                          const Eigen::VectorXd& prior_mean,
                                          const Eigen::VectorXd& prior_var,
                                          std::mt19937_64& rng) {
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd A = X.transpose() * X / noise_var;
  Eigen::VectorXd b = X.transpose() * r / noise_var;
  for (int i = 0; i < d; ++i) {
    A(i, i) += 1.0 / prior_var[i];
    b[i] += prior_mean[i] / prior_var[i];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericalBlowup("conjugate_regression_draw: posterior precision not SPD");
  const Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z[i] = normal_draw(rng);
  // A = L L^T  =>  cov = A^{-1}; draw = mean + L^{-T} z.
  return mean + llt.matrixL().transpose().solve(z);
}

double logit(double x) { return std::log(x / (1.0 - x)); }
double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Adaptive random-walk scale tuned toward a target acceptance rate.
struct MhBlock {
  double step = 0.1;
  long proposals = 0;
  long accepts = 0;
  long window_proposals = 0;
  long window_accepts = 0;

  void record(bool accepted, bool adapting) {
    ++proposals;
    ++window_proposals;
    if (accepted) {
      ++accepts;
      ++window_accepts;
    }
    if (adapting && window_proposals >= 50) {
      const double rate = static_cast<double>(window_accepts) / window_proposals;
      if (rate > 0.35)
        step *= 1.25;
      else if (rate < 0.2)
        step *= 0.8;
      window_proposals = 0;
      window_accepts = 0;
    }
  }
  double rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepts) / proposals;
  }
};

}  // namespace

void PriorConfig::validate() const {
  if (!(coef_prior_var > 0.0 && logit_var > 0.0 && eta_prior_var > 0.0))
    throw PriorMisconfiguration("PriorConfig: prior variances must be > 0");
  if (!(ig_shape > 1.0 && hier_ig_shape > 1.0))
    throw PriorMisconfiguration("PriorConfig: IG shapes must exceed 1");
  if (!(ig_scale > 0.0 && hier_ig_scale > 0.0))
    throw PriorMisconfiguration("PriorConfig: IG scales must be > 0");
}

void McmcConfig::validate() const {
  if (iterations <= 0) throw Error("McmcConfig: iterations must be > 0");
  if (effective_burnin() >= iterations)
    throw Error("McmcConfig: iterations must exceed burn-in");
  if (thin <= 0 || path_stride <= 0) throw Error("McmcConfig: thin/path_stride must be > 0");
}

LogitSample sample_constrained_logit(double current,
                                     const std::function<double(double)>& log_target,
                                     double step, std::mt19937_64& rng) {
  if (!(current > 0.0 && current < 1.0))
    throw Error("sample_constrained_logit: current value must lie in (0,1)");
  if (!(step > 0.0)) throw Error("sample_constrained_logit: step must be > 0");
  if (step < 1e-300) return {current, true};

  const double x = logit(current);
  const double xprop = x + normal_draw(rng, 0.0, step);
  const double prop = inv_logit(xprop);
  if (!(prop > 0.0 && prop < 1.0)) return {current, false};

  // Jacobian of value -> logit: dvalue/dx = value (1 - value).
  const double log_ratio = log_target(prop) - log_target(current) +
                           std::log(prop * (1.0 - prop)) -
                           std::log(current * (1.0 - current));
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (std::log(u) < log_ratio) return {prop, true};
  return {current, false};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> sample_hierarchy(
    const Eigen::MatrixXd& theta, const Eigen::MatrixXd& D, const HierarchyPriors& priors,
    std::mt19937_64& rng) {
  const int J = static_cast<int>(theta.rows());
  const int K = static_cast<int>(D.cols());
  const int P = static_cast<int>(theta.cols());
  if (D.rows() != J) throw DimensionMismatch("sample_hierarchy: Theta and D row mismatch");
  if (J <= K) throw Error("sample_hierarchy: need more units than design columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < K)
    throw RankDeficientDesign("sample_hierarchy: dummy design is rank deficient");

  Eigen::MatrixXd eta(K, P);
  Eigen::VectorXd sigma(P);
  const Eigen::MatrixXd DtD = D.transpose() * D;
  for (int k = 0; k < P; ++k) {
    const Eigen::VectorXd col = theta.col(k);
    const Eigen::VectorXd ols = qr.solve(col);
    const double ssr = (col - D * ols).squaredNorm();
    sigma[k] = inverse_gamma_draw(priors.ig_shape + 0.5 * J, priors.ig_scale + 0.5 * ssr,
                                  rng);
    Eigen::MatrixXd A = DtD / sigma[k];
    A.diagonal().array() += 1.0 / priors.eta_prior_var;
    Eigen::VectorXd b = D.transpose() * col / sigma[k];
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::VectorXd z(K);
    for (int i = 0; i < K; ++i) z[i] = normal_draw(rng);
    eta.col(k) = llt.solve(b) + llt.matrixL().transpose().solve(z);
  }
  return {eta, sigma};
}

namespace {

// Gibbs state and update blocks for one chain.
class Chain {
 public:
  Chain(const ObservationPanel& panel, const PriorConfig& priors, const McmcConfig& cfg)
      : panel_(panel), priors_(priors), cfg_(cfg), rng_(cfg.seed) {
    priors_.validate();
    cfg_.validate();
    J_ = static_cast<int>(panel.complements.size());
    init_state();
  }

  DrawArchive run() {
    DrawArchive archive;
    archive.seed = cfg_.seed;
    archive.variant_name = cfg_.variant.name;
    archive.iterations = cfg_.iterations;
    archive.burnin = cfg_.effective_burnin();
    archive.thin = cfg_.thin;

    int nonfinite_streak = 0;
    int kept = 0;
    for (int iter = 1; iter <= cfg_.iterations; ++iter) {
      adapting_ = iter <= archive.burnin;
      iterate();

      if (!std::isfinite(loglik_)) {
        if (++nonfinite_streak >= 10)
          throw ChainDiverged("run_chain: non-finite likelihood for 10 iterations");
      } else {
        nonfinite_streak = 0;
      }

      if (iter > archive.burnin && (iter - archive.burnin) % cfg_.thin == 0) {
        Draw d;
        d.iter = iter;
        d.platform = platform_;
        d.complements = complements_;
        d.eta = eta_;
        d.sigma_eps = sigma_eps_;
        d.loglik = loglik_;
        if (kept % cfg_.path_stride == 0) {
          LatentPaths paths;
          paths.m = m_;
          paths.n = n_;
          d.paths = std::move(paths);
        }
        archive.draws.push_back(std::move(d));
        ++kept;
      }
    }
    archive.acceptance["platform.q"] = mh_q_.rate();
    archive.acceptance["platform.M0"] = mh_M0_.rate();
    archive.acceptance["platform.kappa"] = mh_kappa_.rate();
    archive.acceptance["addon.alpha"] = mh_alpha_.rate();
    archive.acceptance["addon.delta"] = mh_delta_.rate();
    archive.ffbs_floored = ffbs_floored_;
    return archive;
  }

 private:
  void init_state() {
    const auto& y = panel_.y_platform;
    double ymax = 0.0;
    for (double v : y)
      if (!is_missing(v)) ymax = std::max(ymax, std::abs(v));
    if (ymax == 0.0) ymax = 1.0;

    platform_.beta = Eigen::VectorXd::Zero(panel_.x_dim());
    platform_.rho = Eigen::VectorXd::Zero(panel_.z_dim());
    platform_.p0 = 1e-3;
    platform_.q = 0.0;
    platform_.M0 = 1.5 * ymax;
    platform_.kappa = 0.0;

    double dvar = 0.0;
    int nd = 0;
    for (size_t i = 1; i < y.size(); ++i) {
      if (is_missing(y[i]) || is_missing(y[i - 1])) continue;
      const double d = y[i] - y[i - 1];
      dvar += d * d;
      ++nd;
    }
    dvar = (nd > 0) ? dvar / nd : 1e-6;
    platform_.obs_var = std::max(dvar / 3.0, 1e-12);
    platform_.state_var = std::max(dvar / 3.0, 1e-12);

    complements_.resize(J_);
    n_.resize(J_);
    for (int j = 0; j < J_; ++j) {
      const auto& s = panel_.complements[j];
      double njmax = 0.0, djvar = 0.0;
      int ndj = 0;
      for (size_t i = 0; i < s.y.size(); ++i) {
        if (!is_missing(s.y[i])) njmax = std::max(njmax, std::abs(s.y[i]));
        if (i > 0 && !is_missing(s.y[i]) && !is_missing(s.y[i - 1])) {
          const double d = s.y[i] - s.y[i - 1];
          djvar += d * d;
          ++ndj;
        }
      }
      djvar = (ndj > 0) ? djvar / ndj : 1e-6;
      ComplementParams& c = complements_[j];
      c.alpha = std::clamp(2.0 * njmax / ymax, 1e-3, 0.9);
      c.delta = cfg_.variant.churn_on ? 0.01 : 0.0;
      c.p0 = 1e-3;
      c.p1 = c.p2 = c.q0 = c.q1 = c.q2 = c.q3 = 0.0;
      c.obs_var = std::max(djvar / 3.0, 1e-14);
      c.state_var = std::max(djvar / 3.0, 1e-14);
    }

    const int K = (J_ > 0) ? static_cast<int>(panel_.complements[0].dummies.size()) : 0;
    hierarchy_active_ = cfg_.use_hierarchy && J_ > K && K > 0;
    eta_ = Eigen::MatrixXd::Zero(std::max(K, 0), kThetaDim);
    sigma_eps_ = Eigen::VectorXd::Ones(kThetaDim);

    mh_M0_.step = 0.05 * platform_.M0;
    mh_kappa_.step = 0.05 * platform_.M0;
    mh_q_.step = 0.01;
    mh_alpha_.step = 0.3;
    mh_delta_.step = 0.3;

    m_.assign(panel_.T + 1, 0.0);
    mc_.assign(panel_.T + 1, kConditioningFloor);
  }

  // Platform transition log-likelihood of the current state path under
  // candidate (q, M0, kappa); the covariate coefficients are held fixed.
  double platform_transition_loglik(double q, double M0, double kappa) const {
    if (!(M0 > 0.0)) return -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (int t = 1; t <= panel_.T; ++t) {
      const double M = M0 + kappa * panel_.A[t - 1];
      if (!(M > 0.0)) return -std::numeric_limits<double>::infinity();
      const PlatformFrame frame = panel_.platform_frame(t);
      const double p = platform_.p0 + frame.X.dot(platform_.beta) +
                       frame.Z.dot(platform_.rho);
      const double drift = (p + q * m_[t - 1] / M) * (M - m_[t - 1]);
      ll += gauss_loglik(m_[t] - m_[t - 1] - drift, platform_.state_var);
    }
    return ll;
  }

  void draw_platform_states() {
    const filter::PlatformTransition f{&platform_, &panel_};
    const filter::InitPrior init = filter::diffuse_init(panel_.y_platform);
    const filter::FilterOutput fo =
        filter::ekf_forward(std::span<const double>(panel_.y_platform), f,
                            platform_.obs_var, init.mean, init.var, 1);
    // Untruncated backward draws: the coefficient and variance conditionals
    // assume Gaussian transitions, so truncating the path draws here would
    // leave the chain without the intended stationary distribution.
    const filter::FfbsDraw draw = filter::ffbs_sample(fo, rng_, {.enforce_nonneg = false});
    m_ = draw.path;
    ffbs_floored_ += draw.floored;
    // The complement block conditions on the platform path; floor it so the
    // adoption potential alpha*m stays valid when an early-sample draw dips
    // to or below zero. All complement conditionals see the same path.
    mc_ = m_;
    for (double& v : mc_) v = std::max(v, kConditioningFloor);
  }

  void draw_platform_coefficients() {
    const bool amo = cfg_.variant.amo_on;
    const int xd = panel_.x_dim();
    const int zd = amo ? panel_.z_dim() : 0;
    const int d = 1 + xd + zd;
    Eigen::MatrixXd X(panel_.T, d);
    Eigen::VectorXd r(panel_.T);
    for (int t = 1; t <= panel_.T; ++t) {
      const double M =
          model::market_potential(platform_.M0, platform_.kappa, panel_.A[t - 1]);
      const double u = M - m_[t - 1];
      X(t - 1, 0) = u;
      for (int i = 0; i < xd; ++i) X(t - 1, 1 + i) = panel_.X[t - 1][i] * u;
      for (int i = 0; i < zd; ++i) X(t - 1, 1 + xd + i) = panel_.Z[t - 1][i] * u;
      r[t - 1] = m_[t] - m_[t - 1] - platform_.q * m_[t - 1] / M * u;
    }
    const Eigen::VectorXd prior_mean = Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd prior_var =
        Eigen::VectorXd::Constant(d, priors_.coef_prior_var);
    const Eigen::VectorXd c =
        conjugate_regression_draw(X, r, platform_.state_var, prior_mean, prior_var, rng_);
    platform_.p0 = c[0];
    for (int i = 0; i < xd; ++i) platform_.beta[i] = c[1 + i];
    if (amo)
      for (int i = 0; i < zd; ++i) platform_.rho[i] = c[1 + xd + i];
    else
      platform_.rho.setZero();
  }

  void mh_scalar(double& value, MhBlock& block, const std::function<double(double)>& logpost,
                 bool positive_only = false) {
    const double prop = value + normal_draw(rng_, 0.0, block.step);
    bool accepted = false;
    if (!positive_only || prop > 0.0) {
      const double ratio = logpost(prop) - logpost(value);
      if (std::isfinite(ratio) || ratio > 0.0) {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        if (std::log(u) < ratio) {
          value = prop;
          accepted = true;
        }
      }
    }
    block.record(accepted, adapting_);
  }

  // Marginal (path-integrated) likelihoods. Conditioning the nonlinear rates
  // and the variances on the current state path leaves those conditionals
  // nearly degenerate -- the path remembers the parameters that produced it --
  // so the chain cannot travel the weakly identified ridges (M0 vs kappa,
  // obs vs state variance, alpha vs p0). Updating these blocks against the
  // filtered likelihood with the path integrated out, and redrawing the path
  // afterwards, is a standard partially collapsed scheme and restores mixing.
  double platform_marginal_loglik(const PlatformParams& p) const {
    try {
      return filter::platform_filter(panel_, p).loglik;
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

  double complement_marginal_loglik(int j, const ComplementParams& c) const {
    try {
      return filter::conditional_complement_filter(panel_.complements[j], c, mc_).loglik;
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

  double ig_log_prior(double v) const {
    return -(priors_.ig_shape + 1.0) * std::log(v) - priors_.ig_scale / v;
  }

  // Log-scale random walk on a variance against an arbitrary log-likelihood,
  // with the inverse-gamma prior and the log-scale Jacobian folded in.
  void mh_log_variance(double& var, MhBlock& block,
                       const std::function<double(double)>& loglik,
                       std::mt19937_64& rng) {
    const double prop = var * std::exp(normal_draw(rng, 0.0, block.step));
    bool accepted = false;
    if (prop > 0.0 && std::isfinite(prop)) {
      const double ratio = loglik(prop) - loglik(var) + ig_log_prior(prop) -
                           ig_log_prior(var) + std::log(prop) - std::log(var);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (std::log(u) < ratio) {
        var = prop;
        accepted = true;
      }
    }
    block.record(accepted, adapting_);
  }

  void draw_platform_nonlinear_block() {
    const double pv = priors_.coef_prior_var;
    auto prior = [pv](double x) { return -0.5 * x * x / pv; };
    PlatformParams cand = platform_;

    mh_scalar(platform_.q, mh_q_, [&](double q) {
      cand = platform_;
      cand.q = q;
      return platform_marginal_loglik(cand) + prior(q);
    });
    mh_scalar(
        platform_.M0, mh_M0_,
        [&](double M0) {
          cand = platform_;
          cand.M0 = M0;
          return platform_marginal_loglik(cand) + prior(M0);
        },
        /*positive_only=*/true);
    if (cfg_.variant.addon_effect_on_platform_on) {
      mh_scalar(platform_.kappa, mh_kappa_, [&](double kappa) {
        cand = platform_;
        cand.kappa = kappa;
        return platform_marginal_loglik(cand) + prior(kappa);
      });
    }
  }

  void draw_platform_variances() {
    PlatformParams cand = platform_;
    mh_log_variance(
        platform_.state_var, mh_pW_,
        [&](double w) {
          cand = platform_;
          cand.state_var = w;
          return platform_marginal_loglik(cand);
        },
        rng_);
    mh_log_variance(
        platform_.obs_var, mh_pV_,
        [&](double v) {
          cand = platform_;
          cand.obs_var = v;
          return platform_marginal_loglik(cand);
        },
        rng_);
  }

  // Prior mean/variance of theta component k for complement j.
  std::pair<double, double> theta_prior(int j, int k) const {
    if (hierarchy_active_) {
      const double mean = panel_.complements[j].dummies.dot(eta_.col(k));
      return {mean, sigma_eps_[k]};
    }
    return {0.0, priors_.coef_prior_var};
  }

  double complement_transition_loglik(int j, const ComplementParams& c) const {
    const auto& s = panel_.complements[j];
    double ll = 0.0;
    for (int t = s.launch; t <= s.end; ++t) {
      const int k = t - s.launch;
      const auto [p, q] = model::complement_forces(c, s.frame(t));
      const double pot = c.alpha * mc_[t - 1];
      if (!(pot > kPotentialFloor)) return -std::numeric_limits<double>::infinity();
      const double drift =
          (p + q * (1.0 - c.delta) * n_[j][k] / pot) * (pot - n_[j][k]) -
          c.delta * n_[j][k];
      ll += gauss_loglik(n_[j][k + 1] - n_[j][k] - drift, c.state_var);
    }
    return ll;
  }

  void draw_complement_states(int j, std::mt19937_64& rng) {
    const auto pass = filter::conditional_complement_pass(
        panel_.complements[j], complements_[j], mc_, rng, {.enforce_nonneg = false});
    n_[j] = pass.draw.path;
    ffbs_floored_ += pass.draw.floored;
  }

  void draw_complement_coefficients(int j, std::mt19937_64& rng) {
    const auto& s = panel_.complements[j];
    ComplementParams& c = complements_[j];
    const auto& v = cfg_.variant;

    // Active columns in theta order, then interaction extras.
    std::vector<int> cols = {2};  // p0
    if (v.explain_external_force) {
      cols.push_back(3);
      cols.push_back(4);
    }
    cols.push_back(5);  // q0
    if (v.explain_internal_force) {
      cols.push_back(6);
      cols.push_back(7);
      cols.push_back(8);
    }
    const int n_theta = static_cast<int>(cols.size());
    const int n_extra = v.interactions_on ? 3 : 0;
    const int d = n_theta + n_extra;
    const int len = s.length();

    Eigen::MatrixXd X(len, d);
    Eigen::VectorXd r(len);
    for (int t = s.launch; t <= s.end; ++t) {
      const int k = t - s.launch;
      const ComplementFrame f = s.frame(t);
      const double pot = c.alpha * mc_[t - 1];
      if (!(pot > kPotentialFloor))
        throw DegeneratePotential("sampler: alpha*m at or below floor");
      const double u = pot - n_[j][k];
      const double qu = (1.0 - c.delta) * n_[j][k] / pot * u;
      int col = 0;
      for (int idx : cols) {
        switch (idx) {
          case 2: X(k, col) = u; break;
          case 3: X(k, col) = f.pv * u; break;
          case 4: X(k, col) = f.av * u; break;
          case 5: X(k, col) = qu; break;
          case 6: X(k, col) = f.rtv * qu; break;
          case 7: X(k, col) = f.ol * qu; break;
          case 8: X(k, col) = f.stavg * qu; break;
          default: break;
        }
        ++col;
      }
      if (v.interactions_on) {
        X(k, col++) = f.pv * f.av * u;
        X(k, col++) = f.rtv * f.ol * qu;
        X(k, col++) = f.rtv * f.stavg * qu;
      }
      r[k] = n_[j][k + 1] - n_[j][k] + c.delta * n_[j][k];
    }

    Eigen::VectorXd prior_mean(d), prior_var(d);
    for (int i = 0; i < n_theta; ++i) {
      const auto [pm, pvv] = theta_prior(j, cols[i]);
      prior_mean[i] = pm;
      prior_var[i] = pvv;
    }
    for (int i = n_theta; i < d; ++i) {
      prior_mean[i] = 0.0;
      prior_var[i] = priors_.coef_prior_var;
    }

    const Eigen::VectorXd coef =
        conjugate_regression_draw(X, r, c.state_var, prior_mean, prior_var, rng);
    Eigen::VectorXd theta = theta_vector(c);
    for (int k = 3; k <= 8; ++k) theta[k] = 0.0;
    theta[2] = 0.0;
    for (int i = 0; i < n_theta; ++i) theta[cols[i]] = coef[i];
    apply_theta(c, theta);
    if (v.interactions_on) {
      c.p_int = coef[n_theta];
      c.q_int_rtv_ol = coef[n_theta + 1];
      c.q_int_rtv_stavg = coef[n_theta + 2];
    }
  }

  double constrained_log_target(int j, int theta_idx, const ComplementParams& cand) const {
    const double value = theta_vector(cand)[theta_idx];
    double lp;
    if (hierarchy_active_) {
      const auto [pm, pv] = theta_prior(j, theta_idx);
      lp = gauss_loglik(value - pm, pv);
    } else {
      // Logit-normal prior on the value.
      const double x = logit(value);
      lp = gauss_loglik(x - priors_.logit_mean, priors_.logit_var) -
           std::log(value * (1.0 - value));
    }
    return complement_transition_loglik(j, cand) + lp;
  }

  void draw_complement_rates(int j, std::mt19937_64& rng) {
    ComplementParams& c = complements_[j];

    {
      ComplementParams cand = c;
      const auto sample = sample_constrained_logit(
          c.alpha,
          [&](double a) {
            cand.alpha = a;
            return constrained_log_target(j, 0, cand);
          },
          mh_alpha_.step, rng);
      c.alpha = sample.value;
      mh_alpha_.record(sample.accepted, adapting_);
    }

    if (cfg_.variant.churn_on) {
      ComplementParams cand = c;
      const auto sample = sample_constrained_logit(
          c.delta,
          [&](double del) {
            cand.delta = del;
            return constrained_log_target(j, 1, cand);
          },
          mh_delta_.step, rng);
      c.delta = sample.value;
      mh_delta_.record(sample.accepted, adapting_);
    }
  }

  void draw_complement_variances(int j, std::mt19937_64& rng) {
    const auto& s = panel_.complements[j];
    ComplementParams& c = complements_[j];
    double obs_ss = 0.0;
    int n_obs = 0;
    double state_ss = 0.0;
    for (int t = s.launch; t <= s.end; ++t) {
      const int k = t - s.launch;
      if (!is_missing(s.y[k])) {
        const double e = s.y[k] - n_[j][k + 1];
        obs_ss += e * e;
        ++n_obs;
      }
      const auto [p, q] = model::complement_forces(c, s.frame(t));
      const double e = n_[j][k + 1] - model::complement_step(n_[j][k], mc_[t - 1], p, q,
                                                             c.alpha, c.delta);
      state_ss += e * e;
    }
    c.obs_var = inverse_gamma_draw(priors_.ig_shape + 0.5 * n_obs,
                                   priors_.ig_scale + 0.5 * obs_ss, rng);
    c.state_var = inverse_gamma_draw(priors_.ig_shape + 0.5 * s.length(),
                                     priors_.ig_scale + 0.5 * state_ss, rng);
  }

  void draw_hierarchy() {
    if (!hierarchy_active_) return;
    const int K = static_cast<int>(panel_.complements[0].dummies.size());
    Eigen::MatrixXd theta(J_, kThetaDim);
    Eigen::MatrixXd D(J_, K);
    for (int j = 0; j < J_; ++j) {
      theta.row(j) = theta_vector(complements_[j]).transpose();
      D.row(j) = panel_.complements[j].dummies.transpose();
    }
    const HierarchyPriors hp{priors_.eta_prior_var, priors_.hier_ig_shape,
                             priors_.hier_ig_scale};
    auto [eta, sigma] = sample_hierarchy(theta, D, hp, rng_);
    // Columns the variant leaves unexplained keep a flat hierarchy.
    if (!cfg_.variant.explain_relevance) {
      eta.col(0).setZero();
      sigma[0] = priors_.coef_prior_var;
    }
    if (!cfg_.variant.explain_churn) {
      eta.col(1).setZero();
      sigma[1] = priors_.coef_prior_var;
    }
    eta_ = eta;
    sigma_eps_ = sigma;
  }

  void compute_loglik() {
    double ll = platform_transition_loglik(platform_.q, platform_.M0, platform_.kappa);
    for (int t = 1; t <= panel_.T; ++t)
      if (!is_missing(panel_.y_platform[t - 1]))
        ll += gauss_loglik(panel_.y_platform[t - 1] - m_[t], platform_.obs_var);
    for (int j = 0; j < J_; ++j) {
      ll += complement_transition_loglik(j, complements_[j]);
      const auto& s = panel_.complements[j];
      for (int k = 0; k < s.length(); ++k)
        if (!is_missing(s.y[k]))
          ll += gauss_loglik(s.y[k] - n_[j][k + 1], complements_[j].obs_var);
    }
    loglik_ = ll;
  }

  std::mt19937_64 complement_rng(int j) {
    // Deterministic substream per (iteration, complement).
    std::uint64_t h = cfg_.seed;
    h ^= 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(iter_) * 0x100000001b3ULL +
         static_cast<std::uint64_t>(j + 1) * 0xc2b2ae3d27d4eb4fULL;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return std::mt19937_64(h);
  }

  void iterate() {
    ++iter_;
    draw_platform_states();
    draw_platform_coefficients();
    draw_platform_nonlinear_block();
    draw_platform_variances();
    for (int j = 0; j < J_; ++j) {
      std::mt19937_64 rng = complement_rng(j);
      draw_complement_states(j, rng);
      draw_complement_coefficients(j, rng);
      draw_complement_rates(j, rng);
      draw_complement_variances(j, rng);
    }
    draw_hierarchy();
    compute_loglik();
  }

  const ObservationPanel& panel_;
  PriorConfig priors_;
  McmcConfig cfg_;
  std::mt19937_64 rng_;
  int J_ = 0;
  int iter_ = 0;
  bool adapting_ = true;
  bool hierarchy_active_ = false;

  PlatformParams platform_;
  std::vector<ComplementParams> complements_;
  Eigen::MatrixXd eta_;
  Eigen::VectorXd sigma_eps_;
  std::vector<double> m_;
  std::vector<double> mc_;  // floored copy of m_ conditioning the complements
  std::vector<std::vector<double>> n_;
  double loglik_ = 0.0;
  long ffbs_floored_ = 0;

  MhBlock mh_q_, mh_M0_, mh_kappa_, mh_alpha_, mh_delta_;
};

}  // namespace

DrawArchive run_chain(const ObservationPanel& panel, const PriorConfig& priors,
                      const McmcConfig& config) {
  if (panel.T < 2 || panel.y_platform.size() != static_cast<size_t>(panel.T))
    throw Error("run_chain: invalid panel");
  Chain chain(panel, priors, config);
  return chain.run();
}

std::vector<double> parameter_series(const DrawArchive& archive, const std::string& name) {
  if (archive.draws.empty()) throw InsufficientDraws("parameter_series: empty archive");
  std::vector<double> out;
  out.reserve(archive.draws.size());
  for (const Draw& d : archive.draws) {
    double v = 0.0;
    if (name == "platform.p0") v = d.platform.p0;
    else if (name == "platform.q") v = d.platform.q;
    else if (name == "platform.M0") v = d.platform.M0;
    else if (name == "platform.kappa") v = d.platform.kappa;
    else if (name == "platform.V") v = d.platform.obs_var;
    else if (name == "platform.W") v = d.platform.state_var;
    else if (name.rfind("platform.beta", 0) == 0)
      v = d.platform.beta[std::stoi(name.substr(13)) - 1];
    else if (name.rfind("platform.rho", 0) == 0)
      v = d.platform.rho[std::stoi(name.substr(12)) - 1];
    else {
      const auto dot = name.rfind('.');
      if (dot == std::string::npos) throw Error("parameter_series: unknown name " + name);
      const std::string id = name.substr(0, dot);
      const std::string field = name.substr(dot + 1);
      bool found = false;
      for (size_t j = 0; j < d.complements.size(); ++j) {
        // Complement ids are resolved positionally via addon<j> or by id match
        // through the pooled mean pseudo-series.
        const std::string tag = "addon" + std::to_string(j + 1);
        if (id != tag) continue;
        const ComplementParams& c = d.complements[j];
        if (field == "alpha") v = c.alpha;
        else if (field == "delta") v = c.delta;
        else if (field == "p0") v = c.p0;
        else if (field == "p1") v = c.p1;
        else if (field == "p2") v = c.p2;
        else if (field == "q0") v = c.q0;
        else if (field == "q1") v = c.q1;
        else if (field == "q2") v = c.q2;
        else if (field == "q3") v = c.q3;
        else if (field == "V") v = c.obs_var;
        else if (field == "W") v = c.state_var;
        else throw Error("parameter_series: unknown field " + field);
        found = true;
        break;
      }
      if (!found) {
        if (id != "addon_mean") throw Error("parameter_series: unknown name " + name);
        double sum = 0.0;
        for (const ComplementParams& c : d.complements) {
          const Eigen::VectorXd th = theta_vector(c);
          if (field == "alpha") sum += th[0];
          else if (field == "delta") sum += th[1];
          else if (field == "p0") sum += th[2];
          else if (field == "p1") sum += th[3];
          else if (field == "p2") sum += th[4];
          else if (field == "q0") sum += th[5];
          else if (field == "q1") sum += th[6];
          else if (field == "q2") sum += th[7];
          else if (field == "q3") sum += th[8];
          else if (field == "V") sum += c.obs_var;
          else if (field == "W") sum += c.state_var;
          else throw Error("parameter_series: unknown field " + field);
        }
        v = sum / static_cast<double>(d.complements.size());
      }
    }
    out.push_back(v);
  }
  return out;
}

namespace {

SummaryRow summarize_series(const std::string& name, std::vector<double> v) {
  SummaryRow row;
  row.name = name;
  const size_t n = v.size();
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  row.estimate = mean;
  row.sd = (n > 1) ? std::sqrt(ss / (n - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double idx = p * (n - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, n - 1);
    const double w = idx - lo;
    return (1.0 - w) * v[lo] + w * v[hi];
  };
  row.q025 = quantile(0.025);
  row.q975 = quantile(0.975);
  return row;
}

}  // namespace

std::vector<SummaryRow> summarize(const DrawArchive& archive) {
  if (archive.draws.empty()) throw InsufficientDraws("summarize: empty archive");
  std::vector<std::string> names = {"platform.M0",   "platform.kappa", "platform.p0",
                                    "platform.q",    "platform.V",     "platform.W"};
  const Draw& first = archive.draws.front();
  for (int i = 0; i < first.platform.beta.size(); ++i)
    names.insert(names.begin() + 3, "platform.beta" + std::to_string(i + 1));
  for (int i = 0; i < first.platform.rho.size(); ++i)
    names.insert(names.begin() + 3 + first.platform.beta.size(),
                 "platform.rho" + std::to_string(i + 1));
  const std::vector<std::string> fields = {"alpha", "delta", "p0", "p1", "p2",
                                           "q0",    "q1",    "q2", "q3", "V", "W"};
  for (const std::string& f : fields) names.push_back("addon_mean." + f);
  for (size_t j = 0; j < first.complements.size(); ++j)
    for (const std::string& f : fields)
      names.push_back("addon" + std::to_string(j + 1) + "." + f);

  std::vector<SummaryRow> rows;
  rows.reserve(names.size());
  for (const std::string& name : names)
    rows.push_back(summarize_series(name, parameter_series(archive, name)));
  return rows;
}

}  // namespace platdiff::sampler
