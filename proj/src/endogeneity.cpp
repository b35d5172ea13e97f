#include "platdiff/endogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "platdiff/core_model.hpp"
#include "platdiff/filter.hpp"

namespace platdiff::endogeneity {

void LIVConfig::validate() const {
  if (model != 1 && model != 2) throw Error("LIVConfig: model must be 1 or 2");
  if (!(M0 > 0.0)) throw NonPositivePotential("LIVConfig: M0 must be > 0");
  if (!(gamma_prior_var > 0.0)) throw PriorMisconfiguration("LIVConfig: gamma prior var");
  if (!(psi_ig_shape > 1.0 && v_ig_shape > 1.0))
    throw PriorMisconfiguration("LIVConfig: IG shapes must exceed 1");
  if (!(psi_ig_scale > 0.0 && v_ig_scale > 0.0 && sigma_iw_scale > 0.0))
    throw PriorMisconfiguration("LIVConfig: scale parameters must be > 0");
  if (iterations <= 0 || thin <= 0) throw Error("LIVConfig: iterations/thin must be > 0");
  const int b = burnin >= 0 ? burnin : iterations / 4;
  if (b >= iterations) throw Error("LIVConfig: iterations must exceed burn-in");
}

namespace {

Eigen::MatrixXd robust_chol(Eigen::MatrixXd A) {
  const double jitter = 1e-12 * std::max(A.trace(), 1.0);
  for (int tries = 0; tries < 8; ++tries) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    A.diagonal().array() += jitter * std::pow(10.0, tries);
  }
  throw NumericalBlowup("robust_chol: matrix is not positive definite");
}

Eigen::VectorXd mvn_draw(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                         std::mt19937_64& rng) {
  const Eigen::MatrixXd L = robust_chol(cov);
  Eigen::VectorXd z(mean.size());
  std::normal_distribution<double> n01;
  for (int i = 0; i < z.size(); ++i) z[i] = n01(rng);
  return mean + L * z;
}

double inverse_gamma_draw(double shape, double scale, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / scale);
  double x = g(rng);
  while (!(x > 0.0)) x = g(rng);
  return 1.0 / x;
}

// Inverse-Wishart draw via the Bartlett decomposition of Wishart(nu, S^{-1}).
Eigen::MatrixXd inverse_wishart_draw(double nu, const Eigen::MatrixXd& S,
                                     std::mt19937_64& rng) {
  const int d = static_cast<int>(S.rows());
  if (nu <= d - 1) throw PriorMisconfiguration("inverse_wishart_draw: df too small");
  const Eigen::MatrixXd L = robust_chol(S.inverse());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> n01;
  for (int i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi(nu - i);
    A(i, i) = std::sqrt(std::max(chi(rng), 1e-300));
    for (int j = 0; j < i; ++j) A(i, j) = n01(rng);
  }
  const Eigen::MatrixXd LA = L * A;
  const Eigen::MatrixXd W = LA * LA.transpose();
  return W.inverse();
}

// Linear Gaussian state space with time-varying intercept and observation
// matrix: x_t = c_t + G x_{t-1} + zeta, y_t = H_t x_t + e_t, e ~ N(0, R).
struct LinearSSM {
  std::vector<Eigen::VectorXd> c;
  Eigen::MatrixXd G;
  Eigen::MatrixXd Q;
  std::vector<Eigen::MatrixXd> H;
  std::vector<Eigen::VectorXd> y;
  Eigen::MatrixXd R;
  Eigen::VectorXd x0_mean;
  Eigen::MatrixXd x0_var;
};

struct LinearPass {
  std::vector<Eigen::VectorXd> pred_mean, filt_mean;
  std::vector<Eigen::MatrixXd> pred_var, filt_var;
};

LinearPass kalman_forward(const LinearSSM& ssm) {
  const size_t n = ssm.y.size();
  LinearPass out;
  out.pred_mean.resize(n);
  out.pred_var.resize(n);
  out.filt_mean.resize(n);
  out.filt_var.resize(n);
  Eigen::VectorXd x = ssm.x0_mean;
  Eigen::MatrixXd P = ssm.x0_var;
  for (size_t k = 0; k < n; ++k) {
    const Eigen::VectorXd xpred = ssm.c[k] + ssm.G * x;
    const Eigen::MatrixXd Ppred = ssm.G * P * ssm.G.transpose() + ssm.Q;
    out.pred_mean[k] = xpred;
    out.pred_var[k] = Ppred;
    const Eigen::MatrixXd& H = ssm.H[k];
    const Eigen::MatrixXd S = H * Ppred * H.transpose() + ssm.R;
    const Eigen::MatrixXd K =
        Ppred * H.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(S.rows(), S.rows()));
    x = xpred + K * (ssm.y[k] - H * xpred);
    P = Ppred - K * H * Ppred;
    P = 0.5 * (P + P.transpose());
    if (!x.allFinite() || !P.allFinite())
      throw NumericalBlowup("kalman_forward: moments blew up");
    out.filt_mean[k] = x;
    out.filt_var[k] = P;
  }
  return out;
}

// Backward draw of x_0..x_n from the forward pass (index 0 = initial state).
std::vector<Eigen::VectorXd> linear_ffbs(const LinearSSM& ssm, const LinearPass& pass,
                                         std::mt19937_64& rng) {
  const int n = static_cast<int>(ssm.y.size());
  std::vector<Eigen::VectorXd> path(n + 1);
  path[n] = mvn_draw(pass.filt_mean[n - 1], pass.filt_var[n - 1], rng);
  for (int k = n - 2; k >= -1; --k) {
    const Eigen::VectorXd& fm = (k >= 0) ? pass.filt_mean[k] : ssm.x0_mean;
    const Eigen::MatrixXd& fv = (k >= 0) ? pass.filt_var[k] : ssm.x0_var;
    const Eigen::MatrixXd C = fv * ssm.G.transpose() *
                              pass.pred_var[k + 1].ldlt().solve(
                                  Eigen::MatrixXd::Identity(fv.rows(), fv.rows()));
    const Eigen::VectorXd mean = fm + C * (path[k + 2] - pass.pred_mean[k + 1]);
    Eigen::MatrixXd var = fv - C * pass.pred_var[k + 1] * C.transpose();
    var = 0.5 * (var + var.transpose());
    path[k + 1] = mvn_draw(mean, var, rng);
  }
  return path;
}

IntervalSummary interval_summary(std::vector<double> v) {
  IntervalSummary s;
  const size_t n = v.size();
  if (n == 0) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = (n > 1) ? std::sqrt(ss / (n - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double idx = p * (n - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, n - 1);
    const double w = idx - lo;
    return (1.0 - w) * v[lo] + w * v[hi];
  };
  s.q025 = quantile(0.025);
  s.q975 = quantile(0.975);
  s.significant = (s.q025 > 0.0) || (s.q975 < 0.0);
  return s;
}

double series_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 1e-6;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::max(ss / (v.size() - 1), 1e-10);
}

double diff_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 1e-6;
  std::vector<double> d(v.size() - 1);
  for (size_t i = 1; i < v.size(); ++i) d[i - 1] = v[i] - v[i - 1];
  return series_variance(d);
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

// AR(1) coefficient block (gamma1, gamma2[, gamma3]) with |gamma2| < 1
// enforced by redraw; after exhausting redraws the previous value is kept.
void draw_gamma(const std::vector<double>& mu, const std::vector<double>* z2, double psi,
                double prior_var, double& g1, double& g2, double* g3,
                std::mt19937_64& rng, long& rejects) {
  const int n = static_cast<int>(mu.size()) - 1;
  const int d = g3 ? 3 : 2;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd r(n);
  for (int t = 1; t <= n; ++t) {
    X(t - 1, 0) = 1.0;
    X(t - 1, 1) = mu[t - 1];
    if (g3) X(t - 1, 2) = (*z2)[t - 1];
    r[t - 1] = mu[t];
  }
  Eigen::MatrixXd A = X.transpose() * X / psi;
  A.diagonal().array() += 1.0 / prior_var;
  const Eigen::VectorXd b = X.transpose() * r / psi;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  const Eigen::VectorXd mean = llt.solve(b);
  const Eigen::MatrixXd cov =
      llt.solve(Eigen::MatrixXd::Identity(d, d));
  for (int tries = 0; tries < 100; ++tries) {
    const Eigen::VectorXd cand = mvn_draw(mean, cov, rng);
    if (std::abs(cand[1]) < 1.0) {
      g1 = cand[0];
      g2 = cand[1];
      if (g3) *g3 = cand[2];
      return;
    }
    ++rejects;
  }
}

}  // namespace

LIVResult liv_fit(const LIVSlice& slice, const LIVConfig& config) {
  config.validate();
  const int T = static_cast<int>(slice.y.size());
  if (T < 3) throw Error("liv_fit: series too short");
  if (slice.z1.size() != static_cast<size_t>(T))
    throw DimensionMismatch("liv_fit: z1 length mismatch");
  const bool use_z2 = config.model == 2 || config.p2 != 0.0;
  if (use_z2 && slice.z2.size() != static_cast<size_t>(T))
    throw DimensionMismatch("liv_fit: z2 length mismatch");
  if (!slice.a.empty() && slice.a.size() != static_cast<size_t>(T))
    throw DimensionMismatch("liv_fit: a length mismatch");

  auto z2_at = [&](int t) { return use_z2 ? slice.z2[t - 1] : 0.0; };
  auto a_at = [&](int t) { return slice.a.empty() ? 0.0 : slice.a[t - 1]; };
  auto potential = [&](int t) {
    return model::market_potential(config.M0, config.kappa, a_at(t));
  };
  // Drift with the latent level split out: base + p1 * (M - m) * mu.
  auto base_drift = [&](int t, double m) {
    const double M = potential(t);
    const double p = config.p0 + config.p2 * z2_at(t);
    return (p + config.q * m / M) * (M - m);
  };
  auto mu_loading = [&](int t, double m) { return config.p1 * (potential(t) - m); };

  std::mt19937_64 rng(config.seed);
  LIVResult result;
  result.config = config;
  result.uninformative = all_zero(slice.z1);

  // Initial values.
  std::vector<double> mu(T + 1);
  mu[0] = slice.z1[0];
  for (int t = 1; t <= T; ++t) mu[t] = slice.z1[t - 1];
  double g1 = 0.0, g2 = 0.5, g3 = 0.0;
  double psi = std::max(0.5 * series_variance(slice.z1), 1e-10);
  double V = std::max(0.5 * diff_variance(slice.y), 1e-10);
  Eigen::Matrix2d Sigma = Eigen::Matrix2d::Zero();
  Sigma(0, 0) = std::max(diff_variance(slice.y), 1e-10);
  Sigma(1, 1) = std::max(series_variance(slice.z1), 1e-10);
  std::vector<double> m(T + 1, 0.0);

  // Step-1 transition: platform drift with the latent level in the external
  // force and the state noise conditioned on the proxy residual.
  struct Step1 {
    std::function<double(int, double)> mean_fn, jac_fn;
    std::function<double(int)> nmean_fn;
    double var = 1.0;
    double mean(int t, double prev) const { return mean_fn(t, prev); }
    double jac(int t, double prev) const { return jac_fn(t, prev); }
    double noise_var(int) const { return var; }
    double noise_mean(int t) const { return nmean_fn(t); }
  };

  const int burnin = config.burnin >= 0 ? config.burnin : config.iterations / 4;
  std::vector<double> corr_draws, sigma21_draws;
  std::vector<double> mu_sum(T + 1, 0.0);
  long kept = 0;

  for (int iter = 1; iter <= config.iterations; ++iter) {
    // Step 1: draw the diffusion path given the latent level and Sigma.
    const double cond_slope = Sigma(0, 1) / Sigma(1, 1);
    const double cond_var =
        std::max(Sigma(0, 0) - Sigma(0, 1) * Sigma(0, 1) / Sigma(1, 1), 1e-14);
    Step1 f;
    f.var = cond_var;
    f.mean_fn = [&](int t, double prev) { return prev + base_drift(t, prev) +
                                                 mu_loading(t, prev) * mu[t]; };
    f.jac_fn = [&](int t, double prev) {
      const double M = potential(t);
      const double p = config.p0 + config.p1 * mu[t] + config.p2 * z2_at(t);
      return model::platform_jacobian(prev, p, config.q, M);
    };
    f.nmean_fn = [&](int t) { return cond_slope * (slice.z1[t - 1] - mu[t]); };
    const filter::InitPrior init = filter::diffuse_init(slice.y);
    const filter::FilterOutput fo = filter::ekf_forward(
        std::span<const double>(slice.y), f, V, init.mean, init.var, 1);
    m = filter::ffbs_sample(fo, rng).path;

    // Step 2: draw the latent level given the diffusion path.
    LinearSSM ssm;
    ssm.G = Eigen::MatrixXd::Constant(1, 1, g2);
    ssm.Q = Eigen::MatrixXd::Constant(1, 1, psi);
    ssm.R.resize(2, 2);
    ssm.R << Sigma(1, 1), Sigma(1, 0), Sigma(0, 1), Sigma(0, 0);
    ssm.c.resize(T);
    ssm.H.resize(T);
    ssm.y.resize(T);
    for (int t = 1; t <= T; ++t) {
      ssm.c[t - 1] = Eigen::VectorXd::Constant(
          1, g1 + (config.model == 2 ? g3 * z2_at(t) : 0.0));
      Eigen::MatrixXd H(2, 1);
      H << 1.0, mu_loading(t, m[t - 1]);
      ssm.H[t - 1] = H;
      Eigen::VectorXd obs(2);
      obs << slice.z1[t - 1], m[t] - m[t - 1] - base_drift(t, m[t - 1]);
      ssm.y[t - 1] = obs;
    }
    // Fixed diffuse prior for the initial latent level, anchored at the first
    // proxy observation (the variance may depend on the hyperparameters, but
    // the mean must not move with the chain).
    ssm.x0_mean = Eigen::VectorXd::Constant(1, slice.z1[0]);
    ssm.x0_var = Eigen::MatrixXd::Constant(1, 1, 10.0 * Sigma(1, 1) + psi);
    const LinearPass pass = kalman_forward(ssm);
    const std::vector<Eigen::VectorXd> mu_path = linear_ffbs(ssm, pass, rng);
    for (int t = 0; t <= T; ++t) mu[t] = mu_path[t][0];

    // Coefficients and variances.
    draw_gamma(mu, use_z2 ? &slice.z2 : nullptr, psi, config.gamma_prior_var, g1, g2,
               config.model == 2 ? &g3 : nullptr, rng, result.nonstationary_rejects);
    double zeta_ss = 0.0;
    for (int t = 1; t <= T; ++t) {
      const double e = mu[t] - g1 - g2 * mu[t - 1] -
                       (config.model == 2 ? g3 * z2_at(t) : 0.0);
      zeta_ss += e * e;
    }
    psi = inverse_gamma_draw(config.psi_ig_shape + 0.5 * T,
                             config.psi_ig_scale + 0.5 * zeta_ss, rng);
    double v_ss = 0.0;
    for (int t = 1; t <= T; ++t) {
      const double e = slice.y[t - 1] - m[t];
      v_ss += e * e;
    }
    V = inverse_gamma_draw(config.v_ig_shape + 0.5 * T, config.v_ig_scale + 0.5 * v_ss,
                           rng);

    Eigen::Matrix2d S = config.sigma_iw_scale * Eigen::Matrix2d::Identity();
    for (int t = 1; t <= T; ++t) {
      Eigen::Vector2d r;
      r << m[t] - m[t - 1] - base_drift(t, m[t - 1]) - mu_loading(t, m[t - 1]) * mu[t],
          slice.z1[t - 1] - mu[t];
      S += r * r.transpose();
    }
    Sigma = inverse_wishart_draw(config.sigma_iw_df + T, S, rng);

    if (iter > burnin && (iter - burnin) % config.thin == 0) {
      corr_draws.push_back(Sigma(0, 1) / std::sqrt(Sigma(0, 0) * Sigma(1, 1)));
      sigma21_draws.push_back(Sigma(0, 1));
      for (int t = 0; t <= T; ++t) mu_sum[t] += mu[t];
      ++kept;
    }
  }
  if (kept == 0) throw InsufficientDraws("liv_fit: no kept draws");
  result.corr = interval_summary(std::move(corr_draws));
  result.sigma21 = interval_summary(std::move(sigma21_draws));
  result.latent_mean.resize(T + 1);
  for (int t = 0; t <= T; ++t) result.latent_mean[t] = mu_sum[t] / kept;
  return result;
}

LIVReleaseResult liv_fit_releases(const LIVReleaseSlice& slice, const LIVConfig& config) {
  config.validate();
  const int len = static_cast<int>(slice.y.size());
  if (len < 3) throw Error("liv_fit_releases: series too short");
  if (slice.pv.size() != static_cast<size_t>(len) ||
      slice.av.size() != static_cast<size_t>(len))
    throw DimensionMismatch("liv_fit_releases: proxy length mismatch");
  if (slice.m.size() != static_cast<size_t>(len))
    throw DimensionMismatch("liv_fit_releases: platform path length mismatch");

  LIVReleaseResult result;
  result.id = slice.id;
  result.uninformative = all_zero(slice.pv) || all_zero(slice.av);

  const ComplementParams& cp = slice.params;
  // Drift with both latent proxies split out:
  //   base + (p1*mu_pv + p2*mu_av) * (alpha*m - n).
  auto base_drift = [&](int k, double n) {
    const double pot = cp.alpha * slice.m[k];
    if (!(pot > kPotentialFloor))
      throw DegeneratePotential("liv_fit_releases: alpha*m at or below floor");
    return (cp.p0 + cp.q0 * (1.0 - cp.delta) * n / pot) * (pot - n) - cp.delta * n;
  };
  auto loading = [&](int k, double n) {
    const double pot = cp.alpha * slice.m[k];
    return Eigen::Vector2d(cp.p1 * (pot - n), cp.p2 * (pot - n));
  };

  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Vector2d> mu(len + 1);
  for (int k = 0; k <= len; ++k) {
    const int i = std::min(k, len - 1);
    mu[k] = Eigen::Vector2d(slice.pv[i], slice.av[i]);
  }
  Eigen::Vector2d g1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d g2 = Eigen::Vector2d::Constant(0.5);
  Eigen::Vector2d psi(std::max(0.5 * series_variance(slice.pv), 1e-10),
                      std::max(0.5 * series_variance(slice.av), 1e-10));
  double V = std::max(0.5 * diff_variance(slice.y), 1e-10);
  Eigen::Matrix3d Sigma = Eigen::Matrix3d::Zero();
  Sigma(0, 0) = std::max(diff_variance(slice.y), 1e-10);
  Sigma(1, 1) = std::max(series_variance(slice.pv), 1e-10);
  Sigma(2, 2) = std::max(series_variance(slice.av), 1e-10);
  std::vector<double> n_path(len + 1, 0.0);

  struct Step1 {
    std::function<double(int, double)> mean_fn, jac_fn;
    std::function<double(int)> nmean_fn;
    double var = 1.0;
    int t0 = 1;
    double mean(int t, double prev) const { return mean_fn(t - t0, prev); }
    double jac(int t, double prev) const { return jac_fn(t - t0, prev); }
    double noise_var(int) const { return var; }
    double noise_mean(int t) const { return nmean_fn(t - t0); }
  };

  const int burnin = config.burnin >= 0 ? config.burnin : config.iterations / 4;
  std::vector<double> corr_pv, corr_av, s12, s13;
  long kept = 0;

  for (int iter = 1; iter <= config.iterations; ++iter) {
    // Step 1: complement path given latent proxies and Sigma (w conditioned
    // on the two proxy residuals).
    const Eigen::Vector2d s1g(Sigma(0, 1), Sigma(0, 2));
    const Eigen::Matrix2d sgg = Sigma.block<2, 2>(1, 1);
    const Eigen::Vector2d slope = sgg.ldlt().solve(s1g);
    const double cond_var = std::max(Sigma(0, 0) - s1g.dot(slope), 1e-14);
    Step1 f;
    f.var = cond_var;
    f.mean_fn = [&](int k, double prev) {
      return prev + base_drift(k, prev) + loading(k, prev).dot(mu[k + 1]);
    };
    f.jac_fn = [&](int k, double prev) {
      const double pot = cp.alpha * slice.m[k];
      const double p = cp.p0 + cp.p1 * mu[k + 1][0] + cp.p2 * mu[k + 1][1];
      return 1.0 + cp.q0 * (1.0 - cp.delta) - p - cp.delta -
             2.0 * cp.q0 * (1.0 - cp.delta) * prev / pot;
    };
    f.nmean_fn = [&](int k) {
      const Eigen::Vector2d g(slice.pv[k] - mu[k + 1][0], slice.av[k] - mu[k + 1][1]);
      return slope.dot(g);
    };
    const filter::InitPrior init = filter::diffuse_init(slice.y);
    const filter::FilterOutput fo = filter::ekf_forward(
        std::span<const double>(slice.y), f, V, init.mean, init.var, 1);
    n_path = filter::ffbs_sample(fo, rng).path;

    // Step 2: latent proxies given the complement path.
    LinearSSM ssm;
    ssm.G = g2.asDiagonal();
    ssm.Q = psi.asDiagonal();
    ssm.R.resize(3, 3);
    // Observation order (pv, av, d): permute Sigma from (w, g_pv, g_av).
    ssm.R << Sigma(1, 1), Sigma(1, 2), Sigma(1, 0), Sigma(2, 1), Sigma(2, 2),
        Sigma(2, 0), Sigma(0, 1), Sigma(0, 2), Sigma(0, 0);
    ssm.c.assign(len, g1);
    ssm.H.resize(len);
    ssm.y.resize(len);
    for (int k = 0; k < len; ++k) {
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, 2);
      H(0, 0) = 1.0;
      H(1, 1) = 1.0;
      H.row(2) = loading(k, n_path[k]).transpose();
      ssm.H[k] = H;
      Eigen::VectorXd obs(3);
      obs << slice.pv[k], slice.av[k],
          n_path[k + 1] - n_path[k] - base_drift(k, n_path[k]);
      ssm.y[k] = obs;
    }
    // Fixed diffuse prior at the first proxy observations (see liv_fit).
    ssm.x0_mean = Eigen::Vector2d(slice.pv[0], slice.av[0]);
    ssm.x0_var = (10.0 * Eigen::Vector2d(Sigma(1, 1), Sigma(2, 2)) + psi).asDiagonal();
    const LinearPass pass = kalman_forward(ssm);
    const std::vector<Eigen::VectorXd> mu_path = linear_ffbs(ssm, pass, rng);
    for (int k = 0; k <= len; ++k) mu[k] = mu_path[k];

    // Independent AR(1) blocks per proxy.
    for (int i = 0; i < 2; ++i) {
      std::vector<double> series(len + 1);
      for (int k = 0; k <= len; ++k) series[k] = mu[k][i];
      draw_gamma(series, nullptr, psi[i], config.gamma_prior_var, g1[i], g2[i], nullptr,
                 rng, result.nonstationary_rejects);
      double ss = 0.0;
      for (int k = 1; k <= len; ++k) {
        const double e = series[k] - g1[i] - g2[i] * series[k - 1];
        ss += e * e;
      }
      psi[i] = inverse_gamma_draw(config.psi_ig_shape + 0.5 * len,
                                  config.psi_ig_scale + 0.5 * ss, rng);
    }

    double v_ss = 0.0;
    for (int k = 0; k < len; ++k) {
      const double e = slice.y[k] - n_path[k + 1];
      v_ss += e * e;
    }
    V = inverse_gamma_draw(config.v_ig_shape + 0.5 * len, config.v_ig_scale + 0.5 * v_ss,
                           rng);

    Eigen::Matrix3d S = config.sigma_iw_scale * Eigen::Matrix3d::Identity();
    for (int k = 0; k < len; ++k) {
      Eigen::Vector3d r;
      r << n_path[k + 1] - n_path[k] - base_drift(k, n_path[k]) -
               loading(k, n_path[k]).dot(mu[k + 1]),
          slice.pv[k] - mu[k + 1][0], slice.av[k] - mu[k + 1][1];
      S += r * r.transpose();
    }
    Sigma = inverse_wishart_draw(config.sigma_iw_df + len, S, rng);

    if (iter > burnin && (iter - burnin) % config.thin == 0) {
      corr_pv.push_back(Sigma(0, 1) / std::sqrt(Sigma(0, 0) * Sigma(1, 1)));
      corr_av.push_back(Sigma(0, 2) / std::sqrt(Sigma(0, 0) * Sigma(2, 2)));
      s12.push_back(Sigma(0, 1));
      s13.push_back(Sigma(0, 2));
      ++kept;
    }
  }
  if (kept == 0) throw InsufficientDraws("liv_fit_releases: no kept draws");
  result.corr_pv = interval_summary(std::move(corr_pv));
  result.corr_av = interval_summary(std::move(corr_av));
  result.sigma_w_pv = interval_summary(std::move(s12));
  result.sigma_w_av = interval_summary(std::move(s13));
  return result;
}

}  // namespace platdiff::endogeneity
