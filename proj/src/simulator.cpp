#include "platdiff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "platdiff/core_model.hpp"
#include "platdiff/preprocess.hpp"

namespace platdiff::simulator {

void SimulationConfig::validate() const {
  if (T < 2) throw Error("SimulationConfig: T must be >= 2");
  if (J < 0) throw Error("SimulationConfig: J must be >= 0");
  if (static_cast<int>(launches.size()) != J)
    throw DimensionMismatch("SimulationConfig: launches must have J entries");
  if (static_cast<int>(complements.size()) != J)
    throw DimensionMismatch("SimulationConfig: complements must have J entries");
  for (int l : launches)
    if (l < 1 || l > T - 1)
      throw WindowViolation("SimulationConfig: launches must lie in [1, T-1]");
  if (!(m0_frac >= 0.0)) throw Error("SimulationConfig: m0_frac must be >= 0");
}

namespace {

struct NoiseBudget {
  long rejected = 0;
  long total = 0;
};

double gaussian(std::mt19937_64& rng, double sd) {
  if (sd <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

// Draw the next nonnegative state value, rejecting negative realizations.
double positive_step(double mean, double sd, std::mt19937_64& rng, NoiseBudget& budget) {
  constexpr int kMaxTries = 1000;
  for (int i = 0; i < kMaxTries; ++i) {
    const double x = mean + gaussian(rng, sd);
    ++budget.total;
    if (x >= 0.0) return x;
    ++budget.rejected;
  }
  throw ExplosiveTrajectory("simulate_panel: could not draw a nonnegative state");
}

std::vector<double> ar1_series(std::mt19937_64& rng, int n, double ar, double sd) {
  std::vector<double> out(n, 0.0);
  double x = gaussian(rng, sd / std::sqrt(std::max(1.0 - ar * ar, 1e-3)));
  for (int i = 0; i < n; ++i) {
    out[i] = x;
    x = ar * x + gaussian(rng, sd);
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= n;
  for (double& v : out) v -= mean;
  return out;
}

std::vector<double> demean(std::vector<double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  return v;
}

std::vector<int> bernoulli_days(std::mt19937_64& rng, int t0, int t1, double p) {
  std::vector<int> days;
  std::bernoulli_distribution dist(p);
  for (int t = t0; t <= t1; ++t)
    if (dist(rng)) days.push_back(t);
  return days;
}

std::vector<double> bounded_walk(std::mt19937_64& rng, int n, double lo, double hi,
                                 double step_sd) {
  std::vector<double> out(n);
  std::uniform_real_distribution<double> u(lo, hi);
  double x = u(rng);
  for (int i = 0; i < n; ++i) {
    out[i] = x;
    x = std::clamp(x + gaussian(rng, step_sd), lo, hi);
  }
  return out;
}

Eigen::MatrixXd default_dummy_design(int J) {
  const int K = 6;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(J, K);
  for (int j = 0; j < J; ++j) {
    D(j, 0) = 1.0;
    if (j < K - 1) D(j, 1 + j) = 1.0;
  }
  return D;
}

}  // namespace

SimulationResult simulate_panel(const SimulationConfig& config) {
  config.validate();
  SimulationResult result;
  result.config = config;
  std::mt19937_64 rng(config.seed);

  const int T = config.T;
  const int J = config.J;
  ObservationPanel& panel = result.panel;
  panel.T = T;

  // Exogenous covariates.
  const auto chrome = ar1_series(rng, T, config.recipe.x_ar, config.recipe.x_sd);
  const auto ie = ar1_series(rng, T, config.recipe.x_ar, config.recipe.x_sd);
  const auto amo = ar1_series(rng, T, config.recipe.z_ar, config.recipe.z_sd);
  const auto queue = ar1_series(rng, T, config.recipe.z_ar, config.recipe.z_sd);
  panel.X.resize(T);
  panel.Z.resize(T);
  for (int k = 0; k < T; ++k) {
    panel.X[k] = Eigen::Vector2d(chrome[k], ie[k]);
    panel.Z[k] = Eigen::Vector2d(amo[k], queue[k]);
  }
  // Nondecreasing cumulative add-on count rescaled to [0,1].
  panel.A.resize(T);
  {
    std::normal_distribution<double> inc(1.0, 0.3);
    double acc = 0.0;
    for (int k = 0; k < T; ++k) {
      acc += std::abs(inc(rng));
      panel.A[k] = acc;
    }
    for (int k = 0; k < T; ++k) panel.A[k] /= acc;
  }

  preprocess::ReleaseLog platform_log{"platform",
                                      bernoulli_days(rng, 1, T, config.recipe.release_prob)};
  const auto pv_full = platform_log.days.empty()
                           ? std::vector<double>(T, 0.0)
                           : preprocess::smooth_releases(platform_log,
                                                         config.recipe.release_decay, 1, T);

  // Complement parameter truth, possibly drawn from the hierarchy.
  const Eigen::MatrixXd D = config.hierarchy ? config.hierarchy->D : default_dummy_design(J);
  std::vector<ComplementParams> truth_params = config.complements;
  if (config.hierarchy) {
    for (int j = 0; j < J; ++j) {
      Eigen::VectorXd theta = config.hierarchy->eta.transpose() * D.row(j).transpose();
      for (int k = 0; k < kThetaDim; ++k)
        theta[k] += gaussian(rng, std::sqrt(config.hierarchy->sigma_eps[k]));
      theta[0] = std::clamp(theta[0], 1e-4, 0.99);
      theta[1] = std::clamp(theta[1], 1e-4, 0.99);
      apply_theta(truth_params[j], theta);
    }
  }
  result.config.complements = truth_params;

  // Per-complement covariates.
  const std::array<const char*, 3> kCategories = {"cat-a", "cat-b", "cat-c"};
  std::vector<std::vector<double>> usage(J);
  for (int j = 0; j < J; ++j) {
    const int len = T - config.launches[j] + 1;
    usage[j] = bounded_walk(rng, len, 0.1, 1.0, 0.05);
  }
  auto usage_at = [&](int j, int day) -> double {
    const int k = day - config.launches[j];
    if (k < 0 || k >= static_cast<int>(usage[j].size())) return 0.0;
    return usage[j][k];
  };

  for (int j = 0; j < J; ++j) {
    ComplementSeries s;
    s.id = "sim-" + std::to_string(j + 1);
    s.category = kCategories[j % kCategories.size()];
    s.launch = config.launches[j];
    s.end = T;
    s.dummies = D.row(j).transpose();
    const int len = s.length();

    preprocess::ReleaseLog log{s.id,
                               bernoulli_days(rng, s.launch, T, config.recipe.release_prob)};
    s.av = demean(log.days.empty()
                      ? std::vector<double>(len, 0.0)
                      : preprocess::smooth_releases(log, config.recipe.release_decay,
                                                    s.launch, T));
    s.pv = demean(std::vector<double>(pv_full.begin() + (s.launch - 1), pv_full.end()));
    s.rtv = demean(bounded_walk(rng, len, 0.3, 4.0, config.recipe.rating_step_sd));
    s.stavg = demean(bounded_walk(rng, len, 1.0, 5.0, config.recipe.rating_step_sd));

    std::vector<double> ol(len, 0.0);
    for (int t = s.launch; t <= T; ++t) {
      double denom = 0.0;
      for (int k = 0; k < J; ++k)
        if (kCategories[k % kCategories.size()] == s.category) denom += usage_at(k, t);
      if (denom > 0.0) ol[t - s.launch] = usage_at(j, t) / denom;
    }
    s.ol = demean(ol);
    panel.complements.push_back(std::move(s));
  }

  // Latent paths and observations.
  NoiseBudget budget;
  LatentPaths& truth = result.truth;
  truth.m.resize(T + 1);
  const PlatformParams& pp = config.platform;
  pp.validate(2, 2);
  truth.m[0] = config.m0_frac * model::market_potential(pp.M0, pp.kappa, panel.A[0]);
  panel.y_platform.resize(T);
  const double w_sd = std::sqrt(pp.state_var);
  const double v_sd = std::sqrt(pp.obs_var);
  for (int t = 1; t <= T; ++t) {
    const PlatformFrame frame = panel.platform_frame(t);
    const double M = model::market_potential(pp.M0, pp.kappa, frame.A);
    const double p = model::platform_external_force(pp, frame);
    const double mean = model::platform_step(truth.m[t - 1], p, pp.q, M);
    truth.m[t] = positive_step(mean, w_sd, rng, budget);
    panel.y_platform[t - 1] = truth.m[t] + gaussian(rng, v_sd);
  }

  truth.n.resize(J);
  for (int j = 0; j < J; ++j) {
    const ComplementParams& cp = truth_params[j];
    cp.validate();
    ComplementSeries& s = panel.complements[j];
    const int len = s.length();
    truth.n[j].resize(len + 1);
    truth.n[j][0] = config.n0;
    s.y.resize(len);
    const double wj_sd = std::sqrt(cp.state_var);
    const double vj_sd = std::sqrt(cp.obs_var);
    for (int t = s.launch; t <= s.end; ++t) {
      const int k = t - s.launch;
      const auto [p, q] = model::complement_forces(cp, s.frame(t));
      const double mean =
          model::complement_step(truth.n[j][k], truth.m[t - 1], p, q, cp.alpha, cp.delta);
      truth.n[j][k + 1] = positive_step(mean, wj_sd, rng, budget);
      s.y[k] = truth.n[j][k + 1] + gaussian(rng, vj_sd);
    }
  }

  result.rejected_draws = budget.rejected;
  result.total_draws = budget.total;
  if (budget.total > 0 && budget.rejected * 2 > budget.total)
    throw ExplosiveTrajectory(
        "simulate_panel: over half of all state draws violated positivity (" +
        std::to_string(budget.rejected) + "/" + std::to_string(budget.total) + ")");
  return result;
}

SimulationConfig default_truth(double noise_scale) {
  if (!(noise_scale > 0.0)) throw Error("default_truth: noise_scale must be > 0");
  SimulationConfig cfg;
  cfg.T = 500;
  cfg.J = 8;
  cfg.launches = {1, 60, 120, 180, 240, 300, 360, 420};

  PlatformParams& p = cfg.platform;
  p.p0 = 1.76e-3;
  p.beta = Eigen::Vector2d(-4.91e-5, -5.66e-4);
  p.rho = Eigen::Vector2d(3.42e-5, 3.52e-5);
  p.q = 1.27e-8;
  p.M0 = 1.54e-2;
  p.kappa = 3.60e-2;
  p.obs_var = 1.44e-2 * noise_scale;
  p.state_var = 1.12e-1 * noise_scale;

  ComplementParams c;
  c.alpha = 0.0142;
  c.delta = 0.0174;
  c.p0 = 0.0087;
  c.p1 = 0.0047;
  c.p2 = 0.0059;
  c.q0 = 0.0057;
  c.q1 = 0.0131;
  c.q2 = 0.0054;
  c.q3 = 0.0043;
  c.obs_var = 2e-4 * noise_scale;
  c.state_var = 2e-4 * noise_scale;
  cfg.complements.assign(cfg.J, c);
  cfg.seed = 1;
  return cfg;
}

}  // namespace platdiff::simulator
