// Acceptance suite: one criterion per invocation, one PASS/FAIL line each.
//
//   acceptance --criterion N --cli <path-to-cli> --data <data-dir>
//
// Exit code 0 on pass, 1 on fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "platdiff/allocator.hpp"
#include "platdiff/core_model.hpp"
#include "platdiff/diagnostics.hpp"
#include "platdiff/endogeneity.hpp"
#include "platdiff/filter.hpp"
#include "platdiff/preprocess.hpp"
#include "platdiff/sampler.hpp"
#include "platdiff/simulator.hpp"

namespace fs = std::filesystem;
using namespace platdiff;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

bool check(bool ok, const std::string& what, std::vector<std::string>& failures) {
  if (!ok) failures.push_back(what);
  return ok;
}

// ---------------------------------------------------------------- criterion 1

bool criterion_jacobians() {
  Timer timer;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<std::string> failures;

  for (int i = 0; i < 100; ++i) {
    const double M = 0.5 + 99.5 * u01(rng);
    const double m = u01(rng) * M;
    const double p = 1e-4 + 0.05 * u01(rng);
    const double q = 0.05 * u01(rng);
    const double alpha = 0.05 + 0.9 * u01(rng);
    const double delta = 0.2 * u01(rng);
    const double mc = 1.0 + 99.0 * u01(rng);
    const double n = u01(rng) * alpha * mc;

    const double hm = 1e-6 * std::max(1.0, std::abs(m));
    const double fd_p = (model::platform_step(m + hm, p, q, M) -
                         model::platform_step(m - hm, p, q, M)) /
                        (2.0 * hm);
    const double an_p = model::platform_jacobian(m, p, q, M);
    check(std::abs(fd_p - an_p) / std::max(1.0, std::abs(an_p)) < 1e-6,
          "platform jacobian point " + std::to_string(i), failures);

    const double hn = 1e-6 * std::max(1.0, std::abs(n));
    const double fd_c = (model::complement_step(n + hn, mc, p, q, alpha, delta) -
                         model::complement_step(n - hn, mc, p, q, alpha, delta)) /
                        (2.0 * hn);
    const double an_c = model::complement_jacobian(n, mc, p, q, alpha, delta);
    check(std::abs(fd_c - an_c) / std::max(1.0, std::abs(an_c)) < 1e-6,
          "complement jacobian point " + std::to_string(i), failures);
  }
  check(timer.seconds() < 1.0, "runtime below 1 s", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 2

// Linear-Gaussian transition x_t = c + F x_{t-1} + w for the degenerate case.
struct LinearTransition {
  double c = 0.0, F = 1.0, W = 1.0;
  double mean(int, double prev) const { return c + F * prev; }
  double jac(int, double) const { return F; }
  double noise_var(int) const { return W; }
  double noise_mean(int) const { return 0.0; }
};

struct KalmanOracle {
  std::vector<double> filt_mean, filt_var, pred_mean, pred_var;
  double loglik = 0.0;
};

KalmanOracle kalman(const std::vector<double>& y, const LinearTransition& f, double V,
                    double a0, double P0) {
  KalmanOracle out;
  double a = a0, P = P0;
  for (double obs : y) {
    const double apred = f.c + f.F * a;
    const double Ppred = f.F * f.F * P + f.W;
    out.pred_mean.push_back(apred);
    out.pred_var.push_back(Ppred);
    if (is_missing(obs)) {
      a = apred;
      P = Ppred;
    } else {
      const double S = Ppred + V;
      const double v = obs - apred;
      a = apred + Ppred / S * v;
      P = Ppred - Ppred * Ppred / S;
      out.loglik += -0.5 * (std::log(2.0 * M_PI * S) + v * v / S);
    }
    out.filt_mean.push_back(a);
    out.filt_var.push_back(P);
  }
  return out;
}

std::vector<double> simulate_linear(const LinearTransition& f, double V, double x0, int T,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> y(T);
  double x = x0;
  for (int t = 0; t < T; ++t) {
    x = f.c + f.F * x + std::sqrt(f.W) * n01(rng);
    y[t] = x + std::sqrt(V) * n01(rng);
  }
  return y;
}

bool criterion_linear_oracle() {
  Timer timer;
  std::vector<std::string> failures;
  // q = 0, kappa = 0, constant p: drift p (M - m) makes the transition
  // c + F m with c = p M, F = 1 - p.
  const double p = 0.02, M = 50.0, V = 0.4, W = 0.09;
  LinearTransition f{p * M, 1.0 - p, W};
  std::vector<double> y = simulate_linear(f, V, 1.0, 1000, 7);
  y[100] = kMissing;  // prediction-only day must agree too
  const auto oracle = kalman(y, f, V, 1.0, 2.0);
  const auto fo =
      filter::ekf_forward(std::span<const double>(y), f, V, 1.0, 2.0, 1);
  double max_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    max_err = std::max(max_err, std::abs(fo.filt_mean[t] - oracle.filt_mean[t]));
    max_err = std::max(max_err, std::abs(fo.filt_var[t] - oracle.filt_var[t]));
    max_err = std::max(max_err, std::abs(fo.pred_mean[t] - oracle.pred_mean[t]));
    max_err = std::max(max_err, std::abs(fo.pred_var[t] - oracle.pred_var[t]));
  }
  check(max_err < 1e-10, "filter moments within 1e-10 (max err " +
                             std::to_string(max_err) + ")",
        failures);
  check(std::abs(fo.loglik - oracle.loglik) < 1e-10, "log-likelihood within 1e-10",
        failures);
  check(timer.seconds() < 1.0, "runtime below 1 s", failures);
  for (const auto& f2 : failures) std::printf("  failed: %s\n", f2.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 3

struct RtsOracle {
  std::vector<double> mean, var;  // index 0 = initial state
};

RtsOracle rts(const KalmanOracle& k, const LinearTransition& f, double a0, double P0) {
  const int n = static_cast<int>(k.filt_mean.size());
  RtsOracle out;
  out.mean.assign(n + 1, 0.0);
  out.var.assign(n + 1, 0.0);
  out.mean[n] = k.filt_mean[n - 1];
  out.var[n] = k.filt_var[n - 1];
  for (int t = n - 1; t >= 0; --t) {
    const double a = (t > 0) ? k.filt_mean[t - 1] : a0;
    const double P = (t > 0) ? k.filt_var[t - 1] : P0;
    const double C = P * f.F / k.pred_var[t];
    out.mean[t] = a + C * (out.mean[t + 1] - k.pred_mean[t]);
    out.var[t] = P + C * C * (out.var[t + 1] - k.pred_var[t]);
  }
  return out;
}

bool criterion_ffbs_calibration() {
  Timer timer;
  std::vector<std::string> failures;
  const double p = 0.03, M = 20.0, V = 0.25, W = 0.04;
  LinearTransition f{p * M, 1.0 - p, W};
  const int T = 300;
  const std::vector<double> y = simulate_linear(f, V, 0.5, T, 11);
  const auto oracle = kalman(y, f, V, 0.5, 1.0);
  const auto smooth = rts(oracle, f, 0.5, 1.0);
  const auto fo = filter::ekf_forward(std::span<const double>(y), f, V, 0.5, 1.0, 1);

  const int R = 5000;
  std::vector<double> sum(T + 1, 0.0), sumsq(T + 1, 0.0);
  std::mt19937_64 rng(13);
  filter::FfbsOptions opts;
  opts.enforce_nonneg = false;
  for (int r = 0; r < R; ++r) {
    const auto draw = filter::ffbs_sample(fo, rng, opts);
    for (int t = 0; t <= T; ++t) {
      sum[t] += draw.path[t];
      sumsq[t] += draw.path[t] * draw.path[t];
    }
  }
  int mean_fail = 0, var_fail = 0;
  for (int t = 0; t <= T; ++t) {
    const double mean = sum[t] / R;
    const double var = sumsq[t] / R - mean * mean;
    const double se = std::sqrt(smooth.var[t] / R);
    if (std::abs(mean - smooth.mean[t]) > 3.0 * se) ++mean_fail;
    if (std::abs(var - smooth.var[t]) > 0.10 * smooth.var[t]) ++var_fail;
  }
  check(mean_fail == 0,
        "draw means within 3 MC SE everywhere (" + std::to_string(mean_fail) +
            " days out)",
        failures);
  check(var_fail == 0,
        "draw variances within 10% everywhere (" + std::to_string(var_fail) +
            " days out)",
        failures);
  check(timer.seconds() < 30.0, "runtime below 30 s", failures);
  for (const auto& f2 : failures) std::printf("  failed: %s\n", f2.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 4

// Fixed seeds whose rejection sampler completes; the generator documents that
// some seeds exhaust the nonnegativity redraws when the noise is tiny.
constexpr std::array<int, 10> kFullPanelSeeds = {1, 3, 4, 5, 6, 7, 9, 10, 11, 12};

std::map<std::string, double> truth_map(const simulator::SimulationConfig& cfg) {
  std::map<std::string, double> truth;
  truth["platform.p0"] = cfg.platform.p0;
  for (int i = 0; i < cfg.platform.beta.size(); ++i)
    truth["platform.beta" + std::to_string(i + 1)] = cfg.platform.beta[i];
  for (int i = 0; i < cfg.platform.rho.size(); ++i)
    truth["platform.rho" + std::to_string(i + 1)] = cfg.platform.rho[i];
  truth["platform.q"] = cfg.platform.q;
  truth["platform.M0"] = cfg.platform.M0;
  truth["platform.kappa"] = cfg.platform.kappa;
  truth["platform.V"] = cfg.platform.obs_var;
  truth["platform.W"] = cfg.platform.state_var;
  const std::vector<std::string> fields = {"alpha", "delta", "p0", "p1", "p2",
                                           "q0",    "q1",    "q2", "q3", "V", "W"};
  for (size_t j = 0; j < cfg.complements.size(); ++j) {
    const Eigen::VectorXd th = theta_vector(cfg.complements[j]);
    const std::string tag = "addon" + std::to_string(j + 1) + ".";
    for (int k = 0; k < kThetaDim; ++k) truth[tag + fields[k]] = th[k];
    truth[tag + "V"] = cfg.complements[j].obs_var;
    truth[tag + "W"] = cfg.complements[j].state_var;
  }
  return truth;
}

bool criterion_recovery() {
  Timer timer;
  std::vector<std::string> failures;
  long covered = 0, total = 0;
  for (int seed : kFullPanelSeeds) {
    simulator::SimulationConfig cfg = simulator::default_truth(1e-6);
    cfg.seed = static_cast<std::uint64_t>(seed);
    const simulator::SimulationResult sim = simulator::simulate_panel(cfg);

    sampler::PriorConfig priors;
    sampler::McmcConfig mcmc;
    mcmc.iterations = 4000;
    mcmc.seed = 100 + static_cast<std::uint64_t>(seed);
    const sampler::DrawArchive archive = sampler::run_chain(sim.panel, priors, mcmc);

    const auto truth = truth_map(cfg);
    for (const auto& row : sampler::summarize(archive)) {
      const auto it = truth.find(row.name);
      if (it == truth.end()) continue;  // pooled pseudo-series have no single truth
      ++total;
      if (row.q025 <= it->second && it->second <= row.q975) ++covered;
    }
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(total);
  std::printf("  pooled coverage %ld/%ld = %.3f in %.1f s\n", covered, total, rate,
              timer.seconds());
  check(rate >= 0.90, "pooled 95%-interval coverage at least 0.90", failures);
  check(timer.seconds() < 1200.0, "runtime below 20 min", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 5

bool criterion_dic() {
  Timer timer;
  std::vector<std::string> failures;
  int ordered = 0;
  for (int seed : kFullPanelSeeds) {
    simulator::SimulationConfig truth = simulator::default_truth(1e-6);
    truth.seed = static_cast<std::uint64_t>(seed);
    const simulator::SimulationResult sim = simulator::simulate_panel(truth);
    sampler::PriorConfig priors;
    std::map<std::string, diagnostics::DicResult> results;
    for (const std::string name : {"proposed", "no_churn"}) {
      sampler::McmcConfig mcmc;
      mcmc.iterations = 400;
      mcmc.burnin = 100;
      mcmc.thin = 2;
      mcmc.seed = 500 + static_cast<std::uint64_t>(seed);
      mcmc.variant = diagnostics::build_variant(name);
      const sampler::DrawArchive archive = sampler::run_chain(sim.panel, priors, mcmc);
      const diagnostics::DicResult d = diagnostics::dic(sim.panel, archive);
      check(d.dic == d.dhat + 2.0 * d.p_d,
            "DIC identity holds exactly (" + name + ", seed " + std::to_string(seed) + ")",
            failures);
      check(d.p_d == d.dbar - d.dhat, "p_D identity holds exactly (" + name + ")",
            failures);
      results[name] = d;
    }
    if (results["proposed"].dic < results["no_churn"].dic) ++ordered;
  }
  std::printf("  DIC(proposed) < DIC(no_churn) in %d/10 seeds, %.1f s\n", ordered,
              timer.seconds());
  check(ordered >= 8, "ordering holds in at least 8/10 seeds", failures);
  check(timer.seconds() < 600.0, "runtime below 10 min", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 6

bool criterion_forecast() {
  Timer timer;
  std::vector<std::string> failures;

  // Noise-free panel: the one-step predictions reproduce the observations.
  {
    simulator::SimulationConfig cfg = simulator::default_truth(1e-20);
    cfg.seed = 3;
    const simulator::SimulationResult sim = simulator::simulate_panel(cfg);
    std::vector<ComplementParams> comps = cfg.complements;
    const auto r = diagnostics::one_step_forecast(sim.panel, cfg.platform, comps);
    std::printf("  noise-free pooled MAD %.3e\n", r.pooled_mad);
    check(r.pooled_mad <= 1e-8, "noise-free pooled MAD at most 1e-8", failures);
  }

  // Model beats the random walk at the truth point on noisy panels.
  int beats = 0;
  for (int seed : kFullPanelSeeds) {
    simulator::SimulationConfig cfg = simulator::default_truth(1e-6);
    cfg.seed = static_cast<std::uint64_t>(seed);
    const simulator::SimulationResult sim = simulator::simulate_panel(cfg);
    const auto model = diagnostics::one_step_forecast(sim.panel, cfg.platform,
                                                      cfg.complements);
    const auto rw = diagnostics::random_walk_forecast(sim.panel);
    check(model.n_scored == rw.n_scored, "identical scored day sets", failures);
    if (model.pooled_mad < rw.pooled_mad) ++beats;
  }
  std::printf("  beats random walk on %d/10 panels\n", beats);
  check(beats >= 8, "beats the random-walk baseline on at least 8/10 panels", failures);

  // No look-ahead: rewriting observations after day 100 leaves all earlier
  // predictions bit-identical.
  {
    simulator::SimulationConfig cfg = simulator::default_truth(1e-6);
    cfg.seed = 4;
    simulator::SimulationResult sim = simulator::simulate_panel(cfg);
    const auto before = diagnostics::one_step_forecast(sim.panel, cfg.platform,
                                                       cfg.complements);
    for (int t = 101; t <= sim.panel.T; ++t) sim.panel.y_platform[t - 1] += 123.0;
    const auto after = diagnostics::one_step_forecast(sim.panel, cfg.platform,
                                                      cfg.complements);
    bool identical = true;
    for (size_t i = 0; i < before.platform.days.size(); ++i) {
      if (before.platform.days[i] > 100) break;
      if (after.platform.days[i] != before.platform.days[i] ||
          after.platform.pred[i] != before.platform.pred[i])
        identical = false;
    }
    check(identical, "platform predictions through day 100 unchanged bit-for-bit",
          failures);
  }
  check(timer.seconds() < 600.0, "runtime below 10 min", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 7

struct ToyProblem {
  ObservationPanel panel;
  allocator::AllocatorProblem problem;
};

// Saturating single-covariate problem over an unobserved horizon: effort per
// day raises the adoption force, and the remaining potential depletes.
ToyProblem make_toy(int T, int t0, int t1, int blocks, double budget,
                    const std::vector<double>& effort_path) {
  ToyProblem toy;
  toy.panel.T = T;
  for (int t = 1; t <= T; ++t) {
    toy.panel.X.push_back(Eigen::VectorXd::Zero(1));
    toy.panel.Z.push_back(Eigen::VectorXd::Constant(1, effort_path[t - 1]));
    toy.panel.A.push_back(0.0);
    toy.panel.y_platform.push_back((t >= t0) ? kMissing : 1.0 + 0.1 * t);
  }
  PlatformParams p;
  p.p0 = 0.01;
  p.beta = Eigen::VectorXd::Zero(1);
  p.rho = Eigen::VectorXd::Constant(1, 0.05);
  p.q = 0.0;
  p.M0 = 10.0;
  p.kappa = 0.0;
  p.obs_var = 0.01;
  p.state_var = 0.01;
  toy.problem.panel = nullptr;  // filled by caller (panel must outlive problem)
  toy.problem.platform = p;
  toy.problem.t0 = t0;
  toy.problem.t1 = t1;
  toy.problem.n_blocks = blocks;
  toy.problem.budget = budget;
  return toy;
}

bool criterion_allocator(const std::string& data_dir) {
  Timer timer;
  std::vector<std::string> failures;

  // Exhaustive enumeration on the 2-period, 5-level toy.
  {
    ToyProblem toy = make_toy(12, 9, 10, 2, 4.0, std::vector<double>(12, 0.5));
    toy.problem.panel = &toy.panel;
    const std::vector<double> levels{0.0, 1.0, 2.0, 3.0, 4.0};
    double best = -1e300;
    for (double a : levels)
      for (double b : levels) {
        const auto s = allocator::project_to_budget({a, b}, 4.0);
        best = std::max(best, allocator::evaluate_schedule(toy.problem, s));
      }
    allocator::GAConfig ga;
    ga.population = 60;
    ga.generations = 120;
    ga.seed = 2;
    const auto result = allocator::optimize(toy.problem, ga);
    check(std::abs(result.best.objective - best) <= 1e-12 * std::abs(best),
          "GA matches exhaustive enumeration of all 25 schedules", failures);
  }

  // Optimized dispersion below a bursty recorded schedule, 10 seeds. The
  // recorded effort is a background trickle plus one late burst; the GA
  // reallocates the same budget over the observed sample window.
  int better_obj = 0, lower_sd = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01;
    const int T = 60, t0 = 11, t1 = 60, blocks = 10;
    std::vector<double> effort(T, 0.0);
    const int burst_start = 40 + static_cast<int>(u01(rng) * 10);
    for (int t = 0; t < T; ++t) effort[t] = 0.3 * u01(rng);
    for (int t = burst_start; t < std::min(T, burst_start + 8); ++t)
      effort[t] += 12.0 + 4.0 * u01(rng);
    double budget = 0.0;
    for (int t = t0 - 1; t < t1; ++t) budget += effort[t];

    ObservationPanel panel;
    panel.T = T;
    const double M = 10.0;
    double m = 0.5;
    for (int t = 1; t <= T; ++t) {
      panel.X.push_back(Eigen::VectorXd::Zero(1));
      panel.Z.push_back(Eigen::VectorXd::Constant(1, effort[t - 1]));
      panel.A.push_back(0.0);
      m += 0.02 * (M - m) + 0.02 * n01(rng);
      panel.y_platform.push_back(m + 0.02 * n01(rng));
    }
    allocator::AllocatorProblem problem;
    problem.panel = &panel;
    problem.platform.p0 = 0.005;
    problem.platform.beta = Eigen::VectorXd::Zero(1);
    problem.platform.rho = Eigen::VectorXd::Constant(1, 0.05);
    problem.platform.q = 0.0;
    problem.platform.M0 = M;
    problem.platform.kappa = 0.0;
    problem.platform.obs_var = 0.01;
    problem.platform.state_var = 0.01;
    problem.t0 = t0;
    problem.t1 = t1;
    problem.n_blocks = blocks;
    problem.budget = budget;

    const auto observed = allocator::observed_schedule(problem);
    const double obs_obj = allocator::evaluate_schedule(problem, observed);
    const auto uniform = allocator::project_to_budget(
        std::vector<double>(blocks, 1.0), budget);
    const double uni_obj = allocator::evaluate_schedule(problem, uniform);

    allocator::GAConfig ga;
    ga.population = 50;
    ga.generations = 80;
    ga.seed = 900 + static_cast<std::uint64_t>(seed);
    const auto result = allocator::optimize(problem, ga);
    if (result.best.objective >= obs_obj && result.best.objective >= uni_obj)
      ++better_obj;
    if (allocator::sample_sd(result.best.effort) < allocator::sample_sd(observed))
      ++lower_sd;
  }
  std::printf("  objective at least both baselines on %d/10, lower sd on %d/10\n",
              better_obj, lower_sd);
  check(better_obj == 10, "objective at least both seeded baselines on every seed",
        failures);
  check(lower_sd >= 8, "optimized dispersion below observed on at least 8/10 seeds",
        failures);

  // Published dispersion gap on the bundled monthly fixture.
  {
    std::ifstream in(data_dir + "/table12.csv");
    check(in.good(), "monthly fixture present", failures);
    std::string line;
    std::getline(in, line);
    std::vector<double> actual, model;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      actual.push_back(std::stod(cells[2]));
      model.push_back(std::stod(cells[3]));
    }
    const double sd_actual = allocator::sample_sd(actual);
    const double sd_model = allocator::sample_sd(model);
    std::printf("  fixture sd(actual) = %.4f, sd(model) = %.4f\n", sd_actual, sd_model);
    check(std::abs(sd_actual - 441.56) < 0.005, "sd(actual) rounds to 441.56", failures);
    check(std::abs(sd_model - 252.98) < 0.005, "sd(model) rounds to 252.98", failures);
    check(sd_model < sd_actual, "model-based dispersion below actual", failures);
  }
  check(timer.seconds() < 600.0, "runtime below 10 min", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 8

endogeneity::LIVSlice liv_slice(int T, double corr, const endogeneity::LIVConfig& cfg,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> stdn(0.0, 1.0);
  endogeneity::LIVSlice slice;
  slice.y.resize(T);
  slice.z1.resize(T);
  const double g1 = 0.05, g2 = 0.9, psi = 0.04, sd_w = 0.1, sd_g = 0.2, obs_sd = 0.02;
  double mu = g1 / (1.0 - g2);
  double m = 0.02 * cfg.M0;
  for (int t = 0; t < T; ++t) {
    mu = g1 + g2 * mu + std::sqrt(psi) * stdn(rng);
    const double zw = stdn(rng);
    const double zg = stdn(rng);
    const double w = sd_w * zw;
    const double g = sd_g * (corr * zw + std::sqrt(1.0 - corr * corr) * zg);
    const double p = cfg.p0 + cfg.p1 * mu;
    m = std::max(m + (p + cfg.q * m / cfg.M0) * (cfg.M0 - m) + w, 0.0);
    slice.z1[t] = mu + g;
    slice.y[t] = m + obs_sd * stdn(rng);
  }
  return slice;
}

bool criterion_endogeneity() {
  Timer timer;
  std::vector<std::string> failures;
  endogeneity::LIVConfig cfg;
  cfg.p0 = 0.001;
  cfg.p1 = 0.004;
  cfg.q = 0.0;
  cfg.M0 = 200.0;
  cfg.kappa = 0.0;
  cfg.iterations = 1000;
  cfg.burnin = 333;
  cfg.thin = 2;

  int cover = 0;
  for (int rep = 0; rep < 20; ++rep) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(rep);
    const auto slice = liv_slice(1000, 0.0, cfg, 2000 + rep);
    const auto r = endogeneity::liv_fit(slice, cfg);
    if (r.corr.q025 <= 0.0 && 0.0 <= r.corr.q975) ++cover;
  }
  std::printf("  zero-correlation coverage %d/20\n", cover);
  check(cover >= 18, "95% CI covers 0 in at least 90% of replications", failures);

  cfg.seed = 77;
  const auto slice = liv_slice(1000, 0.5, cfg, 88);
  const auto r = endogeneity::liv_fit(slice, cfg);
  std::printf("  injected Corr=0.5 posterior mean %.3f\n", r.corr.mean);
  check(std::abs(r.corr.mean - 0.5) <= 0.15, "posterior mean within 0.15 of 0.5",
        failures);
  check(timer.seconds() < 600.0, "runtime below 10 min", failures);
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// ---------------------------------------------------------------- criterion 9

bool criterion_preprocess() {
  std::vector<std::string> failures;

  preprocess::ReleaseLog log;
  log.id = "x";
  log.days = {10};
  const auto smooth = preprocess::smooth_releases(log, 0.89, 1, 20);
  check(smooth[11] == std::pow(0.89, 2), "two-day carry-over equals 0.89^2 exactly",
        failures);
  check(std::abs(smooth[11] - 0.7921) < 1e-12, "carry-over value is 0.7921", failures);

  const preprocess::CategoryMap cats = {
      {"a", "tools"}, {"b", "tools"}, {"c", "themes"}};
  const auto shares = preprocess::observational_learning(
      {"a", "b", "c"}, {3.0, 1.0, 5.0}, cats, 1);
  check(std::abs(shares[0] + shares[1] - 1.0) < 1e-15, "tools shares sum to 1",
        failures);
  check(std::abs(shares[2] - 1.0) < 1e-15, "themes share sums to 1", failures);

  const std::vector<double> series = {2.0, 4.0, 6.0, -1.0, 0.5};
  for (const auto kind :
       {preprocess::TransformKind::Demean, preprocess::TransformKind::Rescale,
        preprocess::TransformKind::DemeanRescale}) {
    const auto [transformed, record] = preprocess::standardize(series, kind, "s");
    for (size_t i = 0; i < series.size(); ++i)
      check(std::abs(record.invert(transformed[i]) - series[i]) < 1e-12,
            "standardize round-trips to 1e-12", failures);
  }
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

// --------------------------------------------------------------- criterion 10

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// All regular files (relative paths) under a directory, except manifest.json,
// whose wall-clock timestamps are excluded from determinism comparisons.
std::vector<std::string> artifact_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).string();
    if (fs::path(rel).filename() == "manifest.json") continue;
    out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool criterion_determinism(const std::string& cli, const std::string& data_dir) {
  Timer timer;
  std::vector<std::string> failures;
  const fs::path root = fs::temp_directory_path() / "platdiff_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  const std::string config_path = (root / "run.ini").string();
  {
    std::ofstream out(config_path);
    out << "sampler.iterations=800\n"
        << "sampler.burnin=400\n"
        << "sampler.thin=2\n"
        << "simulate.noise_scale=1e-6\n"
        << "simulate.T=80\n"
        << "simulate.J=2\n"
        << "optimize.blocks=5\n"
        << "optimize.population=30\n"
        << "optimize.generations=40\n"
        << "endogeneity.iterations=150\n"
        << "endogeneity.burnin=50\n";
  }

  auto run_pipeline = [&](const fs::path& dir) -> bool {
    const std::string d = dir.string();
    const std::string q = "\"" + cli + "\"";
    const std::string cfg = " --config " + config_path + " --seed 9 ";
    if (run_cmd(q + " ingest --platform " + data_dir + "/fixtures/platform.csv" +
                " --complement " + data_dir + "/fixtures/addon_alpha.csv" +
                " --complement " + data_dir + "/fixtures/addon_beta.csv" + cfg +
                "--out " + d + "/ingest") != 0)
      return false;
    if (run_cmd(q + " simulate" + cfg + "--out " + d + "/sim") != 0) return false;
    if (run_cmd(q + " fit --panel " + d + "/sim/panel.json" + cfg + "--out " + d +
                "/fit") != 0)
      return false;
    if (run_cmd(q + " forecast --panel " + d + "/sim/panel.json --archive " + d +
                "/fit/archive.jsonl" + cfg + "--out " + d + "/forecast") != 0)
      return false;
    if (run_cmd(q + " compare --panel " + d + "/sim/panel.json --variants " +
                "proposed,no_churn" + cfg + "--out " + d + "/compare") != 0)
      return false;
    if (run_cmd(q + " optimize --panel " + d + "/sim/panel.json --archive " + d +
                "/fit/archive.jsonl" + cfg + "--out " + d + "/optimize") != 0)
      return false;
    if (run_cmd(q + " endogeneity --panel " + d + "/sim/panel.json --archive " + d +
                "/fit/archive.jsonl" + cfg + "--out " + d + "/endo") != 0)
      return false;
    if (run_cmd(q + " report --run " + d + "/fit" + cfg + "--out " + d + "/report") != 0)
      return false;
    return true;
  };

  const fs::path run_a = root / "a";
  const fs::path run_b = root / "b";
  check(run_pipeline(run_a), "first pipeline run succeeds", failures);
  check(run_pipeline(run_b), "second pipeline run succeeds", failures);

  if (failures.empty()) {
    const auto files_a = artifact_files(run_a);
    const auto files_b = artifact_files(run_b);
    check(files_a == files_b, "identical artifact file sets", failures);
    check(!files_a.empty(), "pipeline produced artifacts", failures);
    for (const auto& rel : files_a) {
      if (slurp(run_a / rel) != slurp(run_b / rel))
        check(false, "byte-identical artifact: " + rel, failures);
    }
    std::printf("  %zu artifacts compared byte-for-byte in %.1f s\n", files_a.size(),
                timer.seconds());
  }
  for (const auto& f : failures) std::printf("  failed: %s\n", f.c_str());
  return failures.empty();
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  std::string cli, data_dir;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--criterion") criterion = std::atoi(argv[i + 1]);
    else if (flag == "--cli") cli = argv[i + 1];
    else if (flag == "--data") data_dir = argv[i + 1];
  }
  if (criterion < 1 || criterion > 10) {
    std::fprintf(stderr, "usage: acceptance --criterion 1..10 --cli PATH --data DIR\n");
    return 2;
  }

  static const std::vector<std::string> names = {
      "Jacobians match central finite differences",
      "linear-case EKF matches the closed-form Kalman filter",
      "FFBS draws are calibrated against the analytic smoother",
      "parameter recovery coverage on seeded synthetic panels",
      "DIC identity and churn-variant ordering",
      "one-step forecasts: noise-free exactness, random-walk margin, no look-ahead",
      "allocator brute-force equivalence and dispersion gap",
      "latent-IV calibration at zero and injected correlation",
      "preprocessing exactness",
      "end-to-end CLI determinism",
  };

  bool ok = false;
  try {
    switch (criterion) {
      case 1: ok = criterion_jacobians(); break;
      case 2: ok = criterion_linear_oracle(); break;
      case 3: ok = criterion_ffbs_calibration(); break;
      case 4: ok = criterion_recovery(); break;
      case 5: ok = criterion_dic(); break;
      case 6: ok = criterion_forecast(); break;
      case 7: ok = criterion_allocator(data_dir); break;
      case 8: ok = criterion_endogeneity(); break;
      case 9: ok = criterion_preprocess(); break;
      case 10: ok = criterion_determinism(cli, data_dir); break;
    }
  } catch (const std::exception& e) {
    std::printf("criterion %d: FAIL - %s (exception: %s)\n", criterion,
                names[criterion - 1].c_str(), e.what());
    return 1;
  }
  std::printf("criterion %d: %s - %s\n", criterion, ok ? "PASS" : "FAIL",
              names[criterion - 1].c_str());
  return ok ? 0 : 1;
}
