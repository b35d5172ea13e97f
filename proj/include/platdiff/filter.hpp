#ifndef PLATDIFF_FILTER_HPP
#define PLATDIFF_FILTER_HPP

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "platdiff/core_model.hpp"
#include "platdiff/types.hpp"

namespace platdiff::filter {

inline constexpr double kVarianceCeiling = 1e12;

// Moments and likelihood increments of a scalar EKF pass over days
// t0..t0+n-1. Index k corresponds to day t0+k; the diffuse initial state
// lives at day t0-1.
struct FilterOutput {
  int t0 = 1;
  double init_mean = 0.0;
  double init_var = 1.0;
  double obs_var = 1.0;
  std::vector<double> pred_mean, pred_var;  // before the day's observation
  std::vector<double> filt_mean, filt_var;  // after the day's observation
  std::vector<double> obs_pred_var;         // one-step-ahead observation variance
  std::vector<double> jac;                  // transition Jacobian at the filtered mean
  std::vector<double> state_var;            // transition noise variance used per step
  std::vector<double> incr_loglik;
  double loglik = 0.0;

  int size() const { return static_cast<int>(pred_mean.size()); }
};

// Scalar EKF forward pass. Transition must provide, for day t:
//   double mean(int t, double prev)  -- g(prev) for the step (t-1) -> t
//   double jac(int t, double prev)   -- dg/dprev at prev
//   double noise_var(int t)          -- transition noise variance
//   double noise_mean(int t)         -- transition noise mean (0 except for
//                                       correlated-error conditioning)
// Observations are y[k] for day t0+k; NaN entries are prediction-only steps.
template <class Transition>
FilterOutput ekf_forward(std::span<const double> y, const Transition& f, double obs_var,
                         double init_mean, double init_var, int t0 = 1) {
  if (y.empty()) throw Error("ekf_forward: empty observation series");
  if (!(obs_var > 0.0) || !(init_var > 0.0))
    throw Error("ekf_forward: obs_var and init_var must be > 0");
  const int n = static_cast<int>(y.size());

  FilterOutput out;
  out.t0 = t0;
  out.init_mean = init_mean;
  out.init_var = init_var;
  out.obs_var = obs_var;
  out.pred_mean.resize(n);
  out.pred_var.resize(n);
  out.filt_mean.resize(n);
  out.filt_var.resize(n);
  out.obs_pred_var.resize(n);
  out.jac.resize(n);
  out.state_var.resize(n);
  out.incr_loglik.assign(n, 0.0);

  double a = init_mean;
  double P = init_var;
  for (int k = 0; k < n; ++k) {
    const int t = t0 + k;
    const double J = f.jac(t, a);
    const double W = f.noise_var(t);
    const double apred = f.mean(t, a) + f.noise_mean(t);
    const double Ppred = J * J * P + W;
    if (!std::isfinite(apred) || !std::isfinite(Ppred) || Ppred > kVarianceCeiling)
      throw NumericalBlowup("ekf_forward: predictive moments blew up at day " +
                            std::to_string(t));
    out.jac[k] = J;
    out.state_var[k] = W;
    out.pred_mean[k] = apred;
    out.pred_var[k] = Ppred;
    const double S = Ppred + obs_var;
    out.obs_pred_var[k] = S;
    if (is_missing(y[k])) {
      a = apred;
      P = Ppred;
    } else {
      const double v = y[k] - apred;
      const double K = Ppred / S;
      a = apred + K * v;
      P = (1.0 - K) * Ppred;
      out.incr_loglik[k] = -0.5 * (std::log(2.0 * M_PI * S) + v * v / S);
    }
    out.filt_mean[k] = a;
    out.filt_var[k] = P;
    out.loglik += out.incr_loglik[k];
  }
  return out;
}

struct FfbsOptions {
  bool enforce_nonneg = true;
  int max_redraws = 100;
};

// Backward state draw from a completed forward pass.
struct FfbsDraw {
  std::vector<double> path;  // index 0 = state at day t0-1
  int floored = 0;           // negative draws floored after exhausting redraws
};

FfbsDraw ffbs_sample(const FilterOutput& fo, std::mt19937_64& rng,
                     const FfbsOptions& opts = {});

// Platform transition for a fixed parameter set over a panel.
struct PlatformTransition {
  const PlatformParams* params;
  const ObservationPanel* panel;

  double potential(int t) const {
    return model::market_potential(params->M0, params->kappa, panel->A[t - 1]);
  }
  double force(int t) const {
    return model::platform_external_force(*params, panel->platform_frame(t));
  }
  double mean(int t, double prev) const {
    return model::platform_step(prev, force(t), params->q, potential(t));
  }
  double jac(int t, double prev) const {
    return model::platform_jacobian(prev, force(t), params->q, potential(t));
  }
  double noise_var(int) const { return params->state_var; }
  double noise_mean(int) const { return 0.0; }
};

// Complement transition conditional on a platform path m[0..T].
struct ComplementTransition {
  const ComplementParams* params;
  const ComplementSeries* series;
  const std::vector<double>* m;  // platform path, index t = m_t

  double mean(int t, double prev) const {
    const auto [p, q] = model::complement_forces(*params, series->frame(t));
    return model::complement_step(prev, (*m)[t - 1], p, q, params->alpha, params->delta);
  }
  double jac(int t, double prev) const {
    const auto [p, q] = model::complement_forces(*params, series->frame(t));
    return model::complement_jacobian(prev, (*m)[t - 1], p, q, params->alpha,
                                      params->delta);
  }
  double noise_var(int) const { return params->state_var; }
  double noise_mean(int) const { return 0.0; }
};

// Diffuse initialization: mean at the first observation, variance a multiple
// of the early-sample variance.
struct InitPrior {
  double mean = 0.0;
  double var = 1.0;
};

InitPrior diffuse_init(std::span<const double> y, double inflation = 10.0,
                       int window = 30);

FilterOutput platform_filter(const ObservationPanel& panel, const PlatformParams& params);

struct ComplementPass {
  FilterOutput filter;
  FfbsDraw draw;
};

// EKF forward pass for a complement, treating the platform path as known.
FilterOutput conditional_complement_filter(const ComplementSeries& series,
                                           const ComplementParams& params,
                                           const std::vector<double>& m_path);

// EKF forward then FFBS for complement j, treating the platform path as known.
ComplementPass conditional_complement_pass(const ComplementSeries& series,
                                           const ComplementParams& params,
                                           const std::vector<double>& m_path,
                                           std::mt19937_64& rng,
                                           const FfbsOptions& opts = {});

}  // namespace platdiff::filter

#endif  // PLATDIFF_FILTER_HPP
