#include "platdiff/filter.hpp"

#include <algorithm>
#include <numeric>

namespace platdiff::filter {

namespace {

double draw_state(double mean, double var, std::mt19937_64& rng, const FfbsOptions& opts,
                  int& floored) {
  std::normal_distribution<double> dist(mean, std::sqrt(std::max(var, 0.0)));
  double x = dist(rng);
  if (!opts.enforce_nonneg) return x;
  for (int i = 0; i < opts.max_redraws && x < 0.0; ++i) x = dist(rng);
  if (x < 0.0) {
    x = 0.0;
    ++floored;
  }
  return x;
}

}  // namespace

FfbsDraw ffbs_sample(const FilterOutput& fo, std::mt19937_64& rng,
                     const FfbsOptions& opts) {
  const int n = fo.size();
  FfbsDraw draw;
  draw.path.resize(n + 1);
  if (!std::isfinite(fo.loglik))
    throw NumericalBlowup("ffbs_sample: forward pass carries non-finite likelihood");

  draw.path[n] = draw_state(fo.filt_mean[n - 1], fo.filt_var[n - 1], rng, opts,
                            draw.floored);
  for (int k = n - 2; k >= -1; --k) {
    const double a = (k >= 0) ? fo.filt_mean[k] : fo.init_mean;
    const double P = (k >= 0) ? fo.filt_var[k] : fo.init_var;
    const double J = fo.jac[k + 1];
    const double Ppred = fo.pred_var[k + 1];
    const double apred = fo.pred_mean[k + 1];
    const double C = (Ppred > 0.0) ? P * J / Ppred : 0.0;
    const double mean = a + C * (draw.path[k + 2] - apred);
    const double var = std::max(P - C * J * P, 0.0);
    draw.path[k + 1] = draw_state(mean, var, rng, opts, draw.floored);
  }
  return draw;
}

InitPrior diffuse_init(std::span<const double> y, double inflation, int window) {
  double first = 0.0;
  bool have_first = false;
  std::vector<double> head;
  for (double v : y) {
    if (is_missing(v)) continue;
    if (!have_first) {
      first = v;
      have_first = true;
    }
    if (static_cast<int>(head.size()) < window) head.push_back(v);
  }
  if (!have_first) throw Error("diffuse_init: series has no observations");
  double var = 1.0;
  if (head.size() >= 2) {
    const double mean = std::accumulate(head.begin(), head.end(), 0.0) / head.size();
    double ss = 0.0;
    for (double v : head) ss += (v - mean) * (v - mean);
    var = ss / (head.size() - 1);
  }
  if (!(var > 0.0)) var = std::max(first * first, 1.0) * 1e-4;
  return {first, inflation * var};
}

FilterOutput platform_filter(const ObservationPanel& panel, const PlatformParams& params) {
  params.validate(panel.x_dim(), panel.z_dim());
  const PlatformTransition f{&params, &panel};
  const InitPrior init = diffuse_init(panel.y_platform);
  return ekf_forward(std::span<const double>(panel.y_platform), f, params.obs_var,
                     init.mean, init.var, 1);
}

FilterOutput conditional_complement_filter(const ComplementSeries& series,
                                           const ComplementParams& params,
                                           const std::vector<double>& m_path) {
  if (static_cast<int>(m_path.size()) < series.end + 1)
    throw WindowViolation("conditional_complement_pass: platform path too short");
  const ComplementTransition f{&params, &series, &m_path};
  const InitPrior init = diffuse_init(series.y);
  return ekf_forward(std::span<const double>(series.y), f, params.obs_var,
                     init.mean, init.var, series.launch);
}

ComplementPass conditional_complement_pass(const ComplementSeries& series,
                                           const ComplementParams& params,
                                           const std::vector<double>& m_path,
                                           std::mt19937_64& rng,
                                           const FfbsOptions& opts) {
  ComplementPass pass;
  pass.filter = conditional_complement_filter(series, params, m_path);
  pass.draw = ffbs_sample(pass.filter, rng, opts);
  return pass;
}

}  // namespace platdiff::filter
