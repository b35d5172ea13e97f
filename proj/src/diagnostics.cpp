#include "platdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platdiff/filter.hpp"

namespace platdiff::diagnostics {

namespace {

// Conditioning path for the complement filters: filtered platform mean,
// deterministic given the parameter point. The latent adopter count is
// nonnegative by construction, so filtered means that dip below zero in the
// near-zero early regime are floored to keep the complement potential valid.
std::vector<double> conditioning_path(const filter::FilterOutput& pf, int T) {
  constexpr double kPathFloor = 1e-6;
  std::vector<double> m(T + 1);
  m[0] = std::max(pf.init_mean, kPathFloor);
  for (int t = 1; t <= T; ++t) m[t] = std::max(pf.filt_mean[t - 1], kPathFloor);
  return m;
}

}  // namespace

double marginal_loglik(const ObservationPanel& panel, const PlatformParams& platform,
                       const std::vector<ComplementParams>& complements) {
  if (complements.size() != panel.complements.size())
    throw DimensionMismatch("marginal_loglik: parameter/series count mismatch");
  const filter::FilterOutput pf = filter::platform_filter(panel, platform);
  const std::vector<double> m = conditioning_path(pf, panel.T);

  double ll = pf.loglik;
  for (size_t j = 0; j < complements.size(); ++j) {
    const ComplementSeries& s = panel.complements[j];
    const filter::ComplementTransition f{&complements[j], &s, &m};
    const filter::InitPrior init = filter::diffuse_init(s.y);
    const filter::FilterOutput cf =
        filter::ekf_forward(std::span<const double>(s.y), f, complements[j].obs_var,
                            init.mean, init.var, s.launch);
    ll += cf.loglik;
  }
  return ll;
}

DicResult dic_from_deviances(const std::vector<double>& deviances,
                             double deviance_at_mean) {
  if (deviances.empty()) throw InsufficientDraws("dic_from_deviances: no deviances");
  for (double d : deviances)
    if (!std::isfinite(d)) throw NonFiniteDeviance("dic_from_deviances: non-finite deviance");
  if (!std::isfinite(deviance_at_mean))
    throw NonFiniteDeviance("dic_from_deviances: non-finite deviance at the mean");
  DicResult r;
  r.n_draws = static_cast<int>(deviances.size());
  r.dbar = std::accumulate(deviances.begin(), deviances.end(), 0.0) / r.n_draws;
  r.dhat = deviance_at_mean;
  r.p_d = r.dbar - r.dhat;
  r.dic = r.dhat + 2.0 * r.p_d;
  return r;
}

std::pair<PlatformParams, std::vector<ComplementParams>> posterior_mean_params(
    const sampler::DrawArchive& archive) {
  if (archive.draws.empty()) throw InsufficientDraws("posterior_mean_params: empty archive");
  const size_t n = archive.draws.size();
  const sampler::Draw& first = archive.draws.front();

  PlatformParams platform = first.platform;
  platform.p0 = platform.q = platform.M0 = platform.kappa = 0.0;
  platform.obs_var = platform.state_var = 0.0;
  platform.beta.setZero();
  platform.rho.setZero();
  std::vector<ComplementParams> complements(first.complements.size());
  std::vector<Eigen::VectorXd> theta_sum(first.complements.size(),
                                         Eigen::VectorXd::Zero(kThetaDim));
  std::vector<double> obs_sum(first.complements.size(), 0.0);
  std::vector<double> state_sum(first.complements.size(), 0.0);
  std::vector<Eigen::Vector3d> int_sum(first.complements.size(), Eigen::Vector3d::Zero());

  for (const sampler::Draw& d : archive.draws) {
    platform.p0 += d.platform.p0;
    platform.q += d.platform.q;
    platform.M0 += d.platform.M0;
    platform.kappa += d.platform.kappa;
    platform.obs_var += d.platform.obs_var;
    platform.state_var += d.platform.state_var;
    platform.beta += d.platform.beta;
    platform.rho += d.platform.rho;
    for (size_t j = 0; j < complements.size(); ++j) {
      theta_sum[j] += theta_vector(d.complements[j]);
      obs_sum[j] += d.complements[j].obs_var;
      state_sum[j] += d.complements[j].state_var;
      int_sum[j] += Eigen::Vector3d(d.complements[j].p_int, d.complements[j].q_int_rtv_ol,
                                    d.complements[j].q_int_rtv_stavg);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  platform.p0 *= inv;
  platform.q *= inv;
  platform.M0 *= inv;
  platform.kappa *= inv;
  platform.obs_var *= inv;
  platform.state_var *= inv;
  platform.beta *= inv;
  platform.rho *= inv;
  for (size_t j = 0; j < complements.size(); ++j) {
    apply_theta(complements[j], theta_sum[j] * inv);
    complements[j].obs_var = obs_sum[j] * inv;
    complements[j].state_var = state_sum[j] * inv;
    complements[j].p_int = int_sum[j][0] * inv;
    complements[j].q_int_rtv_ol = int_sum[j][1] * inv;
    complements[j].q_int_rtv_stavg = int_sum[j][2] * inv;
  }
  return {platform, complements};
}

DicResult dic(const ObservationPanel& panel, const sampler::DrawArchive& archive) {
  if (archive.draws.empty()) throw InsufficientDraws("dic: empty archive");
  std::vector<double> deviances;
  deviances.reserve(archive.draws.size());
  for (const sampler::Draw& d : archive.draws)
    deviances.push_back(-2.0 * marginal_loglik(panel, d.platform, d.complements));
  const auto [platform, complements] = posterior_mean_params(archive);
  const double dhat = -2.0 * marginal_loglik(panel, platform, complements);
  return dic_from_deviances(deviances, dhat);
}

namespace {

void finish_series(SeriesForecast& s) {
  double mad = 0.0, mse = 0.0;
  const size_t n = s.pred.size();
  for (size_t i = 0; i < n; ++i) {
    const double e = s.actual[i] - s.pred[i];
    mad += std::abs(e);
    mse += e * e;
  }
  s.mad = (n > 0) ? mad / n : 0.0;
  s.mse = (n > 0) ? mse / n : 0.0;
}

void pool(ForecastResult& r) {
  double mad = 0.0, mse = 0.0;
  long n = 0;
  auto add = [&](const SeriesForecast& s) {
    for (size_t i = 0; i < s.pred.size(); ++i) {
      const double e = s.actual[i] - s.pred[i];
      mad += std::abs(e);
      mse += e * e;
      ++n;
    }
  };
  add(r.platform);
  for (const auto& s : r.complements) add(s);
  r.pooled_mad = (n > 0) ? mad / n : 0.0;
  r.pooled_mse = (n > 0) ? mse / n : 0.0;
  r.n_scored = n;
}

// Scored day set shared by model and baseline: an index is scored when the
// observation is present and at least one earlier observation exists.
template <class Pred, class Sd>
SeriesForecast score_series(const std::string& id, std::span<const double> y, int t0,
                            Pred pred_at, Sd sd_at) {
  SeriesForecast out;
  out.id = id;
  bool seen = false;
  for (size_t k = 0; k < y.size(); ++k) {
    if (seen && !is_missing(y[k])) {
      out.days.push_back(t0 + static_cast<int>(k));
      out.pred.push_back(pred_at(k));
      out.pred_sd.push_back(sd_at(k));
      out.actual.push_back(y[k]);
    }
    if (!is_missing(y[k])) seen = true;
  }
  finish_series(out);
  return out;
}

SeriesForecast rw_series(const std::string& id, std::span<const double> y, int t0) {
  double last = 0.0;
  std::vector<double> carry(y.size(), kMissing);
  bool seen = false;
  for (size_t k = 0; k < y.size(); ++k) {
    if (seen) carry[k] = last;
    if (!is_missing(y[k])) {
      last = y[k];
      seen = true;
    }
  }
  return score_series(id, y, t0, [&](size_t k) { return carry[k]; },
                      [](size_t) { return 0.0; });
}

}  // namespace

ForecastResult one_step_forecast(const ObservationPanel& panel,
                                 const PlatformParams& platform,
                                 const std::vector<ComplementParams>& complements) {
  if (complements.size() != panel.complements.size())
    throw DimensionMismatch("one_step_forecast: parameter/series count mismatch");
  ForecastResult r;

  const filter::FilterOutput pf = filter::platform_filter(panel, platform);
  r.platform = score_series(
      "platform", panel.y_platform, 1, [&](size_t k) { return pf.pred_mean[k]; },
      [&](size_t k) { return std::sqrt(pf.obs_pred_var[k]); });

  const std::vector<double> m = conditioning_path(pf, panel.T);

  for (size_t j = 0; j < complements.size(); ++j) {
    const ComplementSeries& s = panel.complements[j];
    const filter::ComplementTransition f{&complements[j], &s, &m};
    const filter::InitPrior init = filter::diffuse_init(s.y);
    const filter::FilterOutput cf =
        filter::ekf_forward(std::span<const double>(s.y), f, complements[j].obs_var,
                            init.mean, init.var, s.launch);
    r.complements.push_back(score_series(
        s.id, s.y, s.launch, [&](size_t k) { return cf.pred_mean[k]; },
        [&](size_t k) { return std::sqrt(cf.obs_pred_var[k]); }));
  }
  pool(r);
  return r;
}

ForecastResult random_walk_forecast(const ObservationPanel& panel) {
  ForecastResult r;
  r.platform = rw_series("platform", panel.y_platform, 1);
  for (const ComplementSeries& s : panel.complements)
    r.complements.push_back(rw_series(s.id, s.y, s.launch));
  pool(r);
  return r;
}

std::vector<std::string> variant_names() {
  return {"proposed",           "no_churn",          "no_version_carryover",
          "no_amo",             "interactions",      "unexplained_internal",
          "unexplained_external", "unexplained_churn", "no_addon_effect",
          "unexplained_relevance"};
}

sampler::VariantConfig build_variant(const std::string& name) {
  sampler::VariantConfig v;
  v.name = name;
  if (name == "proposed") {
    // defaults
  } else if (name == "no_churn") {
    v.churn_on = false;
    v.explain_churn = false;
  } else if (name == "no_version_carryover") {
    v.version_carryover_on = false;
    v.release_decay_override = 1e-6;
  } else if (name == "no_amo") {
    v.amo_on = false;
  } else if (name == "interactions") {
    v.interactions_on = true;
  } else if (name == "unexplained_internal") {
    v.explain_internal_force = false;
  } else if (name == "unexplained_external") {
    v.explain_external_force = false;
  } else if (name == "unexplained_churn") {
    v.explain_churn = false;
  } else if (name == "no_addon_effect") {
    v.addon_effect_on_platform_on = false;
  } else if (name == "unexplained_relevance") {
    v.explain_relevance = false;
  } else {
    throw UnknownVariant("build_variant: unknown variant '" + name + "'");
  }
  return v;
}

double split_rhat(const std::vector<double>& series) {
  const size_t n = series.size();
  if (n < 4) throw InsufficientDraws("split_rhat: need at least 4 draws");
  const size_t half = n / 2;
  const std::vector<std::vector<double>> chains = {
      {series.begin(), series.begin() + half},
      {series.begin() + static_cast<long>(n - half), series.end()}};
  const double m = 2.0;
  const double len = static_cast<double>(half);

  double grand = 0.0;
  std::vector<double> means(2), vars(2);
  for (int c = 0; c < 2; ++c) {
    means[c] = std::accumulate(chains[c].begin(), chains[c].end(), 0.0) / len;
    grand += means[c] / m;
  }
  for (int c = 0; c < 2; ++c) {
    double ss = 0.0;
    for (double x : chains[c]) ss += (x - means[c]) * (x - means[c]);
    vars[c] = ss / (len - 1.0);
  }
  double B = 0.0;
  for (int c = 0; c < 2; ++c) B += (means[c] - grand) * (means[c] - grand);
  B *= len / (m - 1.0);
  const double W = (vars[0] + vars[1]) / m;
  if (W <= 0.0) return 1.0;  // constant chain
  const double var_hat = (len - 1.0) / len * W + B / len;
  return std::sqrt(var_hat / W);
}

double effective_sample_size(const std::vector<double>& series) {
  const size_t n = series.size();
  if (n < 4) throw InsufficientDraws("effective_sample_size: need at least 4 draws");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  var /= n;
  if (var <= 0.0) return static_cast<double>(n);

  // Geyer initial-positive-sequence truncation over lag pairs.
  auto rho = [&](size_t lag) {
    double acc = 0.0;
    for (size_t i = 0; i + lag < n; ++i) acc += (series[i] - mean) * (series[i + lag] - mean);
    return acc / (n * var);
  };
  double tail = 0.0;
  for (size_t lag = 1; lag + 1 < n; lag += 2) {
    const double pair = rho(lag) + rho(lag + 1);
    if (pair <= 0.0) break;
    tail += pair;
  }
  const double ess = static_cast<double>(n) / (1.0 + 2.0 * tail);
  return std::clamp(ess, 1.0, static_cast<double>(n));
}

ConvergenceReport convergence_report(const sampler::DrawArchive& archive) {
  if (archive.draws.size() < 8)
    throw InsufficientDraws("convergence_report: need at least 8 kept draws");
  ConvergenceReport report;
  report.n_draws = static_cast<int>(archive.draws.size());
  report.acceptance = archive.acceptance;
  for (const sampler::SummaryRow& row : sampler::summarize(archive)) {
    const std::vector<double> series = sampler::parameter_series(archive, row.name);
    report.rows.push_back({row.name, split_rhat(series), effective_sample_size(series)});
  }
  return report;
}

}  // namespace platdiff::diagnostics
