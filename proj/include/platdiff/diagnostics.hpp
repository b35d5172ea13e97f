#ifndef PLATDIFF_DIAGNOSTICS_HPP
#define PLATDIFF_DIAGNOSTICS_HPP

#include <map>
#include <string>
#include <vector>

#include "platdiff/sampler.hpp"
#include "platdiff/types.hpp"

namespace platdiff::diagnostics {

// Filter-marginalized log-likelihood of the panel at a fixed parameter point.
// The platform block is the EKF marginal likelihood; each complement filter is
// conditioned on the platform filtered-mean path.
double marginal_loglik(const ObservationPanel& panel, const PlatformParams& platform,
                       const std::vector<ComplementParams>& complements);

struct DicResult {
  double dic = 0.0;
  double dbar = 0.0;   // posterior mean deviance
  double dhat = 0.0;   // deviance at the posterior mean
  double p_d = 0.0;    // effective number of parameters
  int n_draws = 0;
};

// DIC = Dhat + 2 pD with pD = Dbar - Dhat, deviance D = -2 log L.
DicResult dic_from_deviances(const std::vector<double>& deviances, double deviance_at_mean);

DicResult dic(const ObservationPanel& panel, const sampler::DrawArchive& archive);

// Posterior-mean parameter point of an archive.
std::pair<PlatformParams, std::vector<ComplementParams>> posterior_mean_params(
    const sampler::DrawArchive& archive);

struct SeriesForecast {
  std::string id;
  std::vector<int> days;        // day index of each scored prediction
  std::vector<double> pred;     // one-step-ahead predicted observation
  std::vector<double> pred_sd;  // one-step-ahead predictive sd (0 for baselines)
  std::vector<double> actual;
  double mad = 0.0;
  double mse = 0.0;
};

struct ForecastResult {
  SeriesForecast platform;
  std::vector<SeriesForecast> complements;
  double pooled_mad = 0.0;
  double pooled_mse = 0.0;
  long n_scored = 0;
};

// One-step-ahead forecasts at a fixed parameter point. Day t predictions use
// only observations up to t-1. The first day of each series and missing days
// are excluded from scoring so the result is comparable with the random-walk
// baseline below.
ForecastResult one_step_forecast(const ObservationPanel& panel,
                                 const PlatformParams& platform,
                                 const std::vector<ComplementParams>& complements);

// Random-walk baseline: predict each observation by the most recent earlier
// observation of the same series; scored on the same day set as above.
ForecastResult random_walk_forecast(const ObservationPanel& panel);

// Named model variants (published comparison set). Throws UnknownVariant.
sampler::VariantConfig build_variant(const std::string& name);
std::vector<std::string> variant_names();

struct ConvergenceRow {
  std::string name;
  double rhat = 0.0;  // split-chain potential scale reduction
  double ess = 0.0;   // effective sample size
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::map<std::string, double> acceptance;
  int n_draws = 0;
};

// Split-Rhat and autocorrelation-based ESS for every summarized parameter.
// Throws InsufficientDraws when fewer than 8 kept draws are available.
ConvergenceReport convergence_report(const sampler::DrawArchive& archive);

double split_rhat(const std::vector<double>& series);
double effective_sample_size(const std::vector<double>& series);

}  // namespace platdiff::diagnostics

#endif  // PLATDIFF_DIAGNOSTICS_HPP
