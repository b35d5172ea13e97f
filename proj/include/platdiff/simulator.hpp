#ifndef PLATDIFF_SIMULATOR_HPP
#define PLATDIFF_SIMULATOR_HPP

#include <cstdint>
#include <optional>

#include "platdiff/types.hpp"

namespace platdiff::simulator {

// Stochastic recipes for the exogenous covariates of a synthetic panel.
struct CovariateRecipe {
  double x_ar = 0.95;            // AR(1) coefficient of competitor usage
  double x_sd = 0.3;             // innovation sd before demeaning
  double z_ar = 0.9;             // AR(1) coefficient of governance series
  double z_sd = 0.3;
  double release_prob = 0.02;    // daily release probability
  double release_decay = 0.89;
  double rating_step_sd = 0.05;  // bounded random-walk increment sd
};

struct SimulationConfig {
  int T = 500;
  int J = 8;
  std::vector<int> launches;  // day of first observation per complement
  PlatformParams platform;
  std::vector<ComplementParams> complements;
  // When present, complement parameter vectors are drawn from the hierarchy
  // instead of taken from `complements`.
  std::optional<HierarchyDesign> hierarchy;
  double m0_frac = 0.05;  // m_0 = m0_frac * M_1
  double n0 = 0.0;        // complement state at launch-1
  CovariateRecipe recipe;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimulationResult {
  ObservationPanel panel;
  LatentPaths truth;
  SimulationConfig config;  // echo, including the seed
  long rejected_draws = 0;
  long total_draws = 0;
};

// Draws covariates, latent paths and observations from the generative model.
// Negative latent draws are rejected and redrawn; throws ExplosiveTrajectory
// when more than half of all draws are rejected.
SimulationResult simulate_panel(const SimulationConfig& config);

// Ready-made truth at the published posterior means (T=500, J=8). All four
// noise variances are multiplied by `noise_scale`; the published magnitudes
// (scale 1) imply state noise several times the market potential, which is
// usable for stress tests but not for recovery studies.
SimulationConfig default_truth(double noise_scale = 1.0);

}  // namespace platdiff::simulator

#endif  // PLATDIFF_SIMULATOR_HPP
