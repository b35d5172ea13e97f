#ifndef PLATDIFF_ALLOCATOR_HPP
#define PLATDIFF_ALLOCATOR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "platdiff/types.hpp"

namespace platdiff::allocator {

// Counterfactual planning problem: reallocate a fixed budget of developer
// effort (the first governance covariate) across contiguous day blocks of the
// window [t0, t1] and propagate the platform model forward.
struct AllocatorProblem {
  const ObservationPanel* panel = nullptr;
  PlatformParams platform;
  int t0 = 1;
  int t1 = 1;
  int n_blocks = 1;
  double budget = 0.0;

  void validate() const;
  std::vector<int> block_starts() const;  // n_blocks+1 boundaries, day indices
};

struct EffortSchedule {
  std::string name;
  std::vector<double> effort;  // total effort per block, sums to budget
  double objective = 0.0;
};

// Projects a candidate onto the budget simplex: negatives clamp to zero, then
// the vector is rescaled to sum to the budget (uniform when all-zero).
std::vector<double> project_to_budget(std::vector<double> effort, double budget);

// Objective: sum over the horizon of the EKF one-step-ahead predicted
// observation E[y_t | D_{t-1}] after substituting the schedule into the
// effort covariate. Days with missing observations are prediction-only, so a
// fully unobserved horizon reduces to deterministic forward propagation.
// Throws HorizonMismatch on size mismatch.
double evaluate_schedule(const AllocatorProblem& problem, std::span<const double> effort);

struct GAConfig {
  int population = 100;
  int generations = 300;
  double crossover_rate = 0.8;
  double mutation_rate = 0.05;    // per-gene probability
  double mutation_sd_frac = 0.1;  // sd as a fraction of budget/n_blocks
  int elitism = 2;
  int tournament = 3;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GAResult {
  EffortSchedule best;
  std::vector<double> best_by_generation;  // nondecreasing under elitism
  long evaluations = 0;
};

// Genetic search over budget-feasible schedules. The initial population is
// seeded with the observed schedule and the uniform schedule.
GAResult optimize(const AllocatorProblem& problem, const GAConfig& config);

// Observed effort aggregated into the problem's blocks, projected onto the
// budget simplex.
std::vector<double> observed_schedule(const AllocatorProblem& problem);

// Per-schedule dispersion report over effort blocks (the published comparison
// contrasts the sd of actual vs model-based contributions per period).
struct ScheduleComparison {
  std::string name;
  double objective = 0.0;
  double mean_effort = 0.0;  // mean per-block effort
  double sd_effort = 0.0;    // sample sd (n-1) of per-block effort
};

std::vector<ScheduleComparison> compare_schedules(
    const AllocatorProblem& problem, const std::vector<EffortSchedule>& schedules);

// Sample standard deviation with the n-1 denominator.
double sample_sd(std::span<const double> v);

}  // namespace platdiff::allocator

#endif  // PLATDIFF_ALLOCATOR_HPP
