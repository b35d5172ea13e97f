#include "platdiff/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "platdiff/filter.hpp"

namespace platdiff::allocator {

void AllocatorProblem::validate() const {
  if (!panel) throw Error("AllocatorProblem: panel is required");
  if (t0 < 1 || t1 > panel->T || t1 < t0)
    throw WindowViolation("AllocatorProblem: horizon outside [1, T]");
  if (n_blocks < 1 || n_blocks > t1 - t0 + 1)
    throw HorizonMismatch("AllocatorProblem: block count incompatible with horizon");
  if (!(budget >= 0.0)) throw Error("AllocatorProblem: budget must be >= 0");
  if (panel->z_dim() < 1)
    throw DimensionMismatch("AllocatorProblem: panel has no effort covariate");
  platform.validate(panel->x_dim(), panel->z_dim());
}

std::vector<int> AllocatorProblem::block_starts() const {
  const int days = t1 - t0 + 1;
  std::vector<int> starts(n_blocks + 1);
  for (int b = 0; b <= n_blocks; ++b)
    starts[b] = t0 + static_cast<int>(static_cast<long>(days) * b / n_blocks);
  return starts;
}

std::vector<double> project_to_budget(std::vector<double> effort, double budget) {
  for (double& e : effort) e = std::max(e, 0.0);
  const double total = std::accumulate(effort.begin(), effort.end(), 0.0);
  if (total > 0.0) {
    for (double& e : effort) e *= budget / total;
  } else if (!effort.empty()) {
    std::fill(effort.begin(), effort.end(), budget / effort.size());
  }
  return effort;
}

namespace {

// Panel copy with the schedule substituted into the effort covariate over the
// problem's horizon (days outside the horizon keep the observed series).
ObservationPanel substituted_panel(const AllocatorProblem& problem,
                                   std::span<const double> effort) {
  ObservationPanel panel = *problem.panel;
  const std::vector<int> starts = problem.block_starts();
  for (int b = 0; b < problem.n_blocks; ++b) {
    const int len = starts[b + 1] - starts[b];
    for (int t = starts[b]; t < starts[b + 1]; ++t) panel.Z[t - 1][0] = effort[b] / len;
  }
  return panel;
}

}  // namespace

double evaluate_schedule(const AllocatorProblem& problem, std::span<const double> effort) {
  problem.validate();
  if (static_cast<int>(effort.size()) != problem.n_blocks)
    throw HorizonMismatch("evaluate_schedule: effort length differs from block count");
  const ObservationPanel panel = substituted_panel(problem, effort);
  const filter::FilterOutput fo = filter::platform_filter(panel, problem.platform);
  double objective = 0.0;
  for (int t = problem.t0; t <= problem.t1; ++t) objective += fo.pred_mean[t - 1];
  return objective;
}

void GAConfig::validate() const {
  if (population < 2) throw Error("GAConfig: population must be >= 2");
  if (generations < 1) throw Error("GAConfig: generations must be >= 1");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw Error("GAConfig: crossover_rate must lie in [0,1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw Error("GAConfig: mutation_rate must lie in [0,1]");
  if (elitism < 0 || elitism >= population)
    throw Error("GAConfig: elitism must lie in [0, population)");
  if (tournament < 1) throw Error("GAConfig: tournament must be >= 1");
}

std::vector<double> observed_schedule(const AllocatorProblem& problem) {
  problem.validate();
  const std::vector<int> starts = problem.block_starts();
  std::vector<double> effort(problem.n_blocks, 0.0);
  for (int b = 0; b < problem.n_blocks; ++b)
    for (int t = starts[b]; t < starts[b + 1]; ++t)
      effort[b] += std::max(problem.panel->Z[t - 1][0], 0.0);
  return project_to_budget(std::move(effort), problem.budget);
}

GAResult optimize(const AllocatorProblem& problem, const GAConfig& config) {
  problem.validate();
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int B = problem.n_blocks;

  GAResult result;
  auto evaluate = [&](const std::vector<double>& e) {
    ++result.evaluations;
    return evaluate_schedule(problem, e);
  };

  std::vector<std::vector<double>> pop;
  pop.reserve(config.population);
  pop.push_back(observed_schedule(problem));
  pop.push_back(project_to_budget(std::vector<double>(B, 1.0), problem.budget));
  while (static_cast<int>(pop.size()) < config.population) {
    std::vector<double> e(B);
    for (double& x : e) x = unit(rng);
    pop.push_back(project_to_budget(std::move(e), problem.budget));
  }
  std::vector<double> fitness(pop.size());
  for (size_t i = 0; i < pop.size(); ++i) fitness[i] = evaluate(pop[i]);

  const double mut_sd =
      config.mutation_sd_frac * (B > 0 ? problem.budget / B : problem.budget);
  auto tournament_pick = [&]() -> const std::vector<double>& {
    size_t best = std::uniform_int_distribution<size_t>(0, pop.size() - 1)(rng);
    for (int k = 1; k < config.tournament; ++k) {
      const size_t c = std::uniform_int_distribution<size_t>(0, pop.size() - 1)(rng);
      if (fitness[c] > fitness[best]) best = c;
    }
    return pop[best];
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return fitness[a] > fitness[b]; });

    std::vector<std::vector<double>> next;
    next.reserve(pop.size());
    for (int e = 0; e < config.elitism; ++e) next.push_back(pop[order[e]]);

    while (static_cast<int>(next.size()) < config.population) {
      std::vector<double> child = tournament_pick();
      if (unit(rng) < config.crossover_rate) {
        const std::vector<double>& other = tournament_pick();
        const double w = unit(rng);
        for (int b = 0; b < B; ++b) child[b] = w * child[b] + (1.0 - w) * other[b];
      }
      for (int b = 0; b < B; ++b)
        if (unit(rng) < config.mutation_rate)
          child[b] += std::normal_distribution<double>(0.0, mut_sd)(rng);
      next.push_back(project_to_budget(std::move(child), problem.budget));
    }
    pop = std::move(next);
    for (size_t i = 0; i < pop.size(); ++i) fitness[i] = evaluate(pop[i]);

    const size_t best = static_cast<size_t>(
        std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    result.best_by_generation.push_back(fitness[best]);
    if (gen == 0 || fitness[best] > result.best.objective) {
      result.best.effort = pop[best];
      result.best.objective = fitness[best];
    }
  }
  result.best.name = "ga_best";
  return result;
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw Error("sample_sd: need at least 2 values");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (v.size() - 1));
}

std::vector<ScheduleComparison> compare_schedules(
    const AllocatorProblem& problem, const std::vector<EffortSchedule>& schedules) {
  problem.validate();
  std::vector<ScheduleComparison> out;
  out.reserve(schedules.size());
  for (const EffortSchedule& s : schedules) {
    if (static_cast<int>(s.effort.size()) != problem.n_blocks)
      throw HorizonMismatch("compare_schedules: schedule '" + s.name +
                            "' has the wrong block count");
    ScheduleComparison row;
    row.name = s.name;
    row.objective = evaluate_schedule(problem, s.effort);
    row.mean_effort =
        std::accumulate(s.effort.begin(), s.effort.end(), 0.0) / s.effort.size();
    row.sd_effort = s.effort.size() > 1 ? sample_sd(s.effort) : 0.0;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace platdiff::allocator
