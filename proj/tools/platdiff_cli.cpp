#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platdiff/allocator.hpp"
#include "platdiff/archive_io.hpp"
#include "platdiff/config.hpp"
#include "platdiff/diagnostics.hpp"
#include "platdiff/endogeneity.hpp"
#include "platdiff/filter.hpp"
#include "platdiff/manifest.hpp"
#include "platdiff/panel_io.hpp"
#include "platdiff/preprocess.hpp"
#include "platdiff/sampler.hpp"
#include "platdiff/simulator.hpp"

namespace {

namespace fs = std::filesystem;
using namespace platdiff;

constexpr const char* kVersion = "platdiff 1.0.0";

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required = true) {
  cmd->add_option("--config", args.config_path, "key=value configuration file");
  auto* out = cmd->add_option("--out", args.out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", args.seed, "master RNG seed");
  cmd->add_option("--threads", args.threads, "worker threads for parallel sections");
}

io::Config load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return io::Config::from_string("");
  return io::Config::from_file(args.config_path);
}

struct RunContext {
  CommonArgs args;
  io::Config config;
  io::RunManifest manifest;

  void start(const std::string& subcommand) {
    fs::create_directories(args.out_dir);
    manifest.subcommand = subcommand;
    manifest.config_hash = config.hash();
    manifest.seed = args.seed;
    manifest.code_version = kVersion;
    manifest.started_at = io::utc_now_iso();
    if (!args.config_path.empty())
      manifest.input_hashes[args.config_path] = io::fnv1a_file(args.config_path);
  }
  void input(const std::string& path) {
    manifest.input_hashes[path] = io::fnv1a_file(path);
  }
  std::string out(const std::string& name) {
    const std::string path = (fs::path(args.out_dir) / name).string();
    manifest.outputs.push_back(path);
    return path;
  }
  void finish() {
    manifest.finished_at = io::utc_now_iso();
    io::append_manifest(args.out_dir, manifest);
  }
};

std::string fmt(double v) { return io::format_double(v); }

sampler::PriorConfig priors_from_config(const io::Config& cfg) {
  sampler::PriorConfig p;
  p.coef_prior_var = cfg.get_double("priors.coef_var", p.coef_prior_var);
  p.ig_shape = cfg.get_double("priors.ig_shape", p.ig_shape);
  p.ig_scale = cfg.get_double("priors.ig_scale", p.ig_scale);
  p.logit_mean = cfg.get_double("priors.logit_mean", p.logit_mean);
  p.logit_var = cfg.get_double("priors.logit_var", p.logit_var);
  p.eta_prior_var = cfg.get_double("priors.eta_var", p.eta_prior_var);
  p.hier_ig_shape = cfg.get_double("priors.hier_ig_shape", p.hier_ig_shape);
  p.hier_ig_scale = cfg.get_double("priors.hier_ig_scale", p.hier_ig_scale);
  return p;
}

sampler::McmcConfig mcmc_from_config(const io::Config& cfg, std::uint64_t seed,
                                     const std::string& variant) {
  sampler::McmcConfig m;
  m.iterations = cfg.get_int("sampler.iterations", m.iterations);
  m.burnin = cfg.get_int("sampler.burnin", m.burnin);
  m.thin = cfg.get_int("sampler.thin", m.thin);
  m.path_stride = cfg.get_int("sampler.path_stride", m.path_stride);
  m.use_hierarchy = cfg.get_bool("sampler.use_hierarchy", m.use_hierarchy);
  m.seed = seed;
  m.variant = diagnostics::build_variant(variant);
  return m;
}

void write_summary_csv(const std::string& path, const sampler::DrawArchive& archive) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : sampler::summarize(archive))
    rows.push_back({r.name, fmt(r.estimate), fmt(r.sd), fmt(r.q025), fmt(r.q975)});
  io::write_csv(path, {"parameter", "estimate", "sd", "2.5th", "97.5th"}, rows);
}

void write_forecast_csvs(RunContext& ctx, const ObservationPanel& panel,
                         const PlatformParams& platform,
                         const std::vector<ComplementParams>& complements) {
  const diagnostics::ForecastResult ekf =
      diagnostics::one_step_forecast(panel, platform, complements);
  const diagnostics::ForecastResult rw = diagnostics::random_walk_forecast(panel);

  std::vector<std::vector<std::string>> series_rows;
  auto add_series = [&](const diagnostics::SeriesForecast& s) {
    for (size_t i = 0; i < s.pred.size(); ++i)
      series_rows.push_back({s.id, std::to_string(s.days[i]), fmt(s.actual[i]),
                             fmt(s.pred[i]), fmt(s.pred_sd[i])});
  };
  add_series(ekf.platform);
  for (const auto& s : ekf.complements) add_series(s);
  io::write_csv(ctx.out("forecast.csv"),
                {"series", "day", "observed", "predicted", "predictive_sd"}, series_rows);

  std::vector<std::vector<std::string>> metric_rows;
  auto add_metrics = [&](const std::string& model, const diagnostics::ForecastResult& r) {
    metric_rows.push_back({model, "pooled", fmt(r.pooled_mad), fmt(r.pooled_mse)});
    metric_rows.push_back({model, r.platform.id, fmt(r.platform.mad), fmt(r.platform.mse)});
    for (const auto& s : r.complements)
      metric_rows.push_back({model, s.id, fmt(s.mad), fmt(s.mse)});
  };
  add_metrics("ekf", ekf);
  add_metrics("random_walk", rw);
  io::write_csv(ctx.out("metrics.csv"), {"model", "series", "mad", "mse"}, metric_rows);
}

// --- subcommands -----------------------------------------------------------

int run_ingest(RunContext& ctx, const std::string& platform_path,
               const std::vector<std::string>& complement_paths) {
  ctx.start("ingest");
  ctx.input(platform_path);
  const io::PlatformCsv platform = io::read_platform_csv(platform_path);
  std::vector<preprocess::RawComplement> complements;
  for (const auto& p : complement_paths) {
    ctx.input(p);
    complements.push_back(io::read_complement_csv(
        p, platform.start_day, static_cast<int>(platform.raw.users.size())));
  }
  io::build_category_dummies(complements);

  preprocess::PreprocessConfig pcfg;
  pcfg.release_decay = ctx.config.get_double("preprocess.release_decay", pcfg.release_decay);
  pcfg.lag_ol_usage = ctx.config.get_bool("preprocess.lag_ol", pcfg.lag_ol_usage);
  const preprocess::AssembledPanel assembled =
      preprocess::assemble_panel(platform.raw, complements, pcfg);

  io::save_panel(ctx.out("panel.json"), assembled.panel);
  io::save_transforms(ctx.out("transforms.json"), assembled.transforms);
  if (!assembled.ol_warnings.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& w : assembled.ol_warnings)
      rows.push_back({std::to_string(w.day), w.category});
    io::write_csv(ctx.out("warnings.csv"), {"day", "category"}, rows);
  }
  ctx.finish();
  return 0;
}

int run_simulate(RunContext& ctx) {
  ctx.start("simulate");
  const double noise_scale = ctx.config.get_double("simulate.noise_scale", 1.0);
  simulator::SimulationConfig cfg = simulator::default_truth(noise_scale);
  cfg.T = ctx.config.get_int("simulate.T", cfg.T);
  cfg.J = ctx.config.get_int("simulate.J", cfg.J);
  cfg.m0_frac = ctx.config.get_double("simulate.m0_frac", cfg.m0_frac);
  if (cfg.J != static_cast<int>(cfg.launches.size()) || cfg.T != 500) {
    cfg.launches.resize(cfg.J);
    for (int j = 0; j < cfg.J; ++j)
      cfg.launches[j] = 1 + j * std::max(cfg.T - 80, 1) / std::max(cfg.J, 1);
    cfg.complements.resize(cfg.J, cfg.complements.empty() ? ComplementParams{}
                                                          : cfg.complements.front());
  }
  cfg.seed = ctx.args.seed;
  const simulator::SimulationResult result = simulator::simulate_panel(cfg);
  io::save_panel(ctx.out("panel.json"), result.panel);
  io::save_latent_paths(ctx.out("truth.json"), result.truth);
  ctx.finish();
  return 0;
}

int run_fit(RunContext& ctx, const std::string& panel_path, const std::string& variant) {
  ctx.start("fit");
  ctx.input(panel_path);
  const ObservationPanel panel = io::load_panel(panel_path);
  const sampler::PriorConfig priors = priors_from_config(ctx.config);
  sampler::McmcConfig mcmc = mcmc_from_config(ctx.config, ctx.args.seed, variant);
  sampler::DrawArchive archive = sampler::run_chain(panel, priors, mcmc);
  archive.config_hash = ctx.config.hash();
  io::save_archive(ctx.out("archive.jsonl"), archive);
  write_summary_csv(ctx.out("summary.csv"), archive);
  ctx.finish();
  return 0;
}

int run_forecast(RunContext& ctx, const std::string& panel_path,
                 const std::string& archive_path) {
  ctx.start("forecast");
  ctx.input(panel_path);
  ctx.input(archive_path);
  const ObservationPanel panel = io::load_panel(panel_path);
  const sampler::DrawArchive archive = io::load_archive(archive_path);
  const auto [platform, complements] = diagnostics::posterior_mean_params(archive);
  write_forecast_csvs(ctx, panel, platform, complements);
  ctx.finish();
  return 0;
}

int run_compare(RunContext& ctx, const std::string& panel_path,
                const std::string& variants_arg) {
  ctx.start("compare");
  ctx.input(panel_path);
  const ObservationPanel panel = io::load_panel(panel_path);
  std::vector<std::string> variants;
  std::string token;
  std::istringstream in(variants_arg);
  while (std::getline(in, token, ','))
    if (!token.empty()) variants.push_back(token);
  if (variants.empty()) throw Error("compare: --variants list is empty");

  const sampler::PriorConfig priors = priors_from_config(ctx.config);
  std::vector<std::vector<std::string>> rows;
  for (const std::string& name : variants) {
    const sampler::McmcConfig mcmc = mcmc_from_config(ctx.config, ctx.args.seed, name);
    const sampler::DrawArchive archive = sampler::run_chain(panel, priors, mcmc);
    const diagnostics::DicResult d = diagnostics::dic(panel, archive);
    rows.push_back({name, fmt(d.dic), fmt(d.p_d), fmt(-0.5 * d.dhat)});
  }
  io::write_csv(ctx.out("compare.csv"), {"variant", "dic", "p_d", "ll_at_mean"}, rows);
  ctx.finish();
  return 0;
}

std::vector<allocator::EffortSchedule> read_schedules_csv(const std::string& path,
                                                          int n_blocks) {
  std::ifstream in(path);
  if (!in) throw Error("optimize: cannot open schedules file " + path);
  std::map<std::string, std::vector<std::pair<int, double>>> by_name;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::string name, block, effort;
    std::getline(row, name, ',');
    std::getline(row, block, ',');
    std::getline(row, effort, ',');
    by_name[name].push_back({std::stoi(block), std::stod(effort)});
  }
  std::vector<allocator::EffortSchedule> out;
  for (auto& [name, cells] : by_name) {
    std::sort(cells.begin(), cells.end());
    allocator::EffortSchedule s;
    s.name = name;
    for (const auto& [block, effort] : cells) s.effort.push_back(effort);
    if (static_cast<int>(s.effort.size()) != n_blocks)
      throw HorizonMismatch("optimize: schedule '" + name + "' has " +
                            std::to_string(s.effort.size()) + " blocks, expected " +
                            std::to_string(n_blocks));
    out.push_back(std::move(s));
  }
  return out;
}

int run_optimize(RunContext& ctx, const std::string& panel_path,
                 const std::string& archive_path, const std::string& schedules_path) {
  ctx.start("optimize");
  ctx.input(panel_path);
  ctx.input(archive_path);
  const ObservationPanel panel = io::load_panel(panel_path);
  const sampler::DrawArchive archive = io::load_archive(archive_path);
  const auto [platform, complements] = diagnostics::posterior_mean_params(archive);

  allocator::AllocatorProblem problem;
  problem.panel = &panel;
  problem.platform = platform;
  problem.t0 = ctx.config.get_int("optimize.t0", 1);
  problem.t1 = ctx.config.get_int("optimize.t1", panel.T);
  problem.n_blocks = ctx.config.get_int("optimize.blocks", 10);
  problem.budget = ctx.config.get_double("optimize.budget", 0.0);
  if (problem.budget <= 0.0) {
    // Default: the observed total effort over the horizon.
    for (int t = problem.t0; t <= problem.t1; ++t)
      problem.budget += std::max(panel.Z[t - 1][0], 0.0);
    if (problem.budget <= 0.0) problem.budget = 1.0;
  }

  std::vector<allocator::EffortSchedule> schedules;
  {
    allocator::EffortSchedule observed;
    observed.name = "observed";
    observed.effort = allocator::observed_schedule(problem);
    observed.objective = allocator::evaluate_schedule(problem, observed.effort);
    schedules.push_back(std::move(observed));
    allocator::EffortSchedule uniform;
    uniform.name = "uniform";
    uniform.effort = allocator::project_to_budget(
        std::vector<double>(problem.n_blocks, 1.0), problem.budget);
    uniform.objective = allocator::evaluate_schedule(problem, uniform.effort);
    schedules.push_back(std::move(uniform));
  }

  if (schedules_path.empty()) {
    allocator::GAConfig ga;
    ga.population = ctx.config.get_int("optimize.population", ga.population);
    ga.generations = ctx.config.get_int("optimize.generations", ga.generations);
    ga.crossover_rate = ctx.config.get_double("optimize.crossover", ga.crossover_rate);
    ga.mutation_rate = ctx.config.get_double("optimize.mutation", ga.mutation_rate);
    ga.elitism = ctx.config.get_int("optimize.elitism", ga.elitism);
    ga.seed = ctx.args.seed;
    const allocator::GAResult result = allocator::optimize(problem, ga);
    schedules.push_back(result.best);

    std::vector<std::vector<std::string>> rows;
    const std::vector<int> starts = problem.block_starts();
    for (int b = 0; b < problem.n_blocks; ++b)
      rows.push_back({std::to_string(b), std::to_string(starts[b]),
                      fmt(result.best.effort[b])});
    io::write_csv(ctx.out("schedule.csv"), {"block", "start_day", "effort"}, rows);

    std::vector<std::vector<std::string>> gens;
    for (size_t g = 0; g < result.best_by_generation.size(); ++g)
      gens.push_back({std::to_string(g), fmt(result.best_by_generation[g])});
    io::write_csv(ctx.out("generations.csv"), {"generation", "best_objective"}, gens);
  } else {
    ctx.input(schedules_path);
    for (auto& s : read_schedules_csv(schedules_path, problem.n_blocks)) {
      s.effort = allocator::project_to_budget(std::move(s.effort), problem.budget);
      s.objective = allocator::evaluate_schedule(problem, s.effort);
      schedules.push_back(std::move(s));
    }
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& c : allocator::compare_schedules(problem, schedules))
    rows.push_back({c.name, fmt(c.objective), fmt(c.mean_effort), fmt(c.sd_effort)});
  io::write_csv(ctx.out("comparison.csv"),
                {"schedule", "objective", "mean_effort", "sd_effort"}, rows);

  // Wide per-period table (one effort column per schedule).
  std::vector<std::string> header = {"period"};
  for (const auto& s : schedules) header.push_back(s.name);
  std::vector<std::vector<std::string>> periods;
  for (int b = 0; b < problem.n_blocks; ++b) {
    std::vector<std::string> row = {std::to_string(b)};
    for (const auto& s : schedules) row.push_back(fmt(s.effort[b]));
    periods.push_back(std::move(row));
  }
  io::write_csv(ctx.out("schedules_by_period.csv"), header, periods);
  ctx.finish();
  return 0;
}

int run_endogeneity(RunContext& ctx, const std::string& panel_path,
                    const std::string& archive_path) {
  ctx.start("endogeneity");
  ctx.input(panel_path);
  const ObservationPanel panel = io::load_panel(panel_path);

  endogeneity::LIVConfig cfg;
  cfg.model = ctx.config.get_int("endogeneity.model", 1);
  cfg.p0 = ctx.config.get_double("endogeneity.p0", 1e-3);
  cfg.p1 = ctx.config.get_double("endogeneity.p1", 1e-4);
  cfg.p2 = ctx.config.get_double("endogeneity.p2", 0.0);
  cfg.q = ctx.config.get_double("endogeneity.q", 0.0);
  cfg.M0 = ctx.config.get_double("endogeneity.M0", 1.0);
  cfg.kappa = ctx.config.get_double("endogeneity.kappa", 0.0);
  cfg.iterations = ctx.config.get_int("endogeneity.iterations", cfg.iterations);
  cfg.burnin = ctx.config.get_int("endogeneity.burnin", cfg.burnin);
  cfg.thin = ctx.config.get_int("endogeneity.thin", cfg.thin);
  cfg.seed = ctx.args.seed;

  endogeneity::LIVSlice slice;
  slice.y = panel.y_platform;
  slice.a = panel.A;
  slice.z1.resize(panel.T);
  for (int t = 0; t < panel.T; ++t) slice.z1[t] = panel.Z[t][0];
  if (panel.z_dim() > 1) {
    slice.z2.resize(panel.T);
    for (int t = 0; t < panel.T; ++t) slice.z2[t] = panel.Z[t][1];
  }
  const endogeneity::LIVResult result = endogeneity::liv_fit(slice, cfg);

  std::vector<std::vector<std::string>> rows;
  auto add_row = [&](const std::string& stat, const endogeneity::IntervalSummary& s) {
    rows.push_back({"model" + std::to_string(cfg.model), stat, fmt(s.mean), fmt(s.sd),
                    fmt(s.q025), fmt(s.q975), s.significant ? "*" : ""});
  };
  add_row("corr", result.corr);
  add_row("sigma21", result.sigma21);
  io::write_csv(ctx.out("table1a.csv"),
                {"model", "statistic", "mean", "sd", "2.5th", "97.5th", "significant"},
                rows);

  if (!archive_path.empty()) {
    ctx.input(archive_path);
    const sampler::DrawArchive archive = io::load_archive(archive_path);
    const auto [platform, complements] = diagnostics::posterior_mean_params(archive);
    const filter::FilterOutput pf = filter::platform_filter(panel, platform);
    std::vector<double> m(panel.T + 1);
    m[0] = pf.init_mean;
    for (int t = 1; t <= panel.T; ++t) m[t] = pf.filt_mean[t - 1];

    std::vector<std::vector<std::string>> rows1b;
    for (size_t j = 0; j < panel.complements.size(); ++j) {
      const ComplementSeries& s = panel.complements[j];
      endogeneity::LIVReleaseSlice rslice;
      rslice.id = s.id;
      rslice.y = s.y;
      rslice.pv = s.pv;
      rslice.av = s.av;
      rslice.m.assign(m.begin() + (s.launch - 1), m.begin() + s.end);
      rslice.params = complements[j];
      const endogeneity::LIVReleaseResult r = endogeneity::liv_fit_releases(rslice, cfg);
      rows1b.push_back({r.id, fmt(r.corr_pv.q025), fmt(r.corr_pv.q975),
                        fmt(r.corr_av.q025), fmt(r.corr_av.q975),
                        fmt(r.sigma_w_pv.q025), fmt(r.sigma_w_pv.q975),
                        fmt(r.sigma_w_av.q025), fmt(r.sigma_w_av.q975),
                        r.uninformative ? "uninformative" : ""});
    }
    io::write_csv(ctx.out("table1b.csv"),
                  {"id", "corr_pv_2.5th", "corr_pv_97.5th", "corr_av_2.5th",
                   "corr_av_97.5th", "sigma_w_pv_2.5th", "sigma_w_pv_97.5th",
                   "sigma_w_av_2.5th", "sigma_w_av_97.5th", "flag"},
                  rows1b);
  }
  ctx.finish();
  return 0;
}

int run_report(RunContext& ctx, const std::string& run_dir) {
  ctx.start("report");
  const std::string archive_path = (fs::path(run_dir) / "archive.jsonl").string();
  if (!fs::exists(archive_path))
    throw MissingArchive("report: no archive.jsonl under " + run_dir);
  ctx.input(archive_path);
  const sampler::DrawArchive archive = io::load_archive(archive_path);
  write_summary_csv(ctx.out("summary.csv"), archive);

  const diagnostics::ConvergenceReport conv = diagnostics::convergence_report(archive);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : conv.rows)
    rows.push_back({r.name, fmt(r.rhat), fmt(r.ess)});
  io::write_csv(ctx.out("convergence.csv"), {"parameter", "rhat", "ess"}, rows);

  std::vector<std::vector<std::string>> acc;
  for (const auto& [name, rate] : conv.acceptance) acc.push_back({name, fmt(rate)});
  io::write_csv(ctx.out("acceptance.csv"), {"block", "rate"}, acc);
  ctx.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"platdiff: platform/complement diffusion model toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonArgs ingest_args, sim_args, fit_args, fc_args, cmp_args, opt_args, endo_args,
      rep_args;
  std::string platform_csv, panel_path, archive_path, variant = "proposed";
  std::vector<std::string> complement_csvs;
  std::string variants_arg = "proposed", schedules_path, run_dir;

  auto* ingest = app.add_subcommand("ingest", "assemble a panel from raw CSV files");
  add_common(ingest, ingest_args);
  ingest->add_option("--platform", platform_csv, "platform CSV file")->required();
  ingest->add_option("--complement", complement_csvs, "complement CSV file (repeatable)")
      ->required();

  auto* simulate = app.add_subcommand("simulate", "draw a synthetic panel");
  add_common(simulate, sim_args);

  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler on a panel");
  add_common(fit, fit_args);
  fit->add_option("--panel", panel_path, "panel JSON file")->required();
  fit->add_option("--variant", variant, "model variant name");

  auto* forecast = app.add_subcommand("forecast", "one-step-ahead forecasts");
  add_common(forecast, fc_args);
  forecast->add_option("--panel", panel_path, "panel JSON file")->required();
  forecast->add_option("--archive", archive_path, "draw archive")->required();

  auto* compare = app.add_subcommand("compare", "fit variants and compare by DIC");
  add_common(compare, cmp_args);
  compare->add_option("--panel", panel_path, "panel JSON file")->required();
  compare->add_option("--variants", variants_arg, "comma-separated variant names");

  auto* optimize = app.add_subcommand("optimize", "budget-constrained effort allocation");
  add_common(optimize, opt_args);
  optimize->add_option("--panel", panel_path, "panel JSON file")->required();
  optimize->add_option("--archive", archive_path, "draw archive")->required();
  optimize->add_option("--schedules", schedules_path,
                       "CSV of schedules to compare instead of running the GA");

  auto* endo = app.add_subcommand("endogeneity", "latent-instrumental-variable test");
  add_common(endo, endo_args);
  endo->add_option("--panel", panel_path, "panel JSON file")->required();
  endo->add_option("--archive", archive_path, "draw archive for the release tests");

  auto* report = app.add_subcommand("report", "summaries from a finished run");
  add_common(report, rep_args);
  report->add_option("--run", run_dir, "run directory with archive.jsonl")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto make_ctx = [&](CommonArgs& args) {
      RunContext ctx;
      ctx.args = args;
      ctx.config = load_config(args);
      return ctx;
    };
    if (ingest->parsed()) {
      RunContext ctx = make_ctx(ingest_args);
      return run_ingest(ctx, platform_csv, complement_csvs);
    }
    if (simulate->parsed()) {
      RunContext ctx = make_ctx(sim_args);
      return run_simulate(ctx);
    }
    if (fit->parsed()) {
      RunContext ctx = make_ctx(fit_args);
      return run_fit(ctx, panel_path, variant);
    }
    if (forecast->parsed()) {
      RunContext ctx = make_ctx(fc_args);
      return run_forecast(ctx, panel_path, archive_path);
    }
    if (compare->parsed()) {
      RunContext ctx = make_ctx(cmp_args);
      return run_compare(ctx, panel_path, variants_arg);
    }
    if (optimize->parsed()) {
      RunContext ctx = make_ctx(opt_args);
      return run_optimize(ctx, panel_path, archive_path, schedules_path);
    }
    if (endo->parsed()) {
      RunContext ctx = make_ctx(endo_args);
      return run_endogeneity(ctx, panel_path, archive_path);
    }
    if (report->parsed()) {
      RunContext ctx = make_ctx(rep_args);
      return run_report(ctx, run_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
