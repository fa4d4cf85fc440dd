// Command-line front end: run / sweep / diag / gen-env subcommands around the
// experiment harness. Exit codes: 0 success, 2 config problem, 3 I/O problem.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pomd/env.hpp"
#include "pomd/harness.hpp"
#include "pomd/version.hpp"

namespace {

pomd::ExperimentConfig load_config(const std::string& path) {
  const nlohmann::json doc = pomd::unwrap_manifest(pomd::load_json_file(path));
  return pomd::ExperimentConfig::from_json(doc);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(dir), ec);
  if (ec) throw pomd::IoError("cannot create output directory " + dir);
}

void print_summary(const pomd::ExperimentConfig& config,
                   const pomd::ExperimentSummary& summary) {
  std::printf("model: S=%d A=%d H=%d  episodes=%lld  seeds=%zu\n",
              summary.model.num_states, summary.model.num_actions,
              summary.model.horizon,
              static_cast<long long>(config.num_episodes), summary.seeds.size());
  std::printf("final mean cumulative regret: %.6f (std %.6f)\n",
              summary.mean_cumulative.back(), summary.std_cumulative.back());
  std::printf("wrote %zu files under %s in %.2fs\n", summary.files_written.size(),
              config.out_dir.c_str(), summary.elapsed_seconds);
}

int cmd_run(const std::string& config_path) {
  const pomd::ExperimentConfig config = load_config(config_path);
  const pomd::ExperimentSummary summary = pomd::run_experiment(config);
  print_summary(config, summary);
  return 0;
}

int cmd_sweep(const std::string& config_path, std::vector<std::int64_t> k_grid) {
  if (k_grid.empty()) throw pomd::ConfigError("--k-grid needs at least one K");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1) throw pomd::ConfigError("--k-grid entries must be >= 1");
    if (i > 0 && k_grid[i] <= k_grid[i - 1])
      throw pomd::ConfigError("--k-grid must be strictly increasing");
  }

  const pomd::ExperimentConfig base = load_config(config_path);
  const std::filesystem::path base_dir(base.out_dir);

  std::vector<double> k_points, final_regret;
  for (const std::int64_t k : k_grid) {
    pomd::ExperimentConfig config = base;
    config.num_episodes = k;
    config.out_dir = (base_dir / ("K_" + std::to_string(k))).string();
    const pomd::ExperimentSummary summary = pomd::run_experiment(config);
    k_points.push_back(static_cast<double>(k));
    final_regret.push_back(summary.mean_cumulative.back());
    std::printf("K=%lld  mean cumulative regret %.6f\n", static_cast<long long>(k),
                final_regret.back());
  }

  const pomd::LineFit fit = pomd::fit_loglog_slope(k_points, final_regret);
  nlohmann::json report{{"k_grid", k_grid},
                        {"mean_cum_regret", final_regret},
                        {"slope", fit.slope},
                        {"intercept", fit.intercept}};
  ensure_directory(base.out_dir);
  const std::string report_path = (base_dir / "slope_report.json").string();
  pomd::write_text_file(report_path, report.dump(2) + "\n");
  std::printf("slope %.4f (intercept %.4f) -> %s\n", fit.slope, fit.intercept,
              report_path.c_str());
  return 0;
}

int cmd_diag(const std::string& config_path) {
  pomd::ExperimentConfig config = load_config(config_path);
  config.diag_good_event = true;
  config.diag_snapshots = true;
  const pomd::ExperimentSummary summary = pomd::run_experiment(config);

  std::int64_t total_flagged = 0, total_optimism = 0;
  nlohmann::json seeds = nlohmann::json::array();
  for (const pomd::SeedOutcome& outcome : summary.seeds) {
    total_flagged += outcome.good_event_episodes;
    total_optimism += outcome.optimism_violations;
    seeds.push_back({{"seed", outcome.seed},
                     {"good_event_episodes", outcome.good_event_episodes},
                     {"optimism_violations", outcome.optimism_violations},
                     {"cost_flag_episodes", outcome.cost_flag_episodes},
                     {"kernel_flag_episodes", outcome.kernel_flag_episodes},
                     {"count_flag_episodes", outcome.count_flag_episodes},
                     {"optimism_episodes", outcome.optimism_episodes}});
  }
  nlohmann::json report{{"num_seeds", summary.seeds.size()},
                        {"num_episodes", config.num_episodes},
                        {"total_good_event_episodes", total_flagged},
                        {"total_optimism_violations", total_optimism},
                        {"seeds", seeds}};
  const std::string report_path =
      (std::filesystem::path(config.out_dir) / "violations.json").string();
  pomd::write_text_file(report_path, report.dump(2) + "\n");

  print_summary(config, summary);
  std::printf("good-event flagged episodes: %lld  optimism violations: %lld\n",
              static_cast<long long>(total_flagged),
              static_cast<long long>(total_optimism));
  std::printf("violation report -> %s\n", report_path.c_str());
  return 0;
}

struct GenEnvOptions {
  std::string kind = "random";
  int num_states = 5;
  int num_actions = 3;
  int horizon = 5;
  int length = 4;
  double slip = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_env(const GenEnvOptions& opt) {
  pomd::TabularModel model;
  if (opt.kind == "random") {
    model = pomd::make_random_mdp(opt.num_states, opt.num_actions, opt.horizon, opt.seed);
  } else if (opt.kind == "chain") {
    model = pomd::make_chain_mdp(opt.length, opt.horizon, opt.slip);
  } else {
    throw pomd::ConfigError("--kind must be random or chain, got " + opt.kind);
  }
  const std::filesystem::path parent = std::filesystem::path(opt.out).parent_path();
  if (!parent.empty()) ensure_directory(parent.string());
  pomd::write_text_file(opt.out, model.to_json().dump(2) + "\n");
  std::printf("wrote S=%d A=%d H=%d model -> %s\n", model.num_states,
              model.num_actions, model.horizon, opt.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-optimization experiments on tabular finite-horizon MDPs"};
  app.set_version_flag("--version", std::string(pomd::kVersion));
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Execute one experiment from a JSON config");
  run->add_option("--config", run_config, "Experiment config (or manifest) JSON")
      ->required();

  std::string sweep_config;
  std::vector<std::int64_t> k_grid;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Repeat an experiment over a K grid and fit a slope");
  sweep->add_option("--config", sweep_config, "Experiment config (or manifest) JSON")
      ->required();
  sweep->add_option("--k-grid", k_grid, "Comma-separated episode counts")
      ->required()
      ->delimiter(',');

  std::string diag_config;
  CLI::App* diag =
      app.add_subcommand("diag", "Run with all diagnostics on and emit a violation report");
  diag->add_option("--config", diag_config, "Experiment config (or manifest) JSON")
      ->required();

  GenEnvOptions gen;
  CLI::App* gen_env = app.add_subcommand("gen-env", "Write a model JSON file");
  gen_env->add_option("--kind", gen.kind, "random | chain")->required();
  gen_env->add_option("--states", gen.num_states, "random: number of states");
  gen_env->add_option("--actions", gen.num_actions, "random: number of actions");
  gen_env->add_option("--horizon", gen.horizon, "episode horizon");
  gen_env->add_option("--length", gen.length, "chain: number of states");
  gen_env->add_option("--slip", gen.slip, "chain: slip probability in [0, 0.5]");
  gen_env->add_option("--seed", gen.seed, "random: generation seed");
  gen_env->add_option("--out", gen.out, "output path for the model JSON")->required();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(run)) return cmd_run(run_config);
    if (app.got_subcommand(sweep)) return cmd_sweep(sweep_config, std::move(k_grid));
    if (app.got_subcommand(diag)) return cmd_diag(diag_config);
    if (app.got_subcommand(gen_env)) return cmd_gen_env(gen);
    return 2;  // unreachable with require_subcommand(1)
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pomd::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {  // includes ConfigError
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
