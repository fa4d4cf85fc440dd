#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pomd/algorithms.hpp"
#include "pomd/env.hpp"
#include "pomd/mdp.hpp"

namespace pomd {

/// Config-content problems (bad fields, malformed documents). The CLI maps
/// these to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Unreadable/unwritable paths; mapped to exit code 3. The offending path is
/// part of the message.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Instantaneous and cumulative regret per episode; cumulative is the exact
/// prefix sum of instantaneous.
struct RegretCurve {
  std::vector<double> instant;
  std::vector<double> cumulative;
};

/// r_k = V_1^{pi_k}(s1) - V*_1(s1), both exact backward recursions under the
/// true model (no empirical returns). Works for known and stochastic runs.
RegretCurve regret_stochastic(const RunResult& run, const TabularModel& model);

/// Best-in-hindsight regret per prefix: R(k) = sum_{j<=k} V_1^{j,pi_j}(s1)
/// minus k times the optimal value of the mean-cost MDP over episodes 1..k.
/// instant[k] is the increment R(k) - R(k-1), so the prefix-sum invariant
/// holds while cumulative[k] stays the exact prefix comparator regret.
RegretCurve regret_adversarial(const RunResult& run, const TabularModel& model,
                               const CostSchedule& schedule);

/// Least-squares fit of ln(regret) against ln(k). Requires >= 2 points,
/// strictly increasing positive k, positive regrets.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_loglog_slope(std::span<const double> k_points,
                         std::span<const double> regret_points);

/// Within-run slope checkpoints: K/16, K/8, K/4, K/2, K (deduplicated,
/// rounded down, burn-in prefixes below 100 episodes dropped).
std::vector<std::int64_t> slope_checkpoints(std::int64_t num_episodes);

/// Experiment description; JSON layout documented in the README.
struct EnvSpec {
  enum class Kind { random, chain, file };
  Kind kind = Kind::random;
  int num_states = 0;   // random
  int num_actions = 0;  // random
  int horizon = 0;      // random + chain
  int length = 0;       // chain
  double slip = 0.0;    // chain
  std::uint64_t seed = 0;
  std::string path;  // file
};

struct ScheduleSpec {
  CostSchedule::Kind kind = CostSchedule::Kind::constant;
  int period = 0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  EnvSpec env;
  Algorithm algorithm = Algorithm::stochastic;
  std::int64_t num_episodes = 0;
  double delta = 0.1;
  std::optional<double> stepsize;
  std::optional<double> gamma;
  CostNoise cost_noise = CostNoise::bernoulli;
  ScheduleSpec schedule;  // adversarial runs only
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  bool diag_good_event = false;
  bool diag_snapshots = false;

  nlohmann::json to_json() const;
  /// Throws ConfigError listing every offending field.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Builds the model an experiment runs on (may read a model file).
TabularModel build_environment(const EnvSpec& spec);

/// Per-seed outcome kept by run_experiment for callers (sweeps, tests,
/// diag reports). Violation counts and flagged-episode lists are filled only
/// when the matching diagnostics flag is on; episode indices are 1-based.
struct SeedOutcome {
  std::uint64_t seed = 0;
  RegretCurve curve;
  double q_min = 0.0;
  double q_max = 0.0;
  std::int64_t good_event_episodes = 0;  // episodes with any concentration flag
  std::int64_t optimism_violations = 0;  // total optimism violations
  std::vector<std::int64_t> cost_flag_episodes;
  std::vector<std::int64_t> kernel_flag_episodes;
  std::vector<std::int64_t> count_flag_episodes;
  std::vector<std::int64_t> optimism_episodes;
};

struct ExperimentSummary {
  TabularModel model;
  std::vector<SeedOutcome> seeds;
  std::vector<double> mean_cumulative;
  std::vector<double> std_cumulative;
  std::vector<std::string> files_written;
  double elapsed_seconds = 0.0;
};

/// Runs every seed on its own episode stream, writes one CSV per seed, an
/// aggregate CSV (mean and sample std of cumulative regret across seeds),
/// and a JSON manifest with the config echo. Identical configs produce
/// byte-identical CSVs.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Reads a JSON document; unreadable path -> IoError, parse failure ->
/// ConfigError. A document with a "config" key (a manifest) unwraps to it.
nlohmann::json load_json_file(const std::string& path);
nlohmann::json unwrap_manifest(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace pomd
