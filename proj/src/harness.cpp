#include "pomd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pomd/oracles.hpp"
#include "pomd/version.hpp"

namespace pomd {

namespace {

std::string format_sig(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

double exact_value(const TabularModel& model, const Policy& policy) {
  return evaluate_policy(model, policy).v(0, model.initial_state);
}

}  // namespace

RegretCurve regret_stochastic(const RunResult& run, const TabularModel& model) {
  model.validate();
  if (run.episodes.empty()) throw std::invalid_argument("regret: run has no episodes");
  const double optimal = optimal_values(model).second.v(0, model.initial_state);
  RegretCurve out;
  out.instant.reserve(run.episodes.size());
  out.cumulative.reserve(run.episodes.size());
  double total = 0.0;
  for (const EpisodeRecord& rec : run.episodes) {
    const double r = exact_value(model, rec.policy) - optimal;
    total += r;
    out.instant.push_back(r);
    out.cumulative.push_back(total);
  }
  return out;
}

RegretCurve regret_adversarial(const RunResult& run, const TabularModel& model,
                               const CostSchedule& schedule) {
  model.validate();
  const auto num_episodes = static_cast<std::int64_t>(run.episodes.size());
  if (num_episodes == 0) throw std::invalid_argument("regret: run has no episodes");
  if (schedule.num_episodes() < num_episodes)
    throw std::invalid_argument("regret: schedule shorter than the run");

  RegretCurve out;
  out.instant.reserve(run.episodes.size());
  out.cumulative.reserve(run.episodes.size());

  TabularModel mean_model = model;  // running mean of the cost tables
  for (double& c : mean_model.mean_costs.data()) c = 0.0;
  double learner_total = 0.0;
  double prev_regret = 0.0;
  for (std::int64_t k = 1; k <= num_episodes; ++k) {
    const Tensor3 costs = schedule.table(static_cast<int>(k));
    const EpisodeRecord& rec = run.episodes[k - 1];
    learner_total +=
        evaluate_policy(model.transitions, costs, rec.policy).v(0, model.initial_state);
    for (std::size_t i = 0; i < costs.data().size(); ++i) {
      double& mean = mean_model.mean_costs.data()[i];
      mean += (costs.data()[i] - mean) / static_cast<double>(k);
    }
    const double comparator =
        static_cast<double>(k) *
        optimal_values(mean_model).second.v(0, model.initial_state);
    const double regret = learner_total - comparator;
    out.instant.push_back(regret - prev_regret);
    out.cumulative.push_back(regret);
    prev_regret = regret;
  }
  return out;
}

LineFit fit_loglog_slope(std::span<const double> k_points,
                         std::span<const double> regret_points) {
  const std::size_t n = k_points.size();
  if (n < 2 || regret_points.size() != n)
    throw std::invalid_argument("fit_loglog_slope: need >= 2 aligned points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(k_points[i] > 0.0) || !(regret_points[i] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: points must be positive");
    if (i > 0 && !(k_points[i] > k_points[i - 1]))
      throw std::invalid_argument("fit_loglog_slope: k must be strictly increasing");
  }
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(k_points[i]);
    ys[i] = std::log(regret_points[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog_slope: degenerate k grid");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<std::int64_t> slope_checkpoints(std::int64_t num_episodes) {
  if (num_episodes < 1) throw std::invalid_argument("slope_checkpoints: K must be >= 1");
  std::vector<std::int64_t> out;
  for (int divisor : {16, 8, 4, 2, 1}) {
    const std::int64_t k = num_episodes / divisor;
    if (k < 100) continue;  // burn-in prefix
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

namespace {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::known: return "known";
    case Algorithm::stochastic: return "stochastic";
    case Algorithm::adversarial: return "adversarial";
  }
  throw std::invalid_argument("unknown algorithm");
}

const char* schedule_kind_name(CostSchedule::Kind k) {
  switch (k) {
    case CostSchedule::Kind::constant: return "constant";
    case CostSchedule::Kind::switching: return "switching";
    case CostSchedule::Kind::drifting: return "drifting";
  }
  throw std::invalid_argument("unknown schedule kind");
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json jenv;
  switch (env.kind) {
    case EnvSpec::Kind::random:
      jenv = {{"kind", "random"}, {"S", env.num_states}, {"A", env.num_actions},
              {"H", env.horizon}, {"seed", env.seed}};
      break;
    case EnvSpec::Kind::chain:
      jenv = {{"kind", "chain"}, {"length", env.length}, {"H", env.horizon},
              {"slip", env.slip}};
      break;
    case EnvSpec::Kind::file:
      jenv = {{"kind", "file"}, {"path", env.path}};
      break;
  }
  nlohmann::json j{{"env", std::move(jenv)},
                   {"algorithm", algorithm_name(algorithm)},
                   {"K", num_episodes},
                   {"delta", delta},
                   {"cost_noise",
                    cost_noise == CostNoise::bernoulli ? "bernoulli" : "deterministic"},
                   {"seeds", seeds},
                   {"out_dir", out_dir},
                   {"diagnostics",
                    {{"good_event_checks", diag_good_event},
                     {"full_snapshots", diag_snapshots}}}};
  if (stepsize) j["t_k"] = *stepsize;
  if (gamma) j["gamma"] = *gamma;
  if (algorithm == Algorithm::adversarial)
    j["schedule"] = {{"kind", schedule_kind_name(schedule.kind)},
                     {"period", schedule.period},
                     {"seed", schedule.seed}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  std::vector<std::string> bad;
  const auto complain = [&bad](const std::string& field, const std::string& why) {
    bad.push_back(field + " (" + why + ")");
  };

  if (!j.is_object()) throw ConfigError("config: document is not a JSON object");

  if (!j.contains("env") || !j.at("env").is_object()) {
    complain("env", "missing or not an object");
  } else {
    const auto& je = j.at("env");
    const std::string kind = je.value("kind", "");
    if (kind == "random") {
      cfg.env.kind = EnvSpec::Kind::random;
      cfg.env.num_states = je.value("S", 0);
      cfg.env.num_actions = je.value("A", 0);
      cfg.env.horizon = je.value("H", 0);
      cfg.env.seed = je.value("seed", std::uint64_t{0});
      if (cfg.env.num_states < 2) complain("env.S", "must be >= 2");
      if (cfg.env.num_actions < 1) complain("env.A", "must be >= 1");
      if (cfg.env.horizon < 1) complain("env.H", "must be >= 1");
    } else if (kind == "chain") {
      cfg.env.kind = EnvSpec::Kind::chain;
      cfg.env.length = je.value("length", 0);
      cfg.env.horizon = je.value("H", 0);
      cfg.env.slip = je.value("slip", 0.0);
      if (cfg.env.length < 2) complain("env.length", "must be >= 2");
      if (cfg.env.horizon < 1) complain("env.H", "must be >= 1");
      if (!(cfg.env.slip >= 0.0) || cfg.env.slip > 0.5)
        complain("env.slip", "must lie in [0, 0.5]");
    } else if (kind == "file") {
      cfg.env.kind = EnvSpec::Kind::file;
      cfg.env.path = je.value("path", "");
      if (cfg.env.path.empty()) complain("env.path", "missing");
    } else {
      complain("env.kind", "expected random | chain | file");
    }
  }

  const std::string alg = j.value("algorithm", "");
  if (alg == "known") cfg.algorithm = Algorithm::known;
  else if (alg == "stochastic") cfg.algorithm = Algorithm::stochastic;
  else if (alg == "adversarial") cfg.algorithm = Algorithm::adversarial;
  else complain("algorithm", "expected known | stochastic | adversarial");

  cfg.num_episodes = j.value("K", std::int64_t{0});
  if (cfg.num_episodes < 1) complain("K", "must be >= 1");

  cfg.delta = j.value("delta", 0.1);
  if (!(cfg.delta > 0.0) || cfg.delta >= 1.0) complain("delta", "must lie in (0,1)");

  if (j.contains("t_k") && !j.at("t_k").is_null()) {
    const double t = j.at("t_k").is_number() ? j.at("t_k").get<double>() : -1.0;
    if (!(t > 0.0)) complain("t_k", "must be a positive number");
    else cfg.stepsize = t;
  }
  if (j.contains("gamma") && !j.at("gamma").is_null()) {
    const double g = j.at("gamma").is_number() ? j.at("gamma").get<double>() : -1.0;
    if (!(g > 0.0) || g >= 1.0) complain("gamma", "must lie in (0,1)");
    else cfg.gamma = g;
  }

  const std::string noise = j.value("cost_noise", "bernoulli");
  if (noise == "bernoulli") cfg.cost_noise = CostNoise::bernoulli;
  else if (noise == "deterministic") cfg.cost_noise = CostNoise::deterministic;
  else complain("cost_noise", "expected bernoulli | deterministic");

  if (cfg.algorithm == Algorithm::adversarial) {
    if (!j.contains("schedule") || !j.at("schedule").is_object()) {
      complain("schedule", "required for the adversarial algorithm");
    } else {
      const auto& js = j.at("schedule");
      const std::string kind = js.value("kind", "");
      if (kind == "constant") cfg.schedule.kind = CostSchedule::Kind::constant;
      else if (kind == "switching") cfg.schedule.kind = CostSchedule::Kind::switching;
      else if (kind == "drifting") cfg.schedule.kind = CostSchedule::Kind::drifting;
      else complain("schedule.kind", "expected constant | switching | drifting");
      cfg.schedule.period = js.value("period", 0);
      cfg.schedule.seed = js.value("seed", std::uint64_t{0});
      if (cfg.schedule.kind == CostSchedule::Kind::switching && cfg.schedule.period < 1)
        complain("schedule.period", "must be >= 1 for switching");
    }
  }

  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty()) {
    complain("seeds", "must be a non-empty array");
  } else {
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_unsigned() && !s.is_number_integer()) {
        complain("seeds", "entries must be integers");
        break;
      }
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }

  cfg.out_dir = j.value("out_dir", "");
  if (cfg.out_dir.empty()) complain("out_dir", "missing");

  if (j.contains("diagnostics")) {
    const auto& jd = j.at("diagnostics");
    if (jd.is_object()) {
      cfg.diag_good_event = jd.value("good_event_checks", false);
      cfg.diag_snapshots = jd.value("full_snapshots", false);
    } else if (jd.is_boolean()) {
      cfg.diag_good_event = cfg.diag_snapshots = jd.get<bool>();
    } else {
      complain("diagnostics", "expected object or boolean");
    }
  }

  if (!bad.empty()) {
    std::string msg = "config validation failed: ";
    for (std::size_t i = 0; i < bad.size(); ++i)
      msg += (i ? ", " : "") + bad[i];
    throw ConfigError(msg);
  }
  return cfg;
}

TabularModel build_environment(const EnvSpec& spec) {
  switch (spec.kind) {
    case EnvSpec::Kind::random:
      return make_random_mdp(spec.num_states, spec.num_actions, spec.horizon, spec.seed);
    case EnvSpec::Kind::chain:
      return make_chain_mdp(spec.length, spec.horizon, spec.slip);
    case EnvSpec::Kind::file: {
      const nlohmann::json j = load_json_file(spec.path);
      try {
        return TabularModel::from_json(j);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model file ") + spec.path + ": " + e.what());
      }
    }
  }
  throw ConfigError("env.kind: unknown kind");
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json unwrap_manifest(const nlohmann::json& j) {
  if (j.is_object() && j.contains("config")) return j.at("config");
  return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

namespace {

/// Episode-level diagnostics merged into the per-seed CSV.
struct SeedDiagnostics {
  std::vector<std::uint8_t> good_event;   // any concentration flag
  std::vector<std::uint8_t> optimism;     // any optimism violation
  std::vector<double> u_minus_d_l1;       // adversarial reach-bound slack
};

SeedDiagnostics seed_diagnostics(const ExperimentConfig& cfg, const RunResult& run,
                                 const TabularModel& model, const CostSchedule* schedule,
                                 SeedOutcome& outcome) {
  const std::size_t num_episodes = run.episodes.size();
  SeedDiagnostics diag;
  diag.good_event.assign(num_episodes, 0);
  diag.optimism.assign(num_episodes, 0);
  diag.u_minus_d_l1.assign(num_episodes, 0.0);
  if (run.algorithm == Algorithm::known) return diag;

  if (cfg.diag_good_event) {
    const Regime regime = run.algorithm == Algorithm::adversarial
                              ? Regime::adversarial
                              : Regime::stochastic;
    const GoodEventReport report =
        good_event_report(run, model, cfg.delta, regime, schedule);
    for (std::size_t k = 0; k < num_episodes; ++k) {
      diag.good_event[k] = report.any(k) ? 1 : 0;
      outcome.good_event_episodes += diag.good_event[k];
      const auto episode = static_cast<std::int64_t>(k) + 1;
      if (report.flag_cost[k]) outcome.cost_flag_episodes.push_back(episode);
      if (report.flag_kernel[k]) outcome.kernel_flag_episodes.push_back(episode);
      if (report.flag_count[k]) outcome.count_flag_episodes.push_back(episode);
    }
  }
  if (cfg.diag_snapshots) {
    const OptimismCheck check = run.algorithm == Algorithm::adversarial
                                    ? check_optimism_adversarial(run, model)
                                    : check_optimism_stochastic(run, model);
    for (std::size_t k = 0; k < num_episodes; ++k) {
      diag.optimism[k] = check.per_episode[k] > 0 ? 1 : 0;
      outcome.optimism_violations += check.per_episode[k];
      if (check.per_episode[k] > 0)
        outcome.optimism_episodes.push_back(static_cast<std::int64_t>(k) + 1);
    }
    if (run.algorithm == Algorithm::adversarial) {
      for (std::size_t k = 0; k < num_episodes; ++k) {
        const EpisodeRecord& rec = run.episodes[k];
        const OccupancyTables occ =
            compute_occupancy(rec.policy, model.transitions, model.initial_state);
        double slack = 0.0;
        for (int h = 0; h < model.horizon; ++h)
          for (int s = 0; s < model.num_states; ++s)
            slack += std::abs(rec.u_snapshot(h, s) - occ.state_occ(h, s));
        diag.u_minus_d_l1[k] = slack;
      }
    }
  }
  return diag;
}

std::string seed_csv(const RegretCurve& curve, const SeedDiagnostics& diag,
                     bool with_u_column) {
  std::string out = "episode,instant_regret,cum_regret,good_event_violation,"
                    "optimism_violation";
  if (with_u_column) out += ",u_minus_d_l1";
  out += "\n";
  for (std::size_t k = 0; k < curve.instant.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += format_sig(curve.instant[k]);
    out += ',';
    out += format_sig(curve.cumulative[k]);
    out += ',';
    out += diag.good_event[k] ? '1' : '0';
    out += ',';
    out += diag.optimism[k] ? '1' : '0';
    if (with_u_column) {
      out += ',';
      out += format_sig(diag.u_minus_d_l1[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();

  ExperimentSummary summary;
  summary.model = build_environment(config.env);

  std::optional<CostSchedule> schedule;
  if (config.algorithm == Algorithm::adversarial)
    schedule = make_adversarial_schedule(summary.model,
                                         static_cast<int>(config.num_episodes),
                                         config.schedule.kind, config.schedule.period,
                                         config.schedule.seed);

  AlgoConfig algo;
  algo.num_episodes = config.num_episodes;
  algo.delta = config.delta;
  algo.stepsize = config.stepsize;
  algo.gamma = config.gamma;
  algo.record_snapshots = config.diag_snapshots;
  algo.validate(config.algorithm, summary.model.num_actions);

  std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir);

  const auto k_count = static_cast<std::size_t>(config.num_episodes);
  std::vector<double> mean(k_count, 0.0), m2(k_count, 0.0);

  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    const std::uint64_t seed = config.seeds[i];
    SplitRng rng = SplitRng(seed).split(rng_stream::kEpisodes);

    RunResult run;
    switch (config.algorithm) {
      case Algorithm::known:
        run = run_pomd_known(summary.model, algo);
        break;
      case Algorithm::stochastic:
        run = run_pomd_stochastic({summary.model, config.cost_noise}, algo, rng);
        break;
      case Algorithm::adversarial:
        run = run_pomd_adversarial(summary.model, *schedule, algo, rng);
        break;
    }

    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.q_min = std::numeric_limits<double>::infinity();
    outcome.q_max = -std::numeric_limits<double>::infinity();
    for (const EpisodeRecord& rec : run.episodes) {
      outcome.q_min = std::min(outcome.q_min, rec.q_min);
      outcome.q_max = std::max(outcome.q_max, rec.q_max);
    }
    outcome.curve = config.algorithm == Algorithm::adversarial
                        ? regret_adversarial(run, summary.model, *schedule)
                        : regret_stochastic(run, summary.model);

    const SeedDiagnostics diag = seed_diagnostics(
        config, run, summary.model, schedule ? &*schedule : nullptr, outcome);

    const std::string csv = seed_csv(outcome.curve, diag, config.diag_snapshots);
    const std::string path = (dir / ("seed_" + std::to_string(seed) + ".csv")).string();
    write_text_file(path, csv);
    summary.files_written.push_back(path);

    // Welford running mean/variance across seeds, episode by episode.
    for (std::size_t k = 0; k < k_count; ++k) {
      const double x = outcome.curve.cumulative[k];
      const double d = x - mean[k];
      mean[k] += d / static_cast<double>(i + 1);
      m2[k] += d * (x - mean[k]);
    }
    summary.seeds.push_back(std::move(outcome));
  }

  summary.mean_cumulative = mean;
  summary.std_cumulative.assign(k_count, 0.0);
  if (config.seeds.size() > 1)
    for (std::size_t k = 0; k < k_count; ++k)
      summary.std_cumulative[k] =
          std::sqrt(m2[k] / static_cast<double>(config.seeds.size() - 1));

  std::string agg = "episode,mean_cum_regret,std_cum_regret\n";
  for (std::size_t k = 0; k < k_count; ++k) {
    agg += std::to_string(k + 1);
    agg += ',';
    agg += format_sig(summary.mean_cumulative[k]);
    agg += ',';
    agg += format_sig(summary.std_cumulative[k]);
    agg += '\n';
  }
  const std::string agg_path = (dir / "aggregate.csv").string();
  write_text_file(agg_path, agg);
  summary.files_written.push_back(agg_path);

  summary.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest{{"config", config.to_json()},
                          {"version", kVersion},
                          {"elapsed_seconds", summary.elapsed_seconds},
                          {"outputs", summary.files_written}};
  const std::string manifest_path = (dir / "manifest.json").string();
  write_text_file(manifest_path, manifest.dump(2) + "\n");
  summary.files_written.push_back(manifest_path);

  return summary;
}

}  // namespace pomd
