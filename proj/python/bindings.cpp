// Python bindings for the core operations: model construction, exact
// evaluation, the mirror-descent step, the three episodic loops, regret
// curves, and the file-writing experiment harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pomd/algorithms.hpp"
#include "pomd/env.hpp"
#include "pomd/harness.hpp"
#include "pomd/mdp.hpp"
#include "pomd/rng.hpp"
#include "pomd/version.hpp"

namespace py = pybind11;

namespace {

using Nested2 = std::vector<std::vector<double>>;
using Nested3 = std::vector<Nested2>;

Nested2 to_nested(const pomd::Tensor2& t) {
  Nested2 out(static_cast<std::size_t>(t.dim0()));
  for (int i = 0; i < t.dim0(); ++i)
    out[static_cast<std::size_t>(i)].assign(t.row(i).begin(), t.row(i).end());
  return out;
}

Nested3 to_nested(const pomd::Tensor3& t) {
  Nested3 out(static_cast<std::size_t>(t.dim0()),
              Nested2(static_cast<std::size_t>(t.dim1())));
  for (int i = 0; i < t.dim0(); ++i)
    for (int j = 0; j < t.dim1(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].assign(
          t.row(i, j).begin(), t.row(i, j).end());
  return out;
}

py::dict value_dict(const pomd::ValueTables& values) {
  py::dict out;
  out["q"] = to_nested(values.q);
  out["v"] = to_nested(values.v);
  return out;
}

pomd::CostSchedule::Kind parse_schedule_kind(const std::string& name) {
  if (name == "constant") return pomd::CostSchedule::Kind::constant;
  if (name == "switching") return pomd::CostSchedule::Kind::switching;
  if (name == "drifting") return pomd::CostSchedule::Kind::drifting;
  throw std::invalid_argument("schedule kind must be constant, switching, or drifting");
}

pomd::AlgoConfig make_algo_config(std::int64_t num_episodes, double delta,
                                  std::optional<double> stepsize,
                                  std::optional<double> gamma) {
  pomd::AlgoConfig config;
  config.num_episodes = num_episodes;
  config.delta = delta;
  config.stepsize = stepsize;
  config.gamma = gamma;
  return config;
}

/// Runs one algorithm on `model` and reports per-episode series plus the
/// regret curve; seeding matches the harness (per-seed episode stream).
py::dict run_loop(const pomd::TabularModel& model, const std::string& algorithm,
                  std::int64_t num_episodes, double delta, std::uint64_t seed,
                  std::optional<double> stepsize, std::optional<double> gamma,
                  const std::string& cost_noise, const std::string& schedule_kind,
                  int schedule_period, std::uint64_t schedule_seed) {
  const pomd::AlgoConfig config = make_algo_config(num_episodes, delta, stepsize, gamma);
  pomd::SplitRng rng = pomd::SplitRng(seed).split(pomd::rng_stream::kEpisodes);

  pomd::RunResult run;
  pomd::RegretCurve curve;
  if (algorithm == "known") {
    run = pomd::run_pomd_known(model, config);
    curve = pomd::regret_stochastic(run, model);
  } else if (algorithm == "stochastic") {
    pomd::CostNoise noise;
    if (cost_noise == "bernoulli") {
      noise = pomd::CostNoise::bernoulli;
    } else if (cost_noise == "deterministic") {
      noise = pomd::CostNoise::deterministic;
    } else {
      throw std::invalid_argument("cost_noise must be bernoulli or deterministic");
    }
    run = pomd::run_pomd_stochastic(pomd::StochasticEnv{model, noise}, config, rng);
    curve = pomd::regret_stochastic(run, model);
  } else if (algorithm == "adversarial") {
    const pomd::CostSchedule schedule = pomd::make_adversarial_schedule(
        model, static_cast<int>(num_episodes), parse_schedule_kind(schedule_kind),
        schedule_period, schedule_seed);
    run = pomd::run_pomd_adversarial(model, schedule, config, rng);
    curve = pomd::regret_adversarial(run, model, schedule);
  } else {
    throw std::invalid_argument("algorithm must be known, stochastic, or adversarial");
  }

  std::vector<double> value_estimates, true_values;
  double q_min = 0.0, q_max = 0.0;
  value_estimates.reserve(run.episodes.size());
  true_values.reserve(run.episodes.size());
  for (const pomd::EpisodeRecord& episode : run.episodes) {
    value_estimates.push_back(episode.value_estimate);
    true_values.push_back(episode.true_value);
    q_min = std::min(q_min, episode.q_min);
    q_max = std::max(q_max, episode.q_max);
  }

  py::dict out;
  out["value_estimates"] = std::move(value_estimates);
  out["true_values"] = std::move(true_values);
  out["instant_regret"] = curve.instant;
  out["cum_regret"] = curve.cumulative;
  out["final_policy"] = run.episodes.empty() ? pomd::Policy::uniform(
                                                   model.horizon, model.num_states,
                                                   model.num_actions)
                                             : run.episodes.back().policy;
  out["stepsize"] = run.stepsize;
  out["gamma"] = run.gamma;
  out["q_min"] = q_min;
  out["q_max"] = q_max;
  return out;
}

py::dict run_experiment_json(const std::string& config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw pomd::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const pomd::ExperimentSummary summary =
      pomd::run_experiment(pomd::ExperimentConfig::from_json(pomd::unwrap_manifest(doc)));

  py::dict out;
  out["files_written"] = summary.files_written;
  out["mean_cum_regret"] = summary.mean_cumulative;
  out["std_cum_regret"] = summary.std_cumulative;
  out["elapsed_seconds"] = summary.elapsed_seconds;
  out["num_seeds"] = summary.seeds.size();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimistic policy optimization on tabular finite-horizon MDPs";
  m.attr("__version__") = pomd::kVersion;

  py::class_<pomd::TabularModel>(m, "TabularModel")
      .def_readonly("num_states", &pomd::TabularModel::num_states)
      .def_readonly("num_actions", &pomd::TabularModel::num_actions)
      .def_readonly("horizon", &pomd::TabularModel::horizon)
      .def_readonly("initial_state", &pomd::TabularModel::initial_state)
      .def("validate", &pomd::TabularModel::validate)
      .def(
          "transition_row",
          [](const pomd::TabularModel& model, int h, int s, int a) {
            const auto row = model.transitions.row(h, s, a);
            return std::vector<double>(row.begin(), row.end());
          },
          py::arg("h"), py::arg("s"), py::arg("a"),
          "Next-state distribution p_h(.|s, a)")
      .def(
          "mean_cost",
          [](const pomd::TabularModel& model, int h, int s, int a) {
            return model.mean_costs(h, s, a);
          },
          py::arg("h"), py::arg("s"), py::arg("a"))
      .def("to_json",
           [](const pomd::TabularModel& model) { return model.to_json().dump(2); })
      .def_static("from_json", [](const std::string& text) {
        return pomd::TabularModel::from_json(nlohmann::json::parse(text));
      });

  py::class_<pomd::Policy>(m, "Policy")
      .def_static("uniform", &pomd::Policy::uniform, py::arg("horizon"),
                  py::arg("num_states"), py::arg("num_actions"))
      .def_property_readonly("horizon", &pomd::Policy::horizon)
      .def_property_readonly("num_states", &pomd::Policy::num_states)
      .def_property_readonly("num_actions", &pomd::Policy::num_actions)
      .def("validate", &pomd::Policy::validate)
      .def(
          "prob",
          [](const pomd::Policy& policy, int h, int s, int a) {
            return policy.probs(h, s, a);
          },
          py::arg("h"), py::arg("s"), py::arg("a"))
      .def("table",
           [](const pomd::Policy& policy) { return to_nested(policy.probs); })
      .def("__eq__", [](const pomd::Policy& a, const pomd::Policy& b) { return a == b; });

  m.def("make_random_mdp", &pomd::make_random_mdp, py::arg("num_states"),
        py::arg("num_actions"), py::arg("horizon"), py::arg("seed"),
        "Seeded Dirichlet(1) transition rows and uniform [0,1] mean costs");
  m.def("make_chain_mdp", &pomd::make_chain_mdp, py::arg("length"), py::arg("horizon"),
        py::arg("slip"), "Two-action chain; only (far state, forward) is free");

  m.def(
      "evaluate_policy",
      [](const pomd::TabularModel& model, const pomd::Policy& policy) {
        return value_dict(pomd::evaluate_policy(model, policy));
      },
      py::arg("model"), py::arg("policy"),
      "Exact backward recursion; returns {'q': [H][S][A], 'v': [H][S]}");
  m.def(
      "optimal_values",
      [](const pomd::TabularModel& model) {
        auto [policy, values] = pomd::optimal_values(model);
        return py::make_tuple(policy, value_dict(values));
      },
      py::arg("model"), "Optimal deterministic policy and its value tables");
  m.def(
      "occupancy",
      [](const pomd::TabularModel& model, const pomd::Policy& policy) {
        const pomd::OccupancyTables occ =
            pomd::compute_occupancy(policy, model.transitions, model.initial_state);
        py::dict out;
        out["state"] = to_nested(occ.state_occ);
        out["state_action"] = to_nested(occ.state_action_occ);
        return out;
      },
      py::arg("model"), py::arg("policy"),
      "State ([H+1][S]) and state-action ([H][S][A]) occupancies");

  m.def(
      "omd_step",
      [](const std::vector<double>& dist, const std::vector<double>& q_row,
         double stepsize) { return pomd::omd_step(dist, q_row, stepsize); },
      py::arg("dist"), py::arg("q_row"), py::arg("stepsize"),
      "One exponentiated-gradient step: dist * exp(-stepsize * q), normalized");
  m.def("default_stepsize", &pomd::default_stepsize_stochastic, py::arg("num_actions"),
        py::arg("horizon"), py::arg("num_episodes"));
  m.def(
      "default_adversarial_params",
      [](int num_actions, int horizon, std::int64_t num_episodes) {
        const pomd::AdversarialParams p =
            pomd::default_params_adversarial(num_actions, horizon, num_episodes);
        return py::make_tuple(p.gamma, p.stepsize);
      },
      py::arg("num_actions"), py::arg("horizon"), py::arg("num_episodes"),
      "(gamma, stepsize) defaults for the adversarial loop");

  m.def("run", &run_loop, py::arg("model"), py::arg("algorithm"),
        py::arg("num_episodes"), py::arg("delta") = 0.1, py::arg("seed") = 1,
        py::arg("stepsize") = std::nullopt, py::arg("gamma") = std::nullopt,
        py::arg("cost_noise") = "bernoulli", py::arg("schedule_kind") = "switching",
        py::arg("schedule_period") = 0, py::arg("schedule_seed") = 0,
        "Run one episodic loop and return per-episode series plus regret curves");

  m.def(
      "fit_loglog_slope",
      [](const std::vector<double>& k_points, const std::vector<double>& regrets) {
        const pomd::LineFit fit = pomd::fit_loglog_slope(k_points, regrets);
        return py::make_tuple(fit.slope, fit.intercept);
      },
      py::arg("k_points"), py::arg("regrets"),
      "Least-squares (slope, intercept) of ln(regret) against ln(k)");

  m.def("run_experiment", &run_experiment_json, py::arg("config_json"),
        "Run the file-writing harness from a config JSON string");
}
