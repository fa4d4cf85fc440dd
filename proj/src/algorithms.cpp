#include "pomd/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pomd {

void AlgoConfig::validate(Algorithm algorithm, int num_actions) const {
  if (num_episodes < 1) throw std::invalid_argument("config: num_episodes must be >= 1");
  if (!(delta > 0.0) || delta >= 1.0)
    throw std::invalid_argument("config: delta must lie in (0,1)");
  if (stepsize && !(*stepsize > 0.0))
    throw std::invalid_argument("config: stepsize must be positive");
  if (gamma && (!(*gamma > 0.0) || *gamma >= 1.0))
    throw std::invalid_argument("config: gamma must lie in (0,1)");
  if (!(bonus_scale >= 0.0) || bonus_scale > 1.0)
    throw std::invalid_argument("config: bonus_scale must lie in [0,1]");
  if (!(radius_scale >= 0.0) || radius_scale > 1.0)
    throw std::invalid_argument("config: radius_scale must lie in [0,1]");
  if (!stepsize && num_actions < 2)
    throw std::invalid_argument(
        "config: default stepsize needs num_actions >= 2; set stepsize explicitly");
  if (algorithm == Algorithm::adversarial && !gamma && num_actions < 2)
    throw std::invalid_argument(
        "config: default gamma needs num_actions >= 2; set gamma explicitly");
}

void omd_step_inplace(std::span<double> dist, std::span<const double> q_row,
                      double stepsize) {
  const int n = static_cast<int>(dist.size());
  if (n == 0 || static_cast<int>(q_row.size()) != n)
    throw std::invalid_argument("omd_step: row length mismatch");
  if (!(stepsize >= 0.0)) throw std::invalid_argument("omd_step: stepsize must be >= 0");
  double sum = 0.0;
  double q_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (!(dist[i] >= 0.0)) throw std::invalid_argument("omd_step: negative probability");
    if (!std::isfinite(q_row[i]) || q_row[i] < 0.0)
      throw std::invalid_argument("omd_step: q entries must be finite and >= 0");
    sum += dist[i];
    q_min = std::min(q_min, q_row[i]);
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("omd_step: distribution does not sum to 1");
  if (stepsize == 0.0) return;
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    dist[i] *= std::exp(-stepsize * (q_row[i] - q_min));
    z += dist[i];
  }
  if (!(z > 0.0)) throw std::invalid_argument("omd_step: zero normalizer");
  for (int i = 0; i < n; ++i) dist[i] /= z;
}

std::vector<double> omd_step(std::span<const double> dist, std::span<const double> q_row,
                             double stepsize) {
  std::vector<double> out(dist.begin(), dist.end());
  omd_step_inplace(out, q_row, stepsize);
  return out;
}

double default_stepsize_stochastic(int num_actions, int horizon,
                                   std::int64_t num_episodes) {
  if (num_actions < 2)
    throw std::invalid_argument("default_stepsize_stochastic: num_actions must be >= 2");
  if (horizon < 1 || num_episodes < 1)
    throw std::invalid_argument("default_stepsize_stochastic: bad horizon or episodes");
  return std::sqrt(2.0 * std::log(static_cast<double>(num_actions)) /
                   (static_cast<double>(horizon) * horizon *
                    static_cast<double>(num_episodes)));
}

AdversarialParams default_params_adversarial(int num_actions, int horizon,
                                             std::int64_t num_episodes) {
  if (num_actions < 2)
    throw std::invalid_argument("default_params_adversarial: num_actions must be >= 2");
  if (horizon < 1 || num_episodes < 1)
    throw std::invalid_argument("default_params_adversarial: bad horizon or episodes");
  const double k = static_cast<double>(num_episodes);
  AdversarialParams out;
  out.gamma = std::min(0.5, 1.0 / (std::sqrt(static_cast<double>(num_actions)) *
                                   std::cbrt(k)));
  out.stepsize = std::sqrt(std::log(static_cast<double>(num_actions))) /
                 (static_cast<double>(horizon) * std::cbrt(k) * std::cbrt(k));
  return out;
}

namespace {

void check_dims(int horizon, int num_states, int num_actions, int initial_state) {
  if (horizon < 1 || num_states < 2 || num_actions < 1)
    throw std::invalid_argument("learner: dimensions too small");
  if (initial_state < 0 || initial_state >= num_states)
    throw std::invalid_argument("learner: initial_state out of range");
}

}  // namespace

StochasticLearner::StochasticLearner(int horizon, int num_states, int num_actions,
                                     int initial_state, const AlgoConfig& config)
    : config_(config), initial_state_(initial_state) {
  check_dims(horizon, num_states, num_actions, initial_state);
  config.validate(Algorithm::stochastic, num_actions);
  stepsize_ = config.stepsize
                  ? *config.stepsize
                  : default_stepsize_stochastic(num_actions, horizon, config.num_episodes);
  delta_prime_ = config.delta / 3.0;
  policy_ = Policy::uniform(horizon, num_states, num_actions);
  counters_ = Counters(horizon, num_states, num_actions);
}

EpisodeRecord StochasticLearner::observe(const Trajectory& trajectory) {
  const int H = counters_.horizon(), S = counters_.num_states(), A = counters_.num_actions();
  if (counters_.episodes_seen >= config_.num_episodes)
    throw std::invalid_argument("learner: run is already complete");

  EpisodeRecord rec;
  rec.trajectory = trajectory;
  rec.policy = policy_;

  const EmpiricalModel emp = empirical_model(counters_);
  const BonusTable bonuses =
      stochastic_bonuses(counters_.visit, config_.num_episodes, delta_prime_);

  Tensor3 q(H, S, A);
  Tensor2 v(H, S);
  std::vector<double> v_next(S, 0.0);
  rec.q_min = std::numeric_limits<double>::infinity();
  rec.q_max = -std::numeric_limits<double>::infinity();
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double vs = 0.0;
      for (int a = 0; a < A; ++a) {
        double value = emp.c_bar(h, s, a) - config_.bonus_scale * bonuses.total(h, s, a);
        const auto row = emp.p_bar.row(h, s, a);
        for (int s2 = 0; s2 < S; ++s2) value += row[s2] * v_next[s2];
        value = std::max(value, 0.0);
        q(h, s, a) = value;
        vs += policy_.probs(h, s, a) * value;
        rec.q_min = std::min(rec.q_min, value);
        rec.q_max = std::max(rec.q_max, value);
      }
      v(h, s) = vs;
    }
    for (int s = 0; s < S; ++s) v_next[s] = v(h, s);
  }
  rec.value_estimate = v(0, initial_state_);

  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      omd_step_inplace(policy_.probs.row(h, s), q.row(h, s), stepsize_);

  if (config_.record_snapshots) {
    rec.q_snapshot = std::move(q);
    rec.v_snapshot = std::move(v);
  }
  update_counters(counters_, trajectory);
  return rec;
}

AdversarialLearner::AdversarialLearner(int horizon, int num_states, int num_actions,
                                       int initial_state, const AlgoConfig& config)
    : config_(config), initial_state_(initial_state) {
  check_dims(horizon, num_states, num_actions, initial_state);
  config.validate(Algorithm::adversarial, num_actions);
  const bool need_defaults = !config.stepsize || !config.gamma;
  AdversarialParams defaults;
  if (need_defaults)
    defaults = default_params_adversarial(num_actions, horizon, config.num_episodes);
  stepsize_ = config.stepsize ? *config.stepsize : defaults.stepsize;
  gamma_ = config.gamma ? *config.gamma : defaults.gamma;
  delta_prime_ = config.delta / 6.0;
  policy_ = Policy::uniform(horizon, num_states, num_actions);
  counters_ = Counters(horizon, num_states, num_actions);
}

EpisodeRecord AdversarialLearner::observe(const Trajectory& trajectory) {
  const int H = counters_.horizon(), S = counters_.num_states(), A = counters_.num_actions();
  if (counters_.episodes_seen >= config_.num_episodes)
    throw std::invalid_argument("learner: run is already complete");

  EpisodeRecord rec;
  rec.trajectory = trajectory;
  rec.policy = policy_;

  const EmpiricalModel emp = empirical_model(counters_);
  ConfidenceRadii radii =
      bernstein_radii(emp, counters_.visit, config_.num_episodes, delta_prime_);
  if (config_.radius_scale != 1.0) {
    // Ablation hook: shrink only visited rows; unvisited rows keep the full
    // simplex so the box stays feasible.
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          if (emp.unvisited(h, s, a)) continue;
          for (int s2 = 0; s2 < S; ++s2)
            radii.eps(h, s, a, s2) *= config_.radius_scale;
        }
  }

  const ReachUpperBound reach = reach_upper_bounds(policy_, emp, radii, initial_state_);
  const IsCostEstimate is_costs =
      importance_sampled_costs(trajectory, reach.u, policy_, gamma_);
  const Tensor3 c_hat = is_costs.dense(H, S, A);

  Tensor3 q(H, S, A);
  Tensor2 v(H, S);
  std::vector<double> v_next(S, 0.0);
  rec.q_min = std::numeric_limits<double>::infinity();
  rec.q_max = -std::numeric_limits<double>::infinity();
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double vs = 0.0;
      for (int a = 0; a < A; ++a) {
        const BoxSimplexMin opt =
            min_expected_value(emp.p_bar.row(h, s, a), radii.eps.row(h, s, a), v_next);
        const double value = c_hat(h, s, a) + opt.value;
        q(h, s, a) = value;
        vs += policy_.probs(h, s, a) * value;
        rec.q_min = std::min(rec.q_min, value);
        rec.q_max = std::max(rec.q_max, value);
      }
      v(h, s) = vs;
    }
    for (int s = 0; s < S; ++s) v_next[s] = v(h, s);
  }
  rec.value_estimate = v(0, initial_state_);
  rec.is_costs = is_costs.entries;

  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      omd_step_inplace(policy_.probs.row(h, s), q.row(h, s), stepsize_);

  if (config_.record_snapshots) {
    rec.q_snapshot = std::move(q);
    rec.v_snapshot = std::move(v);
    rec.u_snapshot = reach.u;
  }
  update_counters(counters_, trajectory);
  return rec;
}

RunResult run_pomd_known(const TabularModel& model, const AlgoConfig& config) {
  model.validate();
  config.validate(Algorithm::known, model.num_actions);
  const double stepsize =
      config.stepsize ? *config.stepsize
                      : default_stepsize_stochastic(model.num_actions, model.horizon,
                                                    config.num_episodes);
  RunResult out;
  out.algorithm = Algorithm::known;
  out.config = config;
  out.initial_state = model.initial_state;
  out.stepsize = stepsize;
  out.counters = Counters(model.horizon, model.num_states, model.num_actions);
  out.episodes.reserve(static_cast<std::size_t>(config.num_episodes));

  Policy policy = Policy::uniform(model.horizon, model.num_states, model.num_actions);
  for (std::int64_t k = 0; k < config.num_episodes; ++k) {
    ValueTables tables = evaluate_policy(model, policy);
    EpisodeRecord rec;
    rec.policy = policy;
    rec.value_estimate = tables.v(0, model.initial_state);
    rec.true_value = rec.value_estimate;
    const auto [mn, mx] =
        std::minmax_element(tables.q.data().begin(), tables.q.data().end());
    rec.q_min = *mn;
    rec.q_max = *mx;
    for (int h = 0; h < model.horizon; ++h)
      for (int s = 0; s < model.num_states; ++s)
        omd_step_inplace(policy.probs.row(h, s), tables.q.row(h, s), stepsize);
    if (config.record_snapshots) {
      rec.q_snapshot = std::move(tables.q);
      rec.v_snapshot = std::move(tables.v);
    }
    out.episodes.push_back(std::move(rec));
  }
  return out;
}

RunResult run_pomd_stochastic(const StochasticEnv& env, const AlgoConfig& config,
                              SplitRng& rng) {
  env.model.validate();
  const TabularModel& m = env.model;
  StochasticLearner learner(m.horizon, m.num_states, m.num_actions, m.initial_state,
                            config);
  RunResult out;
  out.algorithm = Algorithm::stochastic;
  out.config = config;
  out.initial_state = m.initial_state;
  out.stepsize = learner.stepsize();
  out.episodes.reserve(static_cast<std::size_t>(config.num_episodes));
  for (std::int64_t k = 0; k < config.num_episodes; ++k) {
    const Trajectory traj = sample_episode(env, learner.policy(), rng);
    const Policy played = learner.policy();
    EpisodeRecord rec = learner.observe(traj);
    rec.true_value = evaluate_policy(m, played).v(0, m.initial_state);
    out.episodes.push_back(std::move(rec));
  }
  out.counters = learner.counters();
  return out;
}

RunResult run_pomd_adversarial(const TabularModel& model, const CostSchedule& schedule,
                               const AlgoConfig& config, SplitRng& rng) {
  model.validate();
  if (schedule.num_episodes() < config.num_episodes)
    throw std::invalid_argument("run_pomd_adversarial: schedule shorter than the run");
  AdversarialLearner learner(model.horizon, model.num_states, model.num_actions,
                             model.initial_state, config);
  RunResult out;
  out.algorithm = Algorithm::adversarial;
  out.config = config;
  out.initial_state = model.initial_state;
  out.stepsize = learner.stepsize();
  out.gamma = learner.gamma();
  out.episodes.reserve(static_cast<std::size_t>(config.num_episodes));
  for (std::int64_t k = 1; k <= config.num_episodes; ++k) {
    const Tensor3 costs = schedule.table(static_cast<int>(k));
    const Trajectory traj = sample_episode(model, costs, learner.policy(), rng);
    const Policy played = learner.policy();
    EpisodeRecord rec = learner.observe(traj);
    rec.true_value =
        evaluate_policy(model.transitions, costs, played).v(0, model.initial_state);
    out.episodes.push_back(std::move(rec));
  }
  out.counters = learner.counters();
  return out;
}

}  // namespace pomd
