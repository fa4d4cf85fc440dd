#include "pomd/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pomd {

double enumerate_optimal(const TabularModel& model) {
  model.validate();
  const int H = model.horizon, S = model.num_states, A = model.num_actions;
  const int slots = H * S;
  double combos = 1.0;
  for (int i = 0; i < slots; ++i) {
    combos *= A;
    if (combos > 1e6)
      throw std::invalid_argument("enumerate_optimal: A^(S*H) exceeds 1e6");
  }

  std::vector<int> choice(slots, 0);  // action for slot h*S + s
  std::vector<double> v(S), v_next(S);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::fill(v_next.begin(), v_next.end(), 0.0);
    for (int h = H - 1; h >= 0; --h) {
      for (int s = 0; s < S; ++s) {
        const int a = choice[h * S + s];
        double q = model.mean_costs(h, s, a);
        for (int s2 = 0; s2 < S; ++s2) q += model.transitions(h, s, a, s2) * v_next[s2];
        v[s] = q;
      }
      std::swap(v, v_next);
    }
    best = std::min(best, v_next[model.initial_state]);

    int pos = 0;
    while (pos < slots && ++choice[pos] == A) choice[pos++] = 0;
    if (pos == slots) break;
  }
  return best;
}

double check_extended_value_difference(const Policy& pi, const Policy& pi_prime,
                                       const TabularModel& model,
                                       const TabularModel& model_prime,
                                       const Tensor3& q_hat) {
  model.validate();
  model_prime.validate();
  const int H = model_prime.horizon, S = model_prime.num_states,
            A = model_prime.num_actions;
  if (model.horizon != H || model.num_states != S || model.num_actions != A)
    throw std::invalid_argument("check_extended_value_difference: model shape mismatch");
  if (pi.horizon() != H || pi.num_states() != S || pi.num_actions() != A ||
      pi_prime.horizon() != H || pi_prime.num_states() != S ||
      pi_prime.num_actions() != A)
    throw std::invalid_argument("check_extended_value_difference: policy shape mismatch");
  if (q_hat.dim0() != H || q_hat.dim1() != S || q_hat.dim2() != A)
    throw std::invalid_argument("check_extended_value_difference: q_hat shape mismatch");
  pi.validate();
  pi_prime.validate();

  // vhat rows h = 1..H+1 with the terminal row zero.
  Tensor2 vhat(H + 1, S, 0.0);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int a = 0; a < A; ++a) acc += q_hat(h, s, a) * pi.probs(h, s, a);
      vhat(h, s) = acc;
    }

  const int s1 = model_prime.initial_state;
  const OccupancyTables occ =
      compute_occupancy(pi_prime, model_prime.transitions, s1);
  const double lhs =
      vhat(0, s1) - evaluate_policy(model_prime, pi_prime).v(0, s1);

  double term_policy = 0.0, term_bellman = 0.0;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const double d = occ.state_occ(h, s);
      if (d == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        term_policy += d * q_hat(h, s, a) * (pi.probs(h, s, a) - pi_prime.probs(h, s, a));
        double bellman = q_hat(h, s, a) - model_prime.mean_costs(h, s, a);
        for (int s2 = 0; s2 < S; ++s2)
          bellman -= model_prime.transitions(h, s, a, s2) * vhat(h + 1, s2);
        term_bellman += d * pi_prime.probs(h, s, a) * bellman;
      }
    }
  return std::abs(lhs - term_policy - term_bellman);
}

namespace {

void require_run_shape(const RunResult& run, const TabularModel& truth) {
  truth.validate();
  if (run.episodes.empty()) throw std::invalid_argument("run: no episodes recorded");
  if (run.counters.horizon() != truth.horizon ||
      run.counters.num_states() != truth.num_states ||
      run.counters.num_actions() != truth.num_actions)
    throw std::invalid_argument("run: shape does not match the truth model");
}

}  // namespace

GoodEventReport good_event_report(const RunResult& run, const TabularModel& truth,
                                  double delta, Regime regime,
                                  const CostSchedule* schedule) {
  require_run_shape(run, truth);
  if (!(delta > 0.0) || delta >= 1.0)
    throw std::invalid_argument("good_event_report: delta must lie in (0,1)");
  if (regime == Regime::adversarial && schedule == nullptr)
    throw std::invalid_argument("good_event_report: adversarial regime needs the schedule");

  const int H = truth.horizon, S = truth.num_states, A = truth.num_actions;
  const auto num_episodes = static_cast<std::int64_t>(run.episodes.size());
  const double k_total = static_cast<double>(run.config.num_episodes);
  const double delta_prime = regime == Regime::stochastic ? delta / 3.0 : delta / 6.0;
  const double t_steps = k_total * H;
  const double log_cost = std::log(2.0 * S * A * H * t_steps / delta_prime);
  const double log_kernel = std::log(3.0 * S * A * H * t_steps / delta_prime);
  const double log_bernstein =
      std::log(static_cast<double>(H) * S * A * k_total / (4.0 * delta_prime));
  const double count_slack = H * std::log(S * A * H / delta_prime);
  const double is_threshold =
      regime == Regime::adversarial
          ? std::log(S * A * H * k_total / delta_prime) / (2.0 * run.gamma)
          : 0.0;

  GoodEventReport report;
  report.flag_cost.assign(num_episodes, 0);
  report.flag_kernel.assign(num_episodes, 0);
  report.flag_count.assign(num_episodes, 0);

  Counters counters(H, S, A);
  Tensor3 w_sum(H, S, A, 0.0);   // sum over past episodes of occupancy weights
  Tensor3 is_excess(H, S, A, 0.0);  // adversarial running IS excess

  for (std::int64_t k = 0; k < num_episodes; ++k) {
    const EpisodeRecord& rec = run.episodes[k];

    bool cost_bad = false, kernel_bad = false, count_bad = false;
    for (int h = 0; h < H && !(cost_bad && kernel_bad && count_bad); ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const std::int64_t n = counters.visit(h, s, a);
          const double n_or_1 = static_cast<double>(std::max<std::int64_t>(n, 1));
          const double c_bar = n > 0 ? counters.cost_sum(h, s, a) / n_or_1 : 0.0;
          if (regime == Regime::stochastic &&
              std::abs(truth.mean_costs(h, s, a) - c_bar) >=
                  std::sqrt(2.0 * log_cost / n_or_1))
            cost_bad = true;
          if (regime == Regime::stochastic) {
            double l1 = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
              const double p_bar =
                  n > 0 ? static_cast<double>(counters.transition(h, s, a, s2)) / n_or_1
                        : 0.0;
              l1 += std::abs(truth.transitions(h, s, a, s2) - p_bar);
            }
            if (l1 >= std::sqrt(4.0 * S * log_kernel / n_or_1)) kernel_bad = true;
          } else {
            const double nm1 = static_cast<double>(std::max<std::int64_t>(n - 1, 1));
            for (int s2 = 0; s2 < S; ++s2) {
              const double p_bar =
                  n > 0 ? static_cast<double>(counters.transition(h, s, a, s2)) / n_or_1
                        : 0.0;
              const double radius = std::min(
                  1.0, 2.0 * std::sqrt(p_bar * (1.0 - p_bar) * log_bernstein / nm1) +
                           14.0 * log_bernstein / (3.0 * nm1));
              if (std::abs(truth.transitions(h, s, a, s2) - p_bar) >= radius)
                kernel_bad = true;
            }
          }
          if (static_cast<double>(n) <= 0.5 * w_sum(h, s, a) - count_slack)
            count_bad = true;
        }

    const OccupancyTables occ =
        compute_occupancy(rec.policy, truth.transitions, run.initial_state);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) w_sum(h, s, a) += occ.state_action_occ(h, s, a);

    if (regime == Regime::adversarial) {
      if (rec.u_snapshot.empty())
        throw std::invalid_argument(
            "good_event_report: adversarial regime needs recorded u snapshots");
      const Tensor3 episode_costs = schedule->table(static_cast<int>(k) + 1);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
          const double d = occ.state_occ(h, s);
          const double u = rec.u_snapshot(h, s);
          const double ratio = d > 0.0 ? d / std::max(u, 1e-300) : 0.0;
          for (int a = 0; a < A; ++a)
            is_excess(h, s, a) -= ratio * rec.policy.probs(h, s, a) * episode_costs(h, s, a);
        }
      for (const IsCostEstimate::Entry& e : rec.is_costs)
        is_excess(e.h, e.state, e.action) += e.value;
      for (double x : is_excess.data())
        if (x >= is_threshold) cost_bad = true;
    }

    report.flag_cost[k] = cost_bad ? 1 : 0;
    report.flag_kernel[k] = kernel_bad ? 1 : 0;
    report.flag_count[k] = count_bad ? 1 : 0;
    report.violations_cost += cost_bad;
    report.violations_kernel += kernel_bad;
    report.violations_count += count_bad;

    update_counters(counters, rec.trajectory);
  }
  return report;
}

OptimismCheck check_optimism_stochastic(const RunResult& run, const TabularModel& truth) {
  require_run_shape(run, truth);
  const int H = truth.horizon, S = truth.num_states, A = truth.num_actions;
  OptimismCheck out;
  out.per_episode.reserve(run.episodes.size());
  for (const EpisodeRecord& rec : run.episodes) {
    if (rec.q_snapshot.empty() || rec.v_snapshot.empty())
      throw std::invalid_argument("check_optimism_stochastic: missing snapshots");
    std::int64_t bad = 0;
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          double target = truth.mean_costs(h, s, a);
          if (h + 1 < H)
            for (int s2 = 0; s2 < S; ++s2)
              target += truth.transitions(h, s, a, s2) * rec.v_snapshot(h + 1, s2);
          if (rec.q_snapshot(h, s, a) > target + 1e-10) ++bad;
        }
    out.per_episode.push_back(bad);
    out.total += bad;
  }
  return out;
}

OptimismCheck check_optimism_adversarial(const RunResult& run, const TabularModel& truth) {
  require_run_shape(run, truth);
  const int H = truth.horizon, S = truth.num_states, A = truth.num_actions;
  OptimismCheck out;
  out.per_episode.reserve(run.episodes.size());
  for (const EpisodeRecord& rec : run.episodes) {
    if (rec.v_snapshot.empty())
      throw std::invalid_argument("check_optimism_adversarial: missing snapshots");
    IsCostEstimate is;
    is.entries = rec.is_costs;
    const Tensor3 c_hat = is.dense(H, S, A);
    const ValueTables ref = evaluate_policy(truth.transitions, c_hat, rec.policy);
    std::int64_t bad = 0;
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        if (rec.v_snapshot(h, s) > ref.v(h, s) + 1e-10) ++bad;
    out.per_episode.push_back(bad);
    out.total += bad;
  }
  return out;
}

double check_omd_inequality(const std::vector<std::vector<double>>& q_history,
                            const std::vector<std::vector<double>>& pi_history,
                            std::span<const double> comparator, double stepsize,
                            double bound_scale) {
  const std::size_t rounds = q_history.size();
  if (pi_history.size() != rounds)
    throw std::invalid_argument("check_omd_inequality: history length mismatch");
  const std::size_t num_actions = comparator.size();
  if (num_actions == 0)
    throw std::invalid_argument("check_omd_inequality: empty comparator");
  if (!(stepsize > 0.0))
    throw std::invalid_argument("check_omd_inequality: stepsize must be positive");
  if (!(bound_scale > 0.0))
    throw std::invalid_argument("check_omd_inequality: bound_scale must be positive");
  double comp_sum = 0.0;
  for (double x : comparator) {
    if (!(x >= 0.0))
      throw std::invalid_argument("check_omd_inequality: comparator entry < 0");
    comp_sum += x;
  }
  if (std::abs(comp_sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("check_omd_inequality: comparator off the simplex");

  for (std::size_t k = 0; k < rounds; ++k) {
    if (q_history[k].size() != num_actions || pi_history[k].size() != num_actions)
      throw std::invalid_argument("check_omd_inequality: row length mismatch");
    for (double qv : q_history[k])
      if (!(qv >= 0.0) || qv > bound_scale + 1e-12)
        throw std::invalid_argument("check_omd_inequality: q outside [0, bound_scale]");
  }
  if (rounds > 0)
    for (double p : pi_history[0])
      if (std::abs(p - 1.0 / static_cast<double>(num_actions)) > kSimplexTol)
        throw std::invalid_argument("check_omd_inequality: history must start uniform");
  for (std::size_t k = 0; k + 1 < rounds; ++k) {
    const std::vector<double> replay = omd_step(pi_history[k], q_history[k], stepsize);
    for (std::size_t a = 0; a < num_actions; ++a)
      if (std::abs(replay[a] - pi_history[k + 1][a]) > 1e-12)
        throw std::invalid_argument(
            "check_omd_inequality: pi_history is not an omd_step replay");
  }

  double bound = std::log(static_cast<double>(num_actions)) / stepsize;
  double gain = 0.0;
  for (std::size_t k = 0; k < rounds; ++k)
    for (std::size_t a = 0; a < num_actions; ++a) {
      const double q = q_history[k][a], p = pi_history[k][a];
      bound += 0.5 * stepsize * p * q * q;
      gain += q * (p - comparator[a]);
    }
  return bound - gain;
}

double grid_min_oracle(std::span<const double> p_bar_row,
                       std::span<const double> eps_row, std::span<const double> v_next) {
  const int n = static_cast<int>(p_bar_row.size());
  if (n == 0 || static_cast<int>(eps_row.size()) != n ||
      static_cast<int>(v_next.size()) != n)
    throw std::invalid_argument("grid_min_oracle: row length mismatch");

  std::vector<int> free_idx;
  double fixed_mass = 0.0, fixed_value = 0.0;
  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = std::max(0.0, p_bar_row[i] - eps_row[i]);
    hi[i] = std::min(1.0, p_bar_row[i] + eps_row[i]);
    if (eps_row[i] > 0.0) {
      free_idx.push_back(i);
    } else {
      fixed_mass += p_bar_row[i];
      fixed_value += p_bar_row[i] * v_next[i];
    }
  }
  if (static_cast<int>(free_idx.size()) > 3)
    throw std::invalid_argument("grid_min_oracle: more than 3 free coordinates");

  constexpr double kStep = 0.01;
  constexpr double kFeasTol = 1e-9;
  double best = std::numeric_limits<double>::infinity();

  const auto close_last = [&](double mass_used, double value_used, int last) {
    const double rest = 1.0 - fixed_mass - mass_used;
    if (rest < lo[last] - kFeasTol || rest > hi[last] + kFeasTol) return;
    best = std::min(best, fixed_value + value_used + rest * v_next[last]);
  };

  const auto grid_points = [&](int i) {
    std::vector<double> pts;
    for (double x = lo[i]; x < hi[i] - 1e-12; x += kStep) pts.push_back(x);
    pts.push_back(hi[i]);
    return pts;
  };

  if (free_idx.empty()) {
    if (std::abs(1.0 - fixed_mass) > kFeasTol)
      throw std::invalid_argument("grid_min_oracle: fixed coordinates infeasible");
    return fixed_value;
  }
  if (free_idx.size() == 1) {
    close_last(0.0, 0.0, free_idx[0]);
  } else if (free_idx.size() == 2) {
    for (double x : grid_points(free_idx[0]))
      close_last(x, x * v_next[free_idx[0]], free_idx[1]);
  } else {
    for (double x : grid_points(free_idx[0]))
      for (double y : grid_points(free_idx[1]))
        close_last(x + y, x * v_next[free_idx[0]] + y * v_next[free_idx[1]],
                   free_idx[2]);
  }
  if (!std::isfinite(best))
    throw std::invalid_argument("grid_min_oracle: no feasible grid point");
  return best;
}

MonteCarloValue monte_carlo_value(const StochasticEnv& env, const Policy& policy,
                                  std::int64_t num_rollouts, SplitRng& rng) {
  if (num_rollouts < 2)
    throw std::invalid_argument("monte_carlo_value: need at least 2 rollouts");
  env.model.validate();
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < num_rollouts; ++i) {
    const Trajectory traj = sample_episode(env, policy, rng);
    double total = 0.0;
    for (const TrajectoryStep& step : traj.steps) total += step.cost;
    sum += total;
    sum_sq += total * total;
  }
  MonteCarloValue out;
  const double n = static_cast<double>(num_rollouts);
  out.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace pomd
