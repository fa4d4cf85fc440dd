#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pomd/algorithms.hpp"
#include "pomd/env.hpp"
#include "pomd/mdp.hpp"

namespace pomd {

/// Brute-force optimal value: enumerates every deterministic Markov policy
/// (A^(S*H) <= 1e6 guarded) and evaluates each with its own backward
/// recursion, sharing no code with optimal_values.
double enumerate_optimal(const TabularModel& model);

/// Residual of the extended value-difference identity
///   vhat_1(s1) - V_1^{pi',M'}(s1)
///     = sum_h E_{pi',p'}[<qhat_h(s_h,.), pi_h(.|s_h) - pi'_h(.|s_h)>]
///     + sum_h E_{pi',p'}[qhat_h(s_h,a_h) - c'_h(s_h,a_h) - <p'_h(.|s_h,a_h), vhat_{h+1}>]
/// where vhat_h(s) = <qhat_h(s,.), pi_h(.|s)> and both expectations run over
/// the occupancy of pi' in M'. `model` only fixes shapes; qhat is arbitrary.
double check_extended_value_difference(const Policy& pi, const Policy& pi_prime,
                                       const TabularModel& model,
                                       const TabularModel& model_prime,
                                       const Tensor3& q_hat);

enum class Regime { stochastic, adversarial };

/// Per-episode concentration flags against the ground-truth model. The flag
/// for episode k tests the estimators episode k consumed (counters through
/// k-1), except the adversarial cost flag, which is a running-sum event
/// inclusive of episode k. Stochastic regime (delta' = delta/3, T = K H):
///   cost:   |c - c_bar| >= sqrt(2 ln(2SAHT/delta') / max(n,1))
///   kernel: ||p - p_bar||_1 >= sqrt(4 S ln(3SAHT/delta') / max(n,1))
///   count:  n <= 1/2 sum_{j<k} w_j - H ln(SAH/delta')
/// Adversarial regime (delta' = delta/6): kernel flags use the per-entry
/// Bernstein radius, count as above, and cost flags the cumulative
/// importance-sampling excess sum_{j<=k} (c_hat - (d/u) c^j) against
/// ln(SAHK/delta') / (2 gamma); this needs the schedule and recorded u
/// snapshots.
struct GoodEventReport {
  std::vector<std::uint8_t> flag_cost;
  std::vector<std::uint8_t> flag_kernel;
  std::vector<std::uint8_t> flag_count;
  std::int64_t violations_cost = 0;
  std::int64_t violations_kernel = 0;
  std::int64_t violations_count = 0;

  bool any(std::size_t episode_index) const {
    return flag_cost[episode_index] || flag_kernel[episode_index] ||
           flag_count[episode_index];
  }
};

GoodEventReport good_event_report(const RunResult& run, const TabularModel& truth,
                                  double delta, Regime regime,
                                  const CostSchedule* schedule = nullptr);

/// Optimism violations recomputed from snapshots against the truth.
/// Stochastic: counts (k,h,s,a) with Q^k > c + <p, V^k_{h+1}> + 1e-10.
/// Adversarial: counts (k,h,s) with V^k_h(s) > V_h^{pi_k,p,c_hat}(s) + 1e-10,
/// the right side evaluated under the true kernel and the episode's
/// importance-sampled costs. Both require recorded snapshots.
struct OptimismCheck {
  std::vector<std::int64_t> per_episode;
  std::int64_t total = 0;
};

OptimismCheck check_optimism_stochastic(const RunResult& run, const TabularModel& truth);
OptimismCheck check_optimism_adversarial(const RunResult& run, const TabularModel& truth);

/// Fundamental mirror-descent inequality for one (h,s) row. Verifies that
/// pi_history starts uniform and replays through omd_step on q_history,
/// that q entries lie in [0, bound_scale], then returns
///   (ln A / t + t/2 sum_k sum_a pi_k(a) q_k(a)^2) - sum_k <q_k, pi_k - comparator>,
/// which must be >= -1e-9 for the inequality to hold.
double check_omd_inequality(const std::vector<std::vector<double>>& q_history,
                            const std::vector<std::vector<double>>& pi_history,
                            std::span<const double> comparator, double stepsize,
                            double bound_scale);

/// Grid reference for min_expected_value: exhaustive 0.01-step search over
/// the free coordinates (radius > 0; at most 3 of them) of the
/// box-constrained simplex. Returns the best feasible grid value.
double grid_min_oracle(std::span<const double> p_bar_row,
                       std::span<const double> eps_row, std::span<const double> v_next);

/// Monte Carlo estimate of a policy's expected total episode cost.
struct MonteCarloValue {
  double mean = 0.0;
  double std_error = 0.0;
};

MonteCarloValue monte_carlo_value(const StochasticEnv& env, const Policy& policy,
                                  std::int64_t num_rollouts, SplitRng& rng);

}  // namespace pomd
