#pragma once

#include <utility>

#include <json.hpp>

#include "pomd/tensor.hpp"

namespace pomd {

/// Tolerance for rows that are constructed to lie on the simplex.
inline constexpr double kSimplexTol = 1e-12;

/// Finite-horizon tabular MDP with time-indexed dynamics. Steps run
/// h = 1..H (stored 0-based); transitions[h][s][a][s'] is the next-state
/// distribution, mean_costs[h][s][a] lies in [0,1], and every episode
/// starts at initial_state.
struct TabularModel {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int initial_state = 0;
  Tensor4 transitions;  // [H][S][A][S']
  Tensor3 mean_costs;   // [H][S][A]

  /// Throws std::invalid_argument when shapes, ranges, or simplex rows are off.
  void validate() const;

  nlohmann::json to_json() const;
  static TabularModel from_json(const nlohmann::json& j);
};

/// Time-indexed stochastic Markov policy; probs[h][s][a] rows are simplex rows.
struct Policy {
  Tensor3 probs;  // [H][S][A]

  int horizon() const { return probs.dim0(); }
  int num_states() const { return probs.dim1(); }
  int num_actions() const { return probs.dim2(); }

  static Policy uniform(int horizon, int num_states, int num_actions);
  void validate() const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Backward-recursion tables; v row h is the value at step h+1 (0-based),
/// with the terminal v_{H+1} = 0 left implicit.
struct ValueTables {
  Tensor3 q;  // [H][S][A]
  Tensor2 v;  // [H][S]
};

/// Occupancy of a policy under a kernel. state_occ has H+1 rows; the extra
/// final row is the state distribution after the last action. state_action_occ
/// has exactly H rows and satisfies w[h][s][a] = d[h][s] * pi_h(a|s).
struct OccupancyTables {
  Tensor2 state_occ;         // [H+1][S]
  Tensor3 state_action_occ;  // [H][S][A]
};

/// Exact policy evaluation by backward recursion:
///   q_h(s,a) = costs_h(s,a) + <transitions_h(.|s,a), v_{h+1}>,
///   v_h(s)   = <q_h(s,.), policy_h(.|s)>.
/// Cost entries may be any reals (range checks are the caller's business);
/// transition rows must be distributions.
ValueTables evaluate_policy(const Tensor4& transitions, const Tensor3& costs,
                            const Policy& policy);
ValueTables evaluate_policy(const TabularModel& model, const Policy& policy);

/// Optimal values by backward minimization; ties break toward the lowest
/// action index so the returned deterministic policy is unique.
std::pair<Policy, ValueTables> optimal_values(const TabularModel& model);

/// Forward occupancy recursion from the initial state.
OccupancyTables compute_occupancy(const Policy& policy, const Tensor4& transitions,
                                  int initial_state);

}  // namespace pomd
