#pragma once

#include <cstdint>
#include <vector>

#include "pomd/env.hpp"
#include "pomd/mdp.hpp"
#include "pomd/tensor.hpp"

namespace pomd {

/// Visit, transition, and cost-sum accumulators. Invariant after each
/// update: sum_{s'} transition[h][s][a][s'] == visit[h][s][a], and each
/// episode adds exactly one visit per step h.
struct Counters {
  Count3 visit;        // n[h][s][a]
  Count4 transition;   // m[h][s][a][s']
  Tensor3 cost_sum;    // running sum of realized costs
  std::int64_t episodes_seen = 0;

  Counters() = default;
  Counters(int horizon, int num_states, int num_actions)
      : visit(horizon, num_states, num_actions),
        transition(horizon, num_states, num_actions, num_states),
        cost_sum(horizon, num_states, num_actions) {}

  int horizon() const { return visit.dim0(); }
  int num_states() const { return visit.dim1(); }
  int num_actions() const { return visit.dim2(); }

  friend bool operator==(const Counters&, const Counters&) = default;
};

/// Adds one episode to the counters in place.
void update_counters(Counters& counters, const Trajectory& trajectory);

/// Per-(h,s,a) means with the n-or-1 convention: p_bar = m / max(n,1),
/// c_bar = cost_sum / max(n,1). Rows with n = 0 stay all-zero and are
/// flagged in `unvisited` rather than being imputed.
struct EmpiricalModel {
  Tensor4 p_bar;            // [H][S][A][S']
  Tensor3 c_bar;            // [H][S][A]
  Grid3<std::uint8_t> unvisited;  // 1 where n == 0
};

EmpiricalModel empirical_model(const Counters& counters);

/// Importance-sampled cost estimate for one episode: nonzero only at the H
/// visited (h, s, a) triples, where the entry is
///   realized cost / (u[h][s] * pi_h(a|s) + gamma).
struct IsCostEstimate {
  struct Entry {
    int h = 0;
    int state = 0;
    int action = 0;
    double value = 0.0;
  };
  std::vector<Entry> entries;  // one per step, ordered by h

  /// Value at (h, s, a); zero off the trajectory.
  double value(int h, int s, int a) const {
    for (const Entry& e : entries)
      if (e.h == h && e.state == s && e.action == a) return e.value;
    return 0.0;
  }

  Tensor3 dense(int horizon, int num_states, int num_actions) const {
    Tensor3 out(horizon, num_states, num_actions, 0.0);
    for (const Entry& e : entries) out(e.h, e.state, e.action) = e.value;
    return out;
  }
};

/// reach_upper holds one row per step h = 1..H of upper bounds on the
/// visit probability of each state. gamma >= 0; gamma = 0 is reserved for
/// test oracles (the adversarial driver always passes gamma in (0,1)).
IsCostEstimate importance_sampled_costs(const Trajectory& trajectory,
                                        const Tensor2& reach_upper, const Policy& policy,
                                        double gamma);

}  // namespace pomd
