#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pomd/estimation.hpp"
#include "pomd/mdp.hpp"
#include "pomd/tensor.hpp"

namespace pomd {

/// Hoeffding-style exploration bonuses for the stochastic optimistic loop,
/// with T = K * H inside the logarithms:
///   cost_bonus       = sqrt(2 ln(2SAHT/delta') / max(n,1))
///   transition_bonus = H sqrt(4S ln(3SAHT/delta') / max(n,1))
/// total is their sum. Entries are positive and nonincreasing in n.
struct BonusTable {
  Tensor3 cost_bonus;
  Tensor3 transition_bonus;
  Tensor3 total;
};

BonusTable stochastic_bonuses(const Count3& visits, std::int64_t num_episodes,
                              double delta_prime);

/// Per-(h,s,a,s') empirical Bernstein radii, clipped to [0,1]:
///   eps = 2 sqrt(p_bar (1-p_bar) L / max(n-1,1)) + 14 L / (3 max(n-1,1)),
/// L = ln(H S A K / (4 delta')). With n <= 1 at the delta' values the
/// drivers use, the radius clips to 1 and the set is the full simplex.
struct ConfidenceRadii {
  Tensor4 eps;
};

ConfidenceRadii bernstein_radii(const EmpiricalModel& empirical, const Count3& visits,
                                std::int64_t num_episodes, double delta_prime);

/// Linear minimization over the box-constrained simplex
///   { p : sum p = 1, max(0, p_bar - eps) <= p <= min(1, p_bar + eps) }.
/// Greedy: start every coordinate at its lower bound, then pour the
/// remaining mass in nondecreasing v_next order (ties by state index).
struct BoxSimplexMin {
  std::vector<double> dist;
  double value = 0.0;
};

BoxSimplexMin min_expected_value(std::span<const double> p_bar_row,
                                 std::span<const double> eps_row,
                                 std::span<const double> v_next);

/// Dynamic-programming upper bound on reach probabilities under any kernel
/// in the confidence set: u[1] = indicator of the initial state and
///   u[h+1][s'] = min(1, sum_{s,a} u[h][s] pi_h(a|s) min(1, p_bar + eps)).
/// One row per step h = 1..H.
struct ReachUpperBound {
  Tensor2 u;  // [H][S]
};

ReachUpperBound reach_upper_bounds(const Policy& policy, const EmpiricalModel& empirical,
                                   const ConfidenceRadii& radii, int initial_state);

}  // namespace pomd
