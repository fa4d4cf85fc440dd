#include "pomd/optimism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pomd {

BonusTable stochastic_bonuses(const Count3& visits, std::int64_t num_episodes,
                              double delta_prime) {
  const int H = visits.dim0(), S = visits.dim1(), A = visits.dim2();
  if (H == 0) throw std::invalid_argument("stochastic_bonuses: empty visit counts");
  if (num_episodes < 1)
    throw std::invalid_argument("stochastic_bonuses: num_episodes must be >= 1");
  if (!(delta_prime > 0.0) || delta_prime >= 1.0)
    throw std::invalid_argument("stochastic_bonuses: delta_prime must lie in (0,1)");
  const double T = static_cast<double>(num_episodes) * H;
  const double log_cost = std::log(2.0 * S * A * H * T / delta_prime);
  const double log_trans = std::log(3.0 * S * A * H * T / delta_prime);
  BonusTable out{Tensor3(H, S, A), Tensor3(H, S, A), Tensor3(H, S, A)};
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double n = static_cast<double>(std::max<std::int64_t>(visits(h, s, a), 1));
        const double bc = std::sqrt(2.0 * log_cost / n);
        const double bpv = H * std::sqrt(4.0 * S * log_trans / n);
        out.cost_bonus(h, s, a) = bc;
        out.transition_bonus(h, s, a) = bpv;
        out.total(h, s, a) = bc + bpv;
      }
  return out;
}

ConfidenceRadii bernstein_radii(const EmpiricalModel& empirical, const Count3& visits,
                                std::int64_t num_episodes, double delta_prime) {
  const int H = visits.dim0(), S = visits.dim1(), A = visits.dim2();
  if (H == 0) throw std::invalid_argument("bernstein_radii: empty visit counts");
  if (empirical.p_bar.dim0() != H || empirical.p_bar.dim1() != S ||
      empirical.p_bar.dim2() != A || empirical.p_bar.dim3() != S)
    throw std::invalid_argument("bernstein_radii: empirical model shape mismatch");
  if (num_episodes < 1)
    throw std::invalid_argument("bernstein_radii: num_episodes must be >= 1");
  if (!(delta_prime > 0.0) || delta_prime >= 1.0)
    throw std::invalid_argument("bernstein_radii: delta_prime must lie in (0,1)");
  const double L =
      std::log(static_cast<double>(H) * S * A * static_cast<double>(num_episodes) /
               (4.0 * delta_prime));
  ConfidenceRadii out{Tensor4(H, S, A, S)};
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double nm1 =
            static_cast<double>(std::max<std::int64_t>(visits(h, s, a) - 1, 1));
        for (int s2 = 0; s2 < S; ++s2) {
          const double p = empirical.p_bar(h, s, a, s2);
          const double eps =
              2.0 * std::sqrt(p * (1.0 - p) * L / nm1) + 14.0 * L / (3.0 * nm1);
          out.eps(h, s, a, s2) = std::clamp(eps, 0.0, 1.0);
        }
      }
  return out;
}

BoxSimplexMin min_expected_value(std::span<const double> p_bar_row,
                                 std::span<const double> eps_row,
                                 std::span<const double> v_next) {
  const int n = static_cast<int>(p_bar_row.size());
  if (n == 0 || static_cast<int>(eps_row.size()) != n ||
      static_cast<int>(v_next.size()) != n)
    throw std::invalid_argument("min_expected_value: row length mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(p_bar_row[i] >= 0.0) || p_bar_row[i] > 1.0)
      throw std::invalid_argument("min_expected_value: p_bar entry outside [0,1]");
    if (!(eps_row[i] >= 0.0))
      throw std::invalid_argument("min_expected_value: negative radius");
  }

  BoxSimplexMin out;
  out.dist.resize(n);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    out.dist[i] = std::max(0.0, p_bar_row[i] - eps_row[i]);
    mass += out.dist[i];
  }
  double remaining = 1.0 - mass;
  if (remaining < -kSimplexTol)
    throw std::invalid_argument("min_expected_value: infeasible lower bounds");
  remaining = std::max(remaining, 0.0);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return v_next[i] < v_next[j]; });
  for (int i : order) {
    if (remaining <= 0.0) break;
    const double cap = std::min(1.0, p_bar_row[i] + eps_row[i]);
    const double add = std::min(remaining, cap - out.dist[i]);
    if (add > 0.0) {
      out.dist[i] += add;
      remaining -= add;
    }
  }
  if (remaining > kSimplexTol)
    throw std::invalid_argument("min_expected_value: infeasible upper bounds");

  out.value = 0.0;
  for (int i = 0; i < n; ++i) out.value += out.dist[i] * v_next[i];
  return out;
}

ReachUpperBound reach_upper_bounds(const Policy& policy, const EmpiricalModel& empirical,
                                   const ConfidenceRadii& radii, int initial_state) {
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  if (empirical.p_bar.dim0() != H || empirical.p_bar.dim1() != S ||
      empirical.p_bar.dim2() != A || empirical.p_bar.dim3() != S)
    throw std::invalid_argument("reach_upper_bounds: empirical model shape mismatch");
  if (radii.eps.dim0() != H || radii.eps.dim1() != S || radii.eps.dim2() != A ||
      radii.eps.dim3() != S)
    throw std::invalid_argument("reach_upper_bounds: radii shape mismatch");
  if (initial_state < 0 || initial_state >= S)
    throw std::invalid_argument("reach_upper_bounds: initial_state out of range");

  ReachUpperBound out{Tensor2(H, S, 0.0)};
  out.u(0, initial_state) = 1.0;
  for (int h = 0; h + 1 < H; ++h)
    for (int s2 = 0; s2 < S; ++s2) {
      double total = 0.0;
      for (int s = 0; s < S; ++s) {
        const double us = out.u(h, s);
        if (us == 0.0) continue;
        for (int a = 0; a < A; ++a) {
          const double p_hi =
              std::min(1.0, empirical.p_bar(h, s, a, s2) + radii.eps(h, s, a, s2));
          total += us * policy.probs(h, s, a) * p_hi;
        }
      }
      out.u(h + 1, s2) = std::min(1.0, total);
    }
  return out;
}

}  // namespace pomd
