#include "pomd/estimation.hpp"

#include <stdexcept>

namespace pomd {

void update_counters(Counters& counters, const Trajectory& trajectory) {
  const int H = counters.horizon(), S = counters.num_states(), A = counters.num_actions();
  if (static_cast<int>(trajectory.steps.size()) != H)
    throw std::invalid_argument("update_counters: trajectory length must equal horizon");
  for (int h = 0; h < H; ++h) {
    const TrajectoryStep& step = trajectory.steps[h];
    const int next = h + 1 < H ? trajectory.steps[h + 1].state : trajectory.final_state;
    if (step.state < 0 || step.state >= S || step.action < 0 || step.action >= A ||
        next < 0 || next >= S)
      throw std::invalid_argument("update_counters: state or action out of range");
    counters.visit(h, step.state, step.action) += 1;
    counters.transition(h, step.state, step.action, next) += 1;
    counters.cost_sum(h, step.state, step.action) += step.cost;
  }
  counters.episodes_seen += 1;
}

EmpiricalModel empirical_model(const Counters& counters) {
  const int H = counters.horizon(), S = counters.num_states(), A = counters.num_actions();
  if (H == 0) throw std::invalid_argument("empirical_model: empty counters");
  EmpiricalModel out{Tensor4(H, S, A, S, 0.0), Tensor3(H, S, A, 0.0),
                     Grid3<std::uint8_t>(H, S, A, 0)};
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const std::int64_t n = counters.visit(h, s, a);
        if (n == 0) {
          out.unvisited(h, s, a) = 1;
          continue;
        }
        const double inv = 1.0 / static_cast<double>(n);
        for (int s2 = 0; s2 < S; ++s2)
          out.p_bar(h, s, a, s2) = static_cast<double>(counters.transition(h, s, a, s2)) * inv;
        out.c_bar(h, s, a) = counters.cost_sum(h, s, a) * inv;
      }
  return out;
}

IsCostEstimate importance_sampled_costs(const Trajectory& trajectory,
                                        const Tensor2& reach_upper, const Policy& policy,
                                        double gamma) {
  if (gamma < 0.0)
    throw std::invalid_argument("importance_sampled_costs: gamma must be >= 0");
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  if (static_cast<int>(trajectory.steps.size()) != H)
    throw std::invalid_argument("importance_sampled_costs: trajectory length mismatch");
  if (reach_upper.dim0() != H || reach_upper.dim1() != S)
    throw std::invalid_argument("importance_sampled_costs: reach bound shape mismatch");
  IsCostEstimate out;
  out.entries.reserve(H);
  for (int h = 0; h < H; ++h) {
    const TrajectoryStep& step = trajectory.steps[h];
    if (step.state < 0 || step.state >= S || step.action < 0 || step.action >= A)
      throw std::invalid_argument("importance_sampled_costs: step out of range");
    const double denom =
        reach_upper(h, step.state) * policy.probs(h, step.state, step.action) + gamma;
    if (!(denom > 0.0))
      throw std::invalid_argument("importance_sampled_costs: zero denominator");
    out.entries.push_back({h, step.state, step.action, step.cost / denom});
  }
  return out;
}

}  // namespace pomd
