#include "pomd/mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pomd {

namespace {

void check_simplex_row(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double x : row) {
    if (!(x >= 0.0)) throw std::invalid_argument(what + ": negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument(what + ": row does not sum to 1");
}

void check_policy_shapes(const Tensor4& transitions, const Tensor3& costs,
                         const Policy& policy) {
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  if (H <= 0 || S <= 0 || A <= 0)
    throw std::invalid_argument("evaluate_policy: empty policy");
  if (transitions.dim0() != H || transitions.dim1() != S || transitions.dim2() != A ||
      transitions.dim3() != S)
    throw std::invalid_argument("evaluate_policy: transition shape mismatch");
  if (costs.dim0() != H || costs.dim1() != S || costs.dim2() != A)
    throw std::invalid_argument("evaluate_policy: cost shape mismatch");
}

}  // namespace

void TabularModel::validate() const {
  if (num_states < 2) throw std::invalid_argument("model: num_states must be >= 2");
  if (num_actions < 1) throw std::invalid_argument("model: num_actions must be >= 1");
  if (horizon < 1) throw std::invalid_argument("model: horizon must be >= 1");
  if (initial_state < 0 || initial_state >= num_states)
    throw std::invalid_argument("model: initial_state out of range");
  if (transitions.dim0() != horizon || transitions.dim1() != num_states ||
      transitions.dim2() != num_actions || transitions.dim3() != num_states)
    throw std::invalid_argument("model: transition shape mismatch");
  if (mean_costs.dim0() != horizon || mean_costs.dim1() != num_states ||
      mean_costs.dim2() != num_actions)
    throw std::invalid_argument("model: cost shape mismatch");
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states; ++s)
      for (int a = 0; a < num_actions; ++a) {
        check_simplex_row(transitions.row(h, s, a),
                          "model: transitions[" + std::to_string(h) + "][" +
                              std::to_string(s) + "][" + std::to_string(a) + "]");
        const double c = mean_costs(h, s, a);
        if (!(c >= 0.0) || c > 1.0)
          throw std::invalid_argument("model: mean cost outside [0,1]");
      }
}

nlohmann::json TabularModel::to_json() const {
  nlohmann::json p = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (int h = 0; h < horizon; ++h) {
    nlohmann::json ph = nlohmann::json::array(), ch = nlohmann::json::array();
    for (int s = 0; s < num_states; ++s) {
      nlohmann::json ps = nlohmann::json::array(), cs = nlohmann::json::array();
      for (int a = 0; a < num_actions; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int s2 = 0; s2 < num_states; ++s2) row.push_back(transitions(h, s, a, s2));
        ps.push_back(std::move(row));
        cs.push_back(mean_costs(h, s, a));
      }
      ph.push_back(std::move(ps));
      ch.push_back(std::move(cs));
    }
    p.push_back(std::move(ph));
    c.push_back(std::move(ch));
  }
  return {{"S", num_states}, {"A", num_actions}, {"H", horizon},
          {"s1", initial_state}, {"p", std::move(p)}, {"c", std::move(c)}};
}

TabularModel TabularModel::from_json(const nlohmann::json& j) {
  TabularModel m;
  try {
    m.num_states = j.at("S").get<int>();
    m.num_actions = j.at("A").get<int>();
    m.horizon = j.at("H").get<int>();
    m.initial_state = j.at("s1").get<int>();
    if (m.num_states <= 0 || m.num_actions <= 0 || m.horizon <= 0)
      throw std::invalid_argument("model json: non-positive dimensions");
    m.transitions = Tensor4(m.horizon, m.num_states, m.num_actions, m.num_states);
    m.mean_costs = Tensor3(m.horizon, m.num_states, m.num_actions);
    const auto& p = j.at("p");
    const auto& c = j.at("c");
    for (int h = 0; h < m.horizon; ++h)
      for (int s = 0; s < m.num_states; ++s)
        for (int a = 0; a < m.num_actions; ++a) {
          const auto& row = p.at(h).at(s).at(a);
          if (static_cast<int>(row.size()) != m.num_states)
            throw std::invalid_argument("model json: transition row length mismatch");
          for (int s2 = 0; s2 < m.num_states; ++s2)
            m.transitions(h, s, a, s2) = row.at(s2).get<double>();
          m.mean_costs(h, s, a) = c.at(h).at(s).at(a).get<double>();
        }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model json: ") + e.what());
  }
  m.validate();
  return m;
}

Policy Policy::uniform(int horizon, int num_states, int num_actions) {
  if (horizon <= 0 || num_states <= 0 || num_actions <= 0)
    throw std::invalid_argument("Policy::uniform: non-positive dimensions");
  Policy pi;
  pi.probs = Tensor3(horizon, num_states, num_actions, 1.0 / num_actions);
  return pi;
}

void Policy::validate() const {
  if (probs.empty()) throw std::invalid_argument("policy: empty");
  for (int h = 0; h < horizon(); ++h)
    for (int s = 0; s < num_states(); ++s)
      check_simplex_row(probs.row(h, s), "policy: probs[" + std::to_string(h) + "][" +
                                             std::to_string(s) + "]");
}

ValueTables evaluate_policy(const Tensor4& transitions, const Tensor3& costs,
                            const Policy& policy) {
  check_policy_shapes(transitions, costs, policy);
  policy.validate();
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        check_simplex_row(transitions.row(h, s, a), "evaluate_policy: transition row");

  ValueTables out{Tensor3(H, S, A), Tensor2(H, S)};
  std::vector<double> v_next(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = costs(h, s, a);
        const auto row = transitions.row(h, s, a);
        for (int s2 = 0; s2 < S; ++s2) q += row[s2] * v_next[s2];
        out.q(h, s, a) = q;
        v += policy.probs(h, s, a) * q;
      }
      out.v(h, s) = v;
    }
    for (int s = 0; s < S; ++s) v_next[s] = out.v(h, s);
  }
  return out;
}

ValueTables evaluate_policy(const TabularModel& model, const Policy& policy) {
  return evaluate_policy(model.transitions, model.mean_costs, policy);
}

std::pair<Policy, ValueTables> optimal_values(const TabularModel& model) {
  model.validate();
  const int H = model.horizon, S = model.num_states, A = model.num_actions;
  Policy greedy;
  greedy.probs = Tensor3(H, S, A, 0.0);
  ValueTables out{Tensor3(H, S, A), Tensor2(H, S)};
  std::vector<double> v_next(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double best = std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = model.mean_costs(h, s, a);
        const auto row = model.transitions.row(h, s, a);
        for (int s2 = 0; s2 < S; ++s2) q += row[s2] * v_next[s2];
        out.q(h, s, a) = q;
        if (q < best) {
          best = q;
          best_a = a;
        }
      }
      out.v(h, s) = best;
      greedy.probs(h, s, best_a) = 1.0;
    }
    for (int s = 0; s < S; ++s) v_next[s] = out.v(h, s);
  }
  return {std::move(greedy), std::move(out)};
}

OccupancyTables compute_occupancy(const Policy& policy, const Tensor4& transitions,
                                  int initial_state) {
  policy.validate();
  const int H = policy.horizon(), S = policy.num_states(), A = policy.num_actions();
  if (transitions.dim0() != H || transitions.dim1() != S || transitions.dim2() != A ||
      transitions.dim3() != S)
    throw std::invalid_argument("compute_occupancy: transition shape mismatch");
  if (initial_state < 0 || initial_state >= S)
    throw std::invalid_argument("compute_occupancy: initial_state out of range");

  OccupancyTables out{Tensor2(H + 1, S, 0.0), Tensor3(H, S, A, 0.0)};
  out.state_occ(0, initial_state) = 1.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const double d = out.state_occ(h, s);
      if (d == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double w = d * policy.probs(h, s, a);
        out.state_action_occ(h, s, a) = w;
        if (w == 0.0) continue;
        const auto row = transitions.row(h, s, a);
        for (int s2 = 0; s2 < S; ++s2) out.state_occ(h + 1, s2) += w * row[s2];
      }
    }
  }
  return out;
}

}  // namespace pomd
