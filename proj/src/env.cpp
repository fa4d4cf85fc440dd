#include "pomd/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pomd {

namespace {

void check_cost_table(const Tensor3& t, const std::string& what) {
  if (t.empty()) throw std::invalid_argument(what + ": empty cost table");
  for (double c : t.data())
    if (!(c >= 0.0) || c > 1.0) throw std::invalid_argument(what + ": cost outside [0,1]");
}

nlohmann::json cost_table_to_json(const Tensor3& t) {
  nlohmann::json out = nlohmann::json::array();
  for (int h = 0; h < t.dim0(); ++h) {
    nlohmann::json jh = nlohmann::json::array();
    for (int s = 0; s < t.dim1(); ++s) {
      nlohmann::json js = nlohmann::json::array();
      for (int a = 0; a < t.dim2(); ++a) js.push_back(t(h, s, a));
      jh.push_back(std::move(js));
    }
    out.push_back(std::move(jh));
  }
  return out;
}

Tensor3 cost_table_from_json(const nlohmann::json& j) {
  const int H = static_cast<int>(j.size());
  if (H == 0) throw std::invalid_argument("schedule json: empty cost table");
  const int S = static_cast<int>(j.at(0).size());
  const int A = static_cast<int>(j.at(0).at(0).size());
  Tensor3 t(H, S, A);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(j.at(h).size()) != S ||
          static_cast<int>(j.at(h).at(s).size()) != A)
        throw std::invalid_argument("schedule json: ragged cost table");
      for (int a = 0; a < A; ++a) t(h, s, a) = j.at(h).at(s).at(a).get<double>();
    }
  return t;
}

const char* kind_name(CostSchedule::Kind k) {
  switch (k) {
    case CostSchedule::Kind::constant: return "constant";
    case CostSchedule::Kind::switching: return "switching";
    case CostSchedule::Kind::drifting: return "drifting";
  }
  throw std::invalid_argument("schedule: unknown kind");
}

CostSchedule::Kind kind_from_name(const std::string& name) {
  if (name == "constant") return CostSchedule::Kind::constant;
  if (name == "switching") return CostSchedule::Kind::switching;
  if (name == "drifting") return CostSchedule::Kind::drifting;
  throw std::invalid_argument("schedule: unknown kind '" + name + "'");
}

}  // namespace

void CostSchedule::check_tables() const {
  if (num_episodes_ < 1) throw std::invalid_argument("schedule: K must be >= 1");
  check_cost_table(table_a_, "schedule");
  if (kind_ != Kind::constant) {
    check_cost_table(table_b_, "schedule");
    if (table_a_.dim0() != table_b_.dim0() || table_a_.dim1() != table_b_.dim1() ||
        table_a_.dim2() != table_b_.dim2())
      throw std::invalid_argument("schedule: endpoint table shape mismatch");
  }
  if (kind_ == Kind::switching && period_ < 1)
    throw std::invalid_argument("schedule: switching period must be >= 1");
}

CostSchedule CostSchedule::constant(Tensor3 table, int num_episodes) {
  CostSchedule s;
  s.kind_ = Kind::constant;
  s.num_episodes_ = num_episodes;
  s.table_a_ = std::move(table);
  s.check_tables();
  return s;
}

CostSchedule CostSchedule::switching(Tensor3 table_a, Tensor3 table_b, int period,
                                     int num_episodes) {
  CostSchedule s;
  s.kind_ = Kind::switching;
  s.num_episodes_ = num_episodes;
  s.period_ = period;
  s.table_a_ = std::move(table_a);
  s.table_b_ = std::move(table_b);
  s.check_tables();
  return s;
}

CostSchedule CostSchedule::drifting(Tensor3 table_a, Tensor3 table_b, int num_episodes) {
  CostSchedule s;
  s.kind_ = Kind::drifting;
  s.num_episodes_ = num_episodes;
  s.table_a_ = std::move(table_a);
  s.table_b_ = std::move(table_b);
  s.check_tables();
  return s;
}

Tensor3 CostSchedule::table(int k) const {
  if (k < 1 || k > num_episodes_)
    throw std::invalid_argument("schedule: episode index out of range");
  if (!explicit_tables_.empty()) return explicit_tables_[k - 1];
  switch (kind_) {
    case Kind::constant:
      return table_a_;
    case Kind::switching:
      return ((k - 1) / period_) % 2 == 0 ? table_a_ : table_b_;
    case Kind::drifting: {
      const double t =
          num_episodes_ == 1 ? 0.0 : static_cast<double>(k - 1) / (num_episodes_ - 1);
      Tensor3 out(table_a_.dim0(), table_a_.dim1(), table_a_.dim2());
      for (std::size_t i = 0; i < out.data().size(); ++i)
        out.data()[i] = (1.0 - t) * table_a_.data()[i] + t * table_b_.data()[i];
      return out;
    }
  }
  throw std::invalid_argument("schedule: unknown kind");
}

nlohmann::json CostSchedule::to_json() const {
  nlohmann::json j{{"kind", kind_name(kind_)}, {"K", num_episodes_}};
  if (kind_ == Kind::switching) j["period"] = period_;
  if (kind_ == Kind::constant && explicit_tables_.empty()) {
    j["repeat"] = true;
    j["costs"] = nlohmann::json::array({cost_table_to_json(table_a_)});
  } else {
    nlohmann::json costs = nlohmann::json::array();
    for (int k = 1; k <= num_episodes_; ++k) costs.push_back(cost_table_to_json(table(k)));
    j["costs"] = std::move(costs);
  }
  return j;
}

CostSchedule CostSchedule::from_json(const nlohmann::json& j) {
  CostSchedule s;
  try {
    s.kind_ = kind_from_name(j.at("kind").get<std::string>());
    s.num_episodes_ = j.at("K").get<int>();
    if (j.contains("period")) s.period_ = j.at("period").get<int>();
    const auto& costs = j.at("costs");
    if (j.value("repeat", false)) {
      if (costs.size() != 1)
        throw std::invalid_argument("schedule json: repeat expects a single table");
      s.table_a_ = cost_table_from_json(costs.at(0));
    } else {
      if (static_cast<int>(costs.size()) != s.num_episodes_)
        throw std::invalid_argument("schedule json: costs length must equal K");
      for (const auto& jt : costs) {
        s.explicit_tables_.push_back(cost_table_from_json(jt));
        check_cost_table(s.explicit_tables_.back(), "schedule json");
      }
      s.table_a_ = s.explicit_tables_.front();
      if (s.explicit_tables_.size() > 1) s.table_b_ = s.explicit_tables_.back();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("schedule json: ") + e.what());
  }
  if (s.num_episodes_ < 1) throw std::invalid_argument("schedule json: K must be >= 1");
  check_cost_table(s.table_a_, "schedule json");
  if (s.kind_ == Kind::switching && s.period_ < 1)
    throw std::invalid_argument("schedule json: switching period must be >= 1");
  return s;
}

TabularModel make_random_mdp(int num_states, int num_actions, int horizon,
                             std::uint64_t seed) {
  if (num_states < 2 || num_actions < 1 || horizon < 1)
    throw std::invalid_argument("make_random_mdp: dimensions too small");
  SplitRng rng = SplitRng(seed).split(rng_stream::kEnvGeneration);
  TabularModel m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.horizon = horizon;
  m.initial_state = 0;
  m.transitions = Tensor4(horizon, num_states, num_actions, num_states);
  m.mean_costs = Tensor3(horizon, num_states, num_actions);
  std::vector<double> gaps(num_states);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states; ++s)
      for (int a = 0; a < num_actions; ++a) {
        // Dirichlet(1,...,1) row via normalized exponentials.
        double total = 0.0;
        for (int s2 = 0; s2 < num_states; ++s2) {
          gaps[s2] = -std::log(1.0 - rng.uniform01());
          total += gaps[s2];
        }
        if (total <= 0.0) {
          for (int s2 = 0; s2 < num_states; ++s2)
            m.transitions(h, s, a, s2) = 1.0 / num_states;
        } else {
          for (int s2 = 0; s2 < num_states; ++s2)
            m.transitions(h, s, a, s2) = gaps[s2] / total;
        }
        m.mean_costs(h, s, a) = rng.uniform01();
      }
  m.validate();
  return m;
}

TabularModel make_chain_mdp(int length, int horizon, double slip) {
  if (length < 2) throw std::invalid_argument("make_chain_mdp: length must be >= 2");
  if (horizon < 1) throw std::invalid_argument("make_chain_mdp: horizon must be >= 1");
  if (!(slip >= 0.0) || slip > 0.5)
    throw std::invalid_argument("make_chain_mdp: slip must lie in [0, 0.5]");
  const int S = length, A = 2, far = length - 1;
  TabularModel m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = horizon;
  m.initial_state = 0;
  m.transitions = Tensor4(horizon, S, A, S, 0.0);
  m.mean_costs = Tensor3(horizon, S, A, 1.0);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      const int fwd = s == far ? far : s + 1;
      const int back = s == 0 ? 0 : s - 1;
      m.transitions(h, s, 1, fwd) += 1.0 - slip;
      m.transitions(h, s, 1, back) += slip;
      m.transitions(h, s, 0, back) += 1.0 - slip;
      m.transitions(h, s, 0, fwd) += slip;
    }
    m.mean_costs(h, far, 1) = 0.0;
  }
  m.validate();
  return m;
}

CostSchedule make_adversarial_schedule(const TabularModel& model, int num_episodes,
                                       CostSchedule::Kind kind, int period,
                                       std::uint64_t seed) {
  model.validate();
  if (num_episodes < 1)
    throw std::invalid_argument("make_adversarial_schedule: K must be >= 1");
  if (kind == CostSchedule::Kind::constant)
    return CostSchedule::constant(model.mean_costs, num_episodes);
  SplitRng rng = SplitRng(seed).split(rng_stream::kSchedule);
  Tensor3 a(model.horizon, model.num_states, model.num_actions);
  Tensor3 b(model.horizon, model.num_states, model.num_actions);
  for (double& x : a.data()) x = rng.uniform01();
  for (double& x : b.data()) x = rng.uniform01();
  if (kind == CostSchedule::Kind::switching)
    return CostSchedule::switching(std::move(a), std::move(b), period, num_episodes);
  return CostSchedule::drifting(std::move(a), std::move(b), num_episodes);
}

namespace {

Trajectory rollout(const TabularModel& model, const Tensor3& costs, const Policy& policy,
                   SplitRng& rng, CostNoise noise) {
  const int H = model.horizon;
  if (policy.horizon() != H || policy.num_states() != model.num_states ||
      policy.num_actions() != model.num_actions)
    throw std::invalid_argument("sample_episode: policy shape mismatch");
  Trajectory traj;
  traj.steps.resize(H);
  int s = model.initial_state;
  for (int h = 0; h < H; ++h) {
    const int a = rng.sample_discrete(policy.probs.row(h, s));
    const int s2 = rng.sample_discrete(model.transitions.row(h, s, a));
    const double c = costs(h, s, a);
    double realized = c;
    if (noise == CostNoise::bernoulli) realized = rng.uniform01() < c ? 1.0 : 0.0;
    traj.steps[h] = {s, a, realized};
    s = s2;
  }
  traj.final_state = s;
  return traj;
}

}  // namespace

Trajectory sample_episode(const StochasticEnv& env, const Policy& policy, SplitRng& rng) {
  return rollout(env.model, env.model.mean_costs, policy, rng, env.noise);
}

Trajectory sample_episode(const TabularModel& model, const Tensor3& episode_costs,
                          const Policy& policy, SplitRng& rng) {
  if (episode_costs.dim0() != model.horizon || episode_costs.dim1() != model.num_states ||
      episode_costs.dim2() != model.num_actions)
    throw std::invalid_argument("sample_episode: cost table shape mismatch");
  return rollout(model, episode_costs, policy, rng, CostNoise::deterministic);
}

}  // namespace pomd
