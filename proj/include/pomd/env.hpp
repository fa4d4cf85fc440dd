#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "pomd/mdp.hpp"
#include "pomd/rng.hpp"

namespace pomd {

/// How realized step costs are drawn around the mean table.
/// bernoulli: cost is 1 w.p. c and 0 otherwise (mean c, support {0,1}).
/// deterministic: cost equals the mean exactly.
enum class CostNoise { bernoulli, deterministic };

/// Sampling wrapper around a model for bandit-feedback interaction.
struct StochasticEnv {
  TabularModel model;
  CostNoise noise = CostNoise::bernoulli;
};

struct TrajectoryStep {
  int state = 0;
  int action = 0;
  double cost = 0.0;

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

/// One episode: exactly H steps plus the state reached after the last action.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  int final_state = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Episode-indexed cost tables c^k for the adversarial setting, k = 1..K.
/// constant repeats one table; switching alternates two tables in blocks of
/// `period` episodes; drifting interpolates linearly from table_a (k=1) to
/// table_b (k=K). Parsed explicit table lists are also supported so the
/// serialized form round-trips. Immutable once built: table(k) is pure.
class CostSchedule {
 public:
  enum class Kind { constant, switching, drifting };

  static CostSchedule constant(Tensor3 table, int num_episodes);
  static CostSchedule switching(Tensor3 table_a, Tensor3 table_b, int period,
                                int num_episodes);
  static CostSchedule drifting(Tensor3 table_a, Tensor3 table_b, int num_episodes);

  Kind kind() const { return kind_; }
  int num_episodes() const { return num_episodes_; }
  int period() const { return period_; }

  /// Cost table for 1-based episode k.
  Tensor3 table(int k) const;

  nlohmann::json to_json() const;
  static CostSchedule from_json(const nlohmann::json& j);

 private:
  CostSchedule() = default;
  void check_tables() const;

  Kind kind_ = Kind::constant;
  int num_episodes_ = 0;
  int period_ = 0;
  Tensor3 table_a_, table_b_;
  std::vector<Tensor3> explicit_tables_;  // non-empty only for parsed full lists
};

/// Seeded Dirichlet(1) transition rows and uniform [0,1] mean costs.
/// Identical (S, A, H, seed) gives a bitwise-identical model.
TabularModel make_random_mdp(int num_states, int num_actions, int horizon,
                             std::uint64_t seed);

/// Chain of `length` states starting at state 0 with two actions
/// (0 = back, 1 = forward). Forward advances w.p. 1-slip and regresses w.p.
/// slip (mirrored for back), reflecting at both ends. Every step costs 1.0
/// except (far state, forward) which costs 0, so for slip = 0 and
/// horizon >= length-1 the optimal value is length-1.
TabularModel make_chain_mdp(int length, int horizon, double slip);

/// Adversarial schedule over the model's shape. constant repeats the model's
/// own mean-cost table; switching/drifting draw their endpoint tables
/// uniformly from the seed's schedule stream.
CostSchedule make_adversarial_schedule(const TabularModel& model, int num_episodes,
                                       CostSchedule::Kind kind, int period,
                                       std::uint64_t seed);

/// Samples one episode; per step draws action, then next state, then cost
/// (bernoulli noise only) from `rng`, in that order.
Trajectory sample_episode(const StochasticEnv& env, const Policy& policy, SplitRng& rng);

/// Adversarial variant: realized costs are read from episode_costs verbatim.
Trajectory sample_episode(const TabularModel& model, const Tensor3& episode_costs,
                          const Policy& policy, SplitRng& rng);

}  // namespace pomd
