#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pomd/env.hpp"
#include "pomd/estimation.hpp"
#include "pomd/mdp.hpp"
#include "pomd/optimism.hpp"
#include "pomd/rng.hpp"

namespace pomd {

enum class Algorithm { known, stochastic, adversarial };

/// Shared knobs for the episodic loops. bonus_scale and radius_scale are
/// test hooks (1 = faithful run, 0 = ablated optimism); the radius hook
/// only shrinks radii of visited rows, unvisited rows keep the full simplex
/// so the confidence set stays feasible.
struct AlgoConfig {
  std::int64_t num_episodes = 0;  // K
  double delta = 0.1;
  std::optional<double> stepsize;  // t_K; per-algorithm default when absent
  std::optional<double> gamma;     // adversarial exploration; default when absent
  bool record_snapshots = false;   // keep full Q/V/u tables per episode
  double bonus_scale = 1.0;
  double radius_scale = 1.0;

  void validate(Algorithm algorithm, int num_actions) const;
};

/// One episode of a run. `policy` is the policy the episode was played
/// with; value_estimate is the learner's V^k_1(s1); true_value is the exact
/// value of that policy under this episode's cost table. q_min/q_max track
/// the learner's full Q table for boundedness checks. Snapshot fields are
/// filled only when AlgoConfig::record_snapshots is set (is_costs is always
/// kept in adversarial runs; it is one entry per step).
struct EpisodeRecord {
  Trajectory trajectory;
  Policy policy;
  double value_estimate = 0.0;
  double true_value = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  Tensor3 q_snapshot;
  Tensor2 v_snapshot;
  Tensor2 u_snapshot;
  std::vector<IsCostEstimate::Entry> is_costs;
};

/// Complete, gap-free record of one run: exactly K episode records in
/// order, final counters, and the parameters actually used.
struct RunResult {
  Algorithm algorithm = Algorithm::known;
  AlgoConfig config;
  int initial_state = 0;
  double stepsize = 0.0;
  double gamma = 0.0;  // adversarial runs only, else 0
  std::vector<EpisodeRecord> episodes;
  Counters counters;
};

/// Multiplicative-weights step dist'(a) = dist(a) exp(-t q(a)) / Z, computed
/// with the exponent shifted by min q for stability. t = 0 returns dist
/// unchanged; q entries must be finite and >= 0.
void omd_step_inplace(std::span<double> dist, std::span<const double> q_row,
                      double stepsize);
std::vector<double> omd_step(std::span<const double> dist, std::span<const double> q_row,
                             double stepsize);

/// sqrt(2 ln A / (H^2 K)); requires A >= 2.
double default_stepsize_stochastic(int num_actions, int horizon,
                                   std::int64_t num_episodes);

/// gamma = min(0.5, A^{-1/2} K^{-1/3}), t_K = sqrt(ln A) / (H K^{2/3});
/// requires A >= 2.
struct AdversarialParams {
  double gamma = 0.0;
  double stepsize = 0.0;
};
AdversarialParams default_params_adversarial(int num_actions, int horizon,
                                             std::int64_t num_episodes);

/// Optimistic learner for bandit feedback under a fixed cost table. Episode
/// k's evaluation uses counters from episodes 1..k-1 only:
///   Q^k = max(0, c_bar - bonus + <p_bar, V^k_{h+1}>),  V^k = <Q^k, pi_k>,
/// then every (h,s) row takes one OMD step on Q^k and the episode is added
/// to the counters. Policies are therefore a deterministic function of the
/// trajectory prefix, which observe()-replay tests rely on.
class StochasticLearner {
 public:
  StochasticLearner(int horizon, int num_states, int num_actions, int initial_state,
                    const AlgoConfig& config);

  const Policy& policy() const { return policy_; }
  const Counters& counters() const { return counters_; }
  double stepsize() const { return stepsize_; }

  EpisodeRecord observe(const Trajectory& trajectory);

 private:
  AlgoConfig config_;
  double stepsize_ = 0.0;
  double delta_prime_ = 0.0;
  int initial_state_ = 0;
  Policy policy_;
  Counters counters_;
};

/// Optimistic learner for adversarial costs: importance-sampled costs over
/// reach upper bounds plus the most optimistic kernel in a Bernstein
/// confidence set,
///   Q^k = c_hat + min_{p in set} <p, V^k_{h+1}>,  V^k = <Q^k, pi_k>.
class AdversarialLearner {
 public:
  AdversarialLearner(int horizon, int num_states, int num_actions, int initial_state,
                     const AlgoConfig& config);

  const Policy& policy() const { return policy_; }
  const Counters& counters() const { return counters_; }
  double stepsize() const { return stepsize_; }
  double gamma() const { return gamma_; }

  EpisodeRecord observe(const Trajectory& trajectory);

 private:
  AlgoConfig config_;
  double stepsize_ = 0.0;
  double gamma_ = 0.0;
  double delta_prime_ = 0.0;
  int initial_state_ = 0;
  Policy policy_;
  Counters counters_;
};

/// Exact-model mirror-descent loop: evaluate pi_k under the true model,
/// step every (h,s) row on Q^{pi_k}. No sampling, so records carry empty
/// trajectories and value_estimate == true_value.
RunResult run_pomd_known(const TabularModel& model, const AlgoConfig& config);

/// Bandit-feedback optimistic loop on a stochastic environment.
RunResult run_pomd_stochastic(const StochasticEnv& env, const AlgoConfig& config,
                              SplitRng& rng);

/// Bandit-feedback optimistic loop against an episode-indexed cost schedule.
RunResult run_pomd_adversarial(const TabularModel& model, const CostSchedule& schedule,
                               const AlgoConfig& config, SplitRng& rng);

}  // namespace pomd
