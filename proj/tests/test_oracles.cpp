#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "pomd/algorithms.hpp"
#include "pomd/env.hpp"
#include "pomd/estimation.hpp"
#include "pomd/mdp.hpp"
#include "pomd/optimism.hpp"
#include "pomd/oracles.hpp"
#include "pomd/rng.hpp"

namespace {

using namespace pomd;

TabularModel constant_cost_model(int S, int A, int H, double cost) {
  TabularModel m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = H;
  m.initial_state = 0;
  m.transitions = Tensor4(H, S, A, S, 1.0 / S);
  m.mean_costs = Tensor3(H, S, A, cost);
  return m;
}

Policy random_policy(int H, int S, int A, SplitRng& rng) {
  Policy pi = Policy::uniform(H, S, A);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      double z = 0.0;
      for (int a = 0; a < A; ++a) {
        const double w = std::exp(rng.uniform01() * 2.0);
        pi.probs(h, s, a) = w;
        z += w;
      }
      for (int a = 0; a < A; ++a) pi.probs(h, s, a) /= z;
    }
  return pi;
}

RunResult stochastic_run(const TabularModel& model, std::int64_t k, std::uint64_t seed,
                         double bonus_scale = 1.0, bool snapshots = true,
                         CostNoise noise = CostNoise::bernoulli) {
  StochasticEnv env{model, noise};
  AlgoConfig config;
  config.num_episodes = k;
  config.delta = 0.1;
  config.record_snapshots = snapshots;
  config.bonus_scale = bonus_scale;
  SplitRng rng(seed);
  SplitRng episodes = rng.split(rng_stream::kEpisodes);
  return run_pomd_stochastic(env, config, episodes);
}

RunResult adversarial_run(const TabularModel& model, const CostSchedule& schedule,
                          std::int64_t k, std::uint64_t seed,
                          double radius_scale = 1.0, bool snapshots = true) {
  AlgoConfig config;
  config.num_episodes = k;
  config.delta = 0.1;
  config.record_snapshots = snapshots;
  config.radius_scale = radius_scale;
  SplitRng rng(seed);
  SplitRng episodes = rng.split(rng_stream::kEpisodes);
  return run_pomd_adversarial(model, schedule, config, episodes);
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("enumerate_optimal: single-action models equal plain evaluation") {
  const TabularModel model = make_random_mdp(3, 1, 3, 11);
  const Policy only = Policy::uniform(3, 3, 1);
  const double v = evaluate_policy(model, only).v(0, model.initial_state);
  CHECK(enumerate_optimal(model) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("enumerate_optimal: constant costs give H times the cost") {
  const TabularModel model = constant_cost_model(2, 2, 4, 0.3);
  CHECK(enumerate_optimal(model) == doctest::Approx(4 * 0.3).epsilon(1e-13));
}

TEST_CASE("enumerate_optimal: agrees with backward minimization on tiny instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TabularModel model = make_random_mdp(2, 2, 2, seed);
    const auto [pi_star, tables] = optimal_values(model);
    const double brute = enumerate_optimal(model);
    CHECK(std::abs(brute - tables.v(0, model.initial_state)) <= 1e-12);
  }
}

TEST_CASE("enumerate_optimal: rejects instances with too many policies") {
  // 3^(5*5) deterministic policies is far beyond the 1e6 enumeration cap.
  const TabularModel model = make_random_mdp(5, 3, 5, 1);
  CHECK_THROWS_AS(enumerate_optimal(model), std::invalid_argument);
}

TEST_CASE("extended value difference: identical arguments with exact Q") {
  const TabularModel model = make_random_mdp(3, 2, 3, 5);
  const Policy pi = Policy::uniform(3, 3, 2);
  const ValueTables tables = evaluate_policy(model, pi);
  CHECK(check_extended_value_difference(pi, pi, model, model, tables.q) <= 1e-12);
}

TEST_CASE("extended value difference: same model, different policies, exact Q") {
  SplitRng rng(31);
  const TabularModel model = make_random_mdp(3, 2, 4, 7);
  const Policy pi = random_policy(4, 3, 2, rng);
  const Policy pi_prime = random_policy(4, 3, 2, rng);
  const ValueTables tables = evaluate_policy(model, pi);
  CHECK(check_extended_value_difference(pi, pi_prime, model, model, tables.q) <= 1e-10);
}

TEST_CASE("extended value difference: random tuples satisfy the identity") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SplitRng rng(seed);
    const int H = 3, S = 3, A = 2;
    const TabularModel model = make_random_mdp(S, A, H, seed);
    const TabularModel model_prime = make_random_mdp(S, A, H, seed + 1000);
    const Policy pi = random_policy(H, S, A, rng);
    const Policy pi_prime = random_policy(H, S, A, rng);
    Tensor3 q_hat(H, S, A);
    for (double& x : q_hat.data()) x = rng.uniform01() * H;
    CHECK(check_extended_value_difference(pi, pi_prime, model, model_prime, q_hat) <=
          1e-9);
  }
}

TEST_CASE("extended value difference: shape mismatches are rejected") {
  const TabularModel model = make_random_mdp(3, 2, 3, 5);
  const TabularModel other = make_random_mdp(2, 2, 3, 5);
  const Policy pi = Policy::uniform(3, 3, 2);
  const Tensor3 q(3, 3, 2, 0.0);
  CHECK_THROWS_AS(check_extended_value_difference(pi, pi, model, other, q),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      check_extended_value_difference(pi, pi, model, model, Tensor3(3, 3, 3, 0.0)),
      std::invalid_argument);
}

TEST_CASE("good event report: episode one has no flags") {
  const TabularModel model = make_random_mdp(3, 2, 3, 9);
  const RunResult run = stochastic_run(model, 1, 42);
  const GoodEventReport report = good_event_report(run, model, 0.1, Regime::stochastic);
  REQUIRE(report.flag_cost.size() == 1);
  CHECK(report.flag_cost[0] == 0);
  CHECK(report.flag_kernel[0] == 0);
  CHECK(report.flag_count[0] == 0);
  CHECK(report.violations_cost == 0);
  CHECK(report.violations_kernel == 0);
  CHECK(report.violations_count == 0);
  CHECK_FALSE(report.any(0));
}

TEST_CASE("good event report: fabricated costs far from the mean trip the cost flag") {
  // Deterministic two-state hop with true mean cost 0; every fabricated
  // episode records a realized cost of 1, so c_bar pins at 1 while the
  // Hoeffding band shrinks like 1/sqrt(n).
  TabularModel truth;
  truth.num_states = 2;
  truth.num_actions = 1;
  truth.horizon = 1;
  truth.initial_state = 0;
  truth.transitions = Tensor4(1, 2, 1, 2, 0.0);
  truth.transitions(0, 0, 0, 1) = 1.0;
  truth.transitions(0, 1, 0, 1) = 1.0;
  truth.mean_costs = Tensor3(1, 2, 1, 0.0);
  truth.validate();

  const std::int64_t k_total = 120;
  EpisodeRecord rec;
  rec.trajectory.steps = {TrajectoryStep{0, 0, 1.0}};
  rec.trajectory.final_state = 1;
  rec.policy = Policy::uniform(1, 2, 1);

  RunResult run;
  run.algorithm = Algorithm::stochastic;
  run.config.num_episodes = k_total;
  run.config.delta = 0.1;
  run.initial_state = 0;
  run.counters = Counters(1, 2, 1);
  run.episodes.assign(k_total, rec);

  const GoodEventReport report = good_event_report(run, truth, 0.1, Regime::stochastic);
  CHECK(report.violations_cost > 0);
  // The recorded transitions match the true kernel exactly and the single
  // visited pair is visited every episode, so only the cost event trips.
  CHECK(report.violations_kernel == 0);
  CHECK(report.violations_count == 0);
  // Early episodes are inside the wide band; late ones are flagged.
  CHECK(report.flag_cost.front() == 0);
  CHECK(report.flag_cost.back() == 1);
  CHECK(report.any(k_total - 1));
}

TEST_CASE("good event report: argument contracts") {
  const TabularModel model = make_random_mdp(2, 2, 2, 3);
  const RunResult run = stochastic_run(model, 2, 1);
  CHECK_THROWS_AS(good_event_report(run, model, 0.0, Regime::stochastic),
                  std::invalid_argument);
  CHECK_THROWS_AS(good_event_report(run, model, 1.0, Regime::stochastic),
                  std::invalid_argument);
  CHECK_THROWS_AS(good_event_report(run, model, 0.1, Regime::adversarial, nullptr),
                  std::invalid_argument);
  RunResult empty;
  empty.counters = Counters(2, 2, 2);
  CHECK_THROWS_AS(good_event_report(empty, model, 0.1, Regime::stochastic),
                  std::invalid_argument);
}

TEST_CASE("optimism (stochastic): faithful bonuses never overshoot the true backup") {
  const TabularModel model = make_random_mdp(3, 2, 3, 17);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RunResult run = stochastic_run(model, 150, seed);
    const GoodEventReport report =
        good_event_report(run, model, 0.1, Regime::stochastic);
    const OptimismCheck check = check_optimism_stochastic(run, model);
    REQUIRE(check.per_episode.size() == run.episodes.size());
    for (std::size_t k = 0; k < run.episodes.size(); ++k)
      if (!report.any(static_cast<std::int64_t>(k))) CHECK(check.per_episode[k] == 0);
  }
}

TEST_CASE("optimism (stochastic): ablating the bonuses produces violations") {
  const TabularModel model = make_random_mdp(3, 2, 3, 17);
  std::int64_t total = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    total += check_optimism_stochastic(stochastic_run(model, 400, seed, 0.0), model).total;
  CHECK(total > 0);
}

TEST_CASE("optimism (stochastic): missing snapshots are rejected") {
  const TabularModel model = make_random_mdp(2, 2, 2, 3);
  const RunResult run = stochastic_run(model, 3, 1, 1.0, false);
  CHECK_THROWS_AS(check_optimism_stochastic(run, model), std::invalid_argument);
}

TEST_CASE("optimism (adversarial): in-set episodes never overshoot") {
  const TabularModel model = make_random_mdp(3, 2, 3, 23);
  const CostSchedule schedule =
      make_adversarial_schedule(model, 150, CostSchedule::Kind::switching, 40, 5);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RunResult run = adversarial_run(model, schedule, 150, seed);
    const GoodEventReport report =
        good_event_report(run, model, 0.1, Regime::adversarial, &schedule);
    const OptimismCheck check = check_optimism_adversarial(run, model);
    REQUIRE(check.per_episode.size() == run.episodes.size());
    for (std::size_t k = 0; k < run.episodes.size(); ++k)
      if (!report.flag_kernel[k]) CHECK(check.per_episode[k] == 0);
  }
}

TEST_CASE("optimism (adversarial): collapsing the radii produces violations") {
  const TabularModel model = make_random_mdp(3, 2, 3, 23);
  const CostSchedule schedule =
      make_adversarial_schedule(model, 300, CostSchedule::Kind::switching, 75, 5);
  std::int64_t total = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    total += check_optimism_adversarial(adversarial_run(model, schedule, 300, seed, 0.0),
                                        model)
                 .total;
  CHECK(total > 0);
}

TEST_CASE("optimism (adversarial): missing snapshots are rejected") {
  const TabularModel model = make_random_mdp(2, 2, 2, 3);
  const CostSchedule schedule =
      make_adversarial_schedule(model, 3, CostSchedule::Kind::constant, 0, 1);
  const RunResult run = adversarial_run(model, schedule, 3, 1, 1.0, false);
  CHECK_THROWS_AS(check_optimism_adversarial(run, model), std::invalid_argument);
}

TEST_CASE("omd inequality: empty history leaves only the entropy term") {
  const std::vector<double> comparator = {0.5, 0.5};
  const double residual = check_omd_inequality({}, {}, comparator, 0.7, 1.0);
  CHECK(residual == doctest::Approx(std::log(2.0) / 0.7).epsilon(1e-14));
}

TEST_CASE("omd inequality: one uniform round against the uniform comparator") {
  const std::vector<std::vector<double>> q = {{0.3, 0.3}};
  const std::vector<std::vector<double>> pi = {{0.5, 0.5}};
  const std::vector<double> comparator = {0.5, 0.5};
  const double t = 0.9;
  const double residual = check_omd_inequality(q, pi, comparator, t, 1.0);
  const double expected = std::log(2.0) / t + 0.5 * t * (0.5 * 0.09 + 0.5 * 0.09);
  CHECK(residual == doctest::Approx(expected).epsilon(1e-13));
  CHECK(residual >= 0.0);
}

TEST_CASE("omd inequality: replayed learner histories respect the bound") {
  const TabularModel model = make_random_mdp(3, 2, 3, 29);
  const auto [pi_star, tables] = optimal_values(model);
  // A small bonus scale lifts Q off the clip so the policies actually move.
  const RunResult run = stochastic_run(model, 60, 3, 0.05);
  for (int h = 0; h < model.horizon; ++h)
    for (int s = 0; s < model.num_states; ++s) {
      std::vector<std::vector<double>> q_history, pi_history;
      for (const EpisodeRecord& rec : run.episodes) {
        std::vector<double> q_row(model.num_actions), pi_row(model.num_actions);
        for (int a = 0; a < model.num_actions; ++a) {
          q_row[a] = rec.q_snapshot(h, s, a);
          pi_row[a] = rec.policy.probs(h, s, a);
        }
        q_history.push_back(std::move(q_row));
        pi_history.push_back(std::move(pi_row));
      }
      std::vector<double> comparator(model.num_actions);
      for (int a = 0; a < model.num_actions; ++a) comparator[a] = pi_star.probs(h, s, a);
      const double residual = check_omd_inequality(q_history, pi_history, comparator,
                                                   run.stepsize, model.horizon);
      CHECK(residual >= -1e-9);
    }
}

TEST_CASE("omd inequality: argument contracts") {
  const std::vector<std::vector<double>> q = {{0.2, 0.6}, {0.1, 0.4}};
  const std::vector<double> uniform2 = {0.5, 0.5};
  std::vector<std::vector<double>> pi = {uniform2, omd_step(uniform2, q[0], 0.8)};
  const std::vector<double> comparator = {1.0, 0.0};
  CHECK(check_omd_inequality(q, pi, comparator, 0.8, 1.0) >= -1e-9);

  // Tampered second iterate is not an omd_step replay.
  std::vector<std::vector<double>> tampered = pi;
  tampered[1] = {0.5, 0.5};
  CHECK_THROWS_AS(check_omd_inequality(q, tampered, comparator, 0.8, 1.0),
                  std::invalid_argument);
  // Histories of different lengths.
  CHECK_THROWS_AS(check_omd_inequality(q, {pi[0]}, comparator, 0.8, 1.0),
                  std::invalid_argument);
  // First iterate must be uniform.
  std::vector<std::vector<double>> skewed = pi;
  skewed[0] = {0.9, 0.1};
  CHECK_THROWS_AS(check_omd_inequality(q, skewed, comparator, 0.8, 1.0),
                  std::invalid_argument);
  // Q outside [0, bound_scale].
  CHECK_THROWS_AS(check_omd_inequality({{-0.1, 0.0}}, {pi[0]}, comparator, 0.8, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_omd_inequality({{0.2, 2.0}}, {pi[0]}, comparator, 0.8, 1.0),
                  std::invalid_argument);
  // Bad scalars and comparators.
  CHECK_THROWS_AS(check_omd_inequality(q, pi, comparator, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_omd_inequality(q, pi, comparator, 0.8, 0.0),
                  std::invalid_argument);
  const std::vector<double> off_simplex = {0.7, 0.7};
  CHECK_THROWS_AS(check_omd_inequality(q, pi, off_simplex, 0.8, 1.0),
                  std::invalid_argument);
}

TEST_CASE("grid min oracle: point sets and constant objectives") {
  const std::vector<double> p = {0.25, 0.75};
  const std::vector<double> zero_eps = {0.0, 0.0};
  const std::vector<double> v = {0.4, 1.2};
  CHECK(grid_min_oracle(p, zero_eps, v) == doctest::Approx(1.0).epsilon(1e-13));

  const std::vector<double> p3 = {0.3, 0.3, 0.4};
  const std::vector<double> eps3 = {0.1, 0.05, 0.0};
  const std::vector<double> flat = {0.8, 0.8, 0.8};
  CHECK(grid_min_oracle(p3, eps3, flat) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("grid min oracle: worked two-state example") {
  const std::vector<double> p = {0.5, 0.5};
  const std::vector<double> eps = {0.2, 0.2};
  const std::vector<double> v = {0.0, 1.0};
  CHECK(std::abs(grid_min_oracle(p, eps, v) - 0.3) <= 0.011);
}

TEST_CASE("grid min oracle: contracts") {
  const std::vector<double> p4 = {0.25, 0.25, 0.25, 0.25};
  const std::vector<double> eps4 = {0.1, 0.1, 0.1, 0.1};
  const std::vector<double> v4 = {0.0, 0.5, 1.0, 0.2};
  CHECK_THROWS_AS(grid_min_oracle(p4, eps4, v4), std::invalid_argument);

  const std::vector<double> bad_fixed = {0.9, 0.8};
  const std::vector<double> zero_eps = {0.0, 0.0};
  const std::vector<double> v2 = {0.0, 1.0};
  CHECK_THROWS_AS(grid_min_oracle(bad_fixed, zero_eps, v2), std::invalid_argument);
  const std::vector<double> v_short = {0.0};
  CHECK_THROWS_AS(grid_min_oracle(bad_fixed, zero_eps, v_short), std::invalid_argument);
}

TEST_CASE("grid min oracle: brackets the exact greedy minimizer") {
  SplitRng rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> p(3), eps(3), v(3);
    double z = 0.0;
    for (int i = 0; i < 3; ++i) {
      p[i] = 0.05 + rng.uniform01();
      z += p[i];
    }
    for (int i = 0; i < 3; ++i) {
      p[i] /= z;
      eps[i] = 0.05 + 0.5 * rng.uniform01();
      v[i] = rng.uniform01();
    }
    const double exact = min_expected_value(p, eps, v).value;
    const double grid = grid_min_oracle(p, eps, v);
    CHECK(exact <= grid + 1e-9);
    CHECK(grid <= exact + 0.03);
  }
}

TEST_CASE("monte carlo value: deterministic environments are exact") {
  // slip = 0 and deterministic costs make every rollout identical.
  const TabularModel model = make_chain_mdp(3, 4, 0.0);
  const StochasticEnv env{model, CostNoise::deterministic};
  const auto [pi_star, tables] = optimal_values(model);
  SplitRng rng(7);
  const MonteCarloValue mc = monte_carlo_value(env, pi_star, 200, rng);
  CHECK(mc.mean == doctest::Approx(tables.v(0, model.initial_state)).epsilon(1e-13));
  CHECK(mc.std_error == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("monte carlo value: zero costs yield zero under bernoulli noise") {
  const TabularModel model = constant_cost_model(2, 2, 3, 0.0);
  const StochasticEnv env{model, CostNoise::bernoulli};
  SplitRng rng(9);
  const MonteCarloValue mc =
      monte_carlo_value(env, Policy::uniform(3, 2, 2), 150, rng);
  CHECK(mc.mean == 0.0);
  CHECK(mc.std_error == 0.0);
}

TEST_CASE("monte carlo value: agrees with exact evaluation within three SEs") {
  const TabularModel model = make_random_mdp(4, 2, 3, 13);
  const StochasticEnv env{model, CostNoise::bernoulli};
  const Policy pi = Policy::uniform(3, 4, 2);
  const double exact = evaluate_policy(model, pi).v(0, model.initial_state);
  SplitRng rng(21);
  const MonteCarloValue mc = monte_carlo_value(env, pi, 20000, rng);
  CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.std_error + 1e-9);
  CHECK(mc.std_error > 0.0);
}

TEST_CASE("monte carlo value: needs at least two rollouts") {
  const TabularModel model = make_random_mdp(2, 2, 2, 1);
  const StochasticEnv env{model, CostNoise::bernoulli};
  SplitRng rng(1);
  CHECK_THROWS_AS(monte_carlo_value(env, Policy::uniform(2, 2, 2), 1, rng),
                  std::invalid_argument);
}

}  // TEST_SUITE("oracles")
