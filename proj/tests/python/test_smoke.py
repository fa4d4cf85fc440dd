"""Smoke tests for the Python bindings."""

import json
import math

import pytest

import pomd


def test_version_and_exports():
    assert pomd.__version__ == "0.1.0"
    for name in pomd.__all__:
        assert hasattr(pomd, name)


def test_chain_closed_form():
    model = pomd.make_chain_mdp(4, 6, 0.0)
    _, values = pomd.optimal_values(model)
    assert values["v"][0][0] == pytest.approx(3.0, abs=1e-12)


def test_omd_step_worked_example():
    out = pomd.omd_step([0.5, 0.5], [0.0, 1.0], math.log(2.0))
    assert out[0] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert out[1] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert pomd.omd_step([0.25, 0.75], [0.3, 0.9], 0.0) == [0.25, 0.75]


def test_model_json_round_trip():
    model = pomd.make_random_mdp(3, 2, 3, seed=7)
    clone = pomd.TabularModel.from_json(model.to_json())
    assert clone.to_json() == model.to_json()
    clone.validate()


def test_evaluation_occupancy_duality():
    model = pomd.make_random_mdp(4, 2, 3, seed=11)
    policy = pomd.Policy.uniform(3, 4, 2)
    values = pomd.evaluate_policy(model, policy)
    occ = pomd.occupancy(model, policy)
    total = sum(
        occ["state_action"][h][s][a] * model.mean_cost(h, s, a)
        for h in range(3)
        for s in range(4)
        for a in range(2)
    )
    assert total == pytest.approx(values["v"][0][model.initial_state], abs=1e-10)
    _, star = pomd.optimal_values(model)
    assert star["v"][0][model.initial_state] <= values["v"][0][model.initial_state] + 1e-12


def test_default_parameters():
    assert pomd.default_stepsize(2, 1, 2) == pytest.approx(math.sqrt(math.log(2.0)))
    gamma, stepsize = pomd.default_adversarial_params(4, 3, 8)
    assert gamma == pytest.approx(0.25)
    assert stepsize == pytest.approx(math.sqrt(math.log(4.0)) / (3.0 * 4.0))


def test_run_is_reproducible_and_bounded():
    model = pomd.make_random_mdp(3, 2, 3, seed=5)
    first = pomd.run(model, "stochastic", num_episodes=40, seed=3)
    second = pomd.run(model, "stochastic", num_episodes=40, seed=3)
    assert first["cum_regret"] == second["cum_regret"]
    assert first["q_min"] >= 0.0
    assert first["q_max"] <= 3.0 + 1e-12
    assert len(first["instant_regret"]) == 40
    total = 0.0
    for inst, cum in zip(first["instant_regret"], first["cum_regret"]):
        total += inst
        assert cum == pytest.approx(total, abs=1e-9)


def test_run_adversarial_bounds():
    model = pomd.make_random_mdp(3, 2, 3, seed=5)
    out = pomd.run(
        model,
        "adversarial",
        num_episodes=30,
        seed=2,
        schedule_kind="switching",
        schedule_period=10,
        schedule_seed=4,
    )
    assert out["gamma"] > 0.0
    assert out["q_max"] <= 3.0 / out["gamma"] + 1e-9


def test_run_experiment_writes_files(tmp_path):
    config = {
        "env": {"kind": "random", "S": 3, "A": 2, "H": 3, "seed": 5},
        "algorithm": "stochastic",
        "K": 50,
        "delta": 0.1,
        "seeds": [1, 2],
        "out_dir": str(tmp_path / "out"),
    }
    result = pomd.run_experiment(json.dumps(config))
    assert result["num_seeds"] == 2
    assert len(result["mean_cum_regret"]) == 50
    names = {p.rsplit("/", 1)[-1] for p in result["files_written"]}
    assert names == {"seed_1.csv", "seed_2.csv", "aggregate.csv", "manifest.json"}

    lines = (tmp_path / "out" / "seed_1.csv").read_text().splitlines()
    assert lines[0].startswith("episode,instant_regret,cum_regret")
    assert len(lines) == 51
    total = 0.0
    for line in lines[1:]:
        cols = line.split(",")
        total += float(cols[1])
        assert float(cols[2]) == pytest.approx(total, rel=1e-6, abs=1e-9)


def test_fit_loglog_slope_frozen():
    slope, intercept = pomd.fit_loglog_slope([1.0, 4.0, 16.0], [2.0, 4.0, 8.0])
    assert slope == pytest.approx(0.5, abs=1e-12)
    assert intercept == pytest.approx(math.log(2.0), abs=1e-12)
