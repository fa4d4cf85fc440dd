"""Optimistic policy optimization on tabular finite-horizon MDPs.

Thin Python surface over the C++ core: model construction, exact policy
evaluation, the mirror-descent step, the three episodic learning loops,
regret curves, and the file-writing experiment harness.
"""

from ._core import (
    Policy,
    TabularModel,
    __version__,
    default_adversarial_params,
    default_stepsize,
    evaluate_policy,
    fit_loglog_slope,
    make_chain_mdp,
    make_random_mdp,
    occupancy,
    omd_step,
    optimal_values,
    run,
    run_experiment,
)

__all__ = [
    "Policy",
    "TabularModel",
    "__version__",
    "default_adversarial_params",
    "default_stepsize",
    "evaluate_policy",
    "fit_loglog_slope",
    "make_chain_mdp",
    "make_random_mdp",
    "occupancy",
    "omd_step",
    "optimal_values",
    "run",
    "run_experiment",
]
