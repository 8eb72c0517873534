"""
Reduced-scale runs of the benchmark experiments. Episode counts are small
enough for the suite, so orderings are checked with a few standard errors of
slack.
"""

import math

import numpy as np
import pytest

from esrmcts.config import RunConfig
from esrmcts.envs import Fishwood, FishwoodParams, fishwood_optimal_esr
from esrmcts.harness import random_policy_baseline, run_experiment
from esrmcts.utility import parse_utility


@pytest.fixture(scope="module")
def fishwood_baseline():
    model = Fishwood()
    spec = parse_utility("fishwood_min")
    return random_policy_baseline(model, spec, 20_000, np.random.default_rng(0))


def _pooled(result) -> tuple[float, float]:
    values = np.concatenate([np.asarray(run) for run in result.utilities])
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


@pytest.mark.parametrize("algorithm", ["nlu-mcts", "dmcts"])
def test_fishwood_beats_random_policy(algorithm, fishwood_baseline):
    config = RunConfig(
        algorithm=algorithm,
        environment="fishwood",
        n_exec=2,
        episodes=1000,
        runs=3,
        seed=5,
        trailing_window=300,
    )
    result = run_experiment(config)
    assert config.tree_persistence

    trailing, _ = result.trailing_summary()
    assert trailing > fishwood_baseline
    assert trailing > 0.6 * fishwood_optimal_esr(FishwoodParams())


@pytest.mark.parametrize("utility", ["risk_seeking_sq", "risk_averse_sqrt"])
def test_stock_dmcts_keeps_up_with_nlu_mcts(utility):
    results = {}
    for algorithm in ("nlu-mcts", "dmcts"):
        config = RunConfig(
            algorithm=algorithm,
            environment="stock",
            utility=utility,
            n_exec=10,
            episodes=50,
            runs=3,
            seed=9,
            replicates=500,
        )
        assert not config.tree_persistence
        results[algorithm] = _pooled(run_experiment(config))

    nlu_mean, nlu_se = results["nlu-mcts"]
    dmcts_mean, dmcts_se = results["dmcts"]
    assert dmcts_mean >= nlu_mean - 3 * math.hypot(nlu_se, dmcts_se)


@pytest.mark.parametrize("algorithm", ["nlu-mcts", "dmcts"])
def test_redeed_utilities_are_finite_and_negative(algorithm):
    config = RunConfig(
        algorithm=algorithm,
        environment="redeed",
        n_exec=3,
        episodes=4,
        runs=2,
        replicates=10,
        trailing_window=2,
    )
    result = run_experiment(config)
    values = [u for run in result.utilities for u in run]

    assert result.metadata["utility"] == "product:offset=1"
    assert all(math.isfinite(u) and u < 0 for u in values)
    assert len(set(values)) > 1


@pytest.mark.parametrize(
    "utility", ["u1_halfmax", "u2_quartic", "u3_min_quarter", "u4_quadratic_sum"]
)
def test_fishwood_learning_curves_settle(utility):
    config = RunConfig(
        algorithm="dmcts",
        environment="fishwood",
        utility=utility,
        n_exec=2,
        episodes=240,
        runs=3,
        seed=13,
        trailing_window=120,
    )
    result = run_experiment(config)

    settled = result.trailing_mean[config.trailing_window - 1 :]
    assert result.trailing_mean[-1] >= 0.8 * max(settled)
    scaled = result.scaled_trailing_mean()
    assert min(scaled) == 0.0
    assert max(scaled) == 1.0
    assert all(0.0 <= s <= 1.0 for s in scaled)
