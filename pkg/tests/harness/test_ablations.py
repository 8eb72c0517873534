import numpy as np
import pytest
from pytest import raises

from esrmcts.core import UsageError
from esrmcts.harness import (
    BtsBanditAgent,
    ablation_bts_runtime,
    ablation_momab,
    ablation_random_momdp,
    ablation_single_arm,
)
from esrmcts.harness.ablations import linear_fit


def test_single_arm_converges_to_half():
    demo = ablation_single_arm(replicates=25, updates=500, seed=0)
    assert sorted(demo.checkpoints) == [1, 8, 32, 128, 250, 300, 500]
    assert all(len(means) == 25 for means in demo.checkpoints.values())
    assert demo.final_mean == pytest.approx(0.5, abs=0.05)
    assert "after  500 updates" in str(demo)


def test_single_arm_skips_checkpoints_past_the_end():
    demo = ablation_single_arm(updates=40)
    assert sorted(demo.checkpoints) == [1, 8, 32]


def test_linear_fit():
    slope, intercept, r_squared = linear_fit([1, 2, 3], [3.0, 5.0, 7.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert r_squared == pytest.approx(1.0)
    assert linear_fit([5, 5], [1.0, 3.0]) == (0.0, 2.0, 1.0)


def test_bts_runtime_table():
    table = ablation_bts_runtime([10, 100, 1000], updates=50, repetitions=2)
    assert [row.replicates for row in table.rows] == [10, 100, 1000]
    assert all(row.mean_seconds > 0 for row in table.rows)
    assert all(row.std_seconds >= 0 for row in table.rows)
    assert "R^2" in str(table)


def test_empty_j_list():
    with raises(UsageError, match="must not be empty"):
        ablation_bts_runtime([])
    with raises(UsageError, match="at least 1"):
        ablation_momab([0], trials=10, runs=1)


def test_bts_bandit_agent_prefers_the_paying_arm():
    rng = np.random.default_rng(0)
    agent = BtsBanditAgent(arms=2, replicates=20)
    for _ in range(300):
        arm = agent.select(rng)
        agent.update(arm, 1.0 if arm == 1 else 0.2, rng)
    means = agent.means()
    assert means[1] > means[0]
    assert agent.select(rng) == 1


def test_momab_finds_the_balanced_arm():
    curves = ablation_momab([10], trials=1000, runs=2, seed=1)
    assert curves.optimal_arm == 1
    assert len(curves.utility[10]) == 1000
    utility, rate = curves.trailing(10, window=200)
    assert utility >= 0.8
    assert rate >= 0.8
    assert "J=   10" in str(curves)


def test_random_momdp_curves():
    curves = ablation_random_momdp(
        [1, 10],
        episodes=4,
        runs=2,
        n_exec=3,
        env_params={"states": 6, "successors": 3, "horizon": 3},
        trailing_window=2,
    )
    assert sorted(curves.results) == [1, 10]
    for result in curves.results.values():
        assert result.runs == 2
        assert result.episodes == 4
        assert result.metadata["utility"] == "quadratic_sum"
    assert len(curves.results[10].trailing_mean) == 4
    assert "J=    1" in str(curves)
