import math

import numpy as np
import pytest
from pytest import raises

from esrmcts.config import ConfigurationError, RunConfig
from esrmcts.core import UsageError
from esrmcts.envs import Fishwood, FishwoodParams, StockMdp
from esrmcts.harness import (
    ExperimentResult,
    random_policy_baseline,
    resolve_utility,
    run_experiment,
    run_experiment_async,
    run_single,
)
from esrmcts.harness.experiment import mean_and_stderr, trailing_mean
from esrmcts.utility import parse_utility


@pytest.fixture
def config():
    return RunConfig(
        algorithm="dmcts",
        environment="fishwood",
        env_params={"horizon": 4},
        n_exec=3,
        episodes=5,
        runs=3,
        seed=21,
        replicates=10,
        trailing_window=2,
    )


def test_trailing_mean():
    assert trailing_mean([1.0, 2.0, 3.0, 4.0], 2) == [1.0, 1.5, 2.5, 3.5]
    assert trailing_mean([4.0, 2.0], 10) == [4.0, 3.0]


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr([[1.0, 2.0], [3.0, 4.0]])
    assert mean == [2.0, 3.0]
    assert stderr == [1.0, 1.0]

    mean, stderr = mean_and_stderr([[1.0, 2.0]])
    assert mean == [1.0, 2.0]
    assert stderr == [0.0, 0.0]


def test_result_from_utilities():
    result = ExperimentResult.from_utilities([[0.0, 1.0, 2.0], [2.0, 1.0, 4.0]], trailing_window=2)
    assert result.runs == 2
    assert result.episodes == 3
    assert result.mean == [1.0, 1.0, 3.0]
    assert result.trailing_mean == [1.0, 1.0, 2.0]
    assert result.trailing_summary() == (2.0, 0.5)
    assert "runs: 2, episodes: 3" in str(result)

    with raises(UsageError):
        ExperimentResult.from_utilities([])


def test_scaled_trailing_mean():
    result = ExperimentResult.from_utilities([[0.0, 1.0, 2.0], [2.0, 1.0, 4.0]], trailing_window=2)
    assert result.scaled_trailing_mean() == [0.0, 0.0, 1.0]

    flat = ExperimentResult.from_utilities([[3.0, 3.0]], trailing_window=1)
    assert flat.scaled_trailing_mean() == [0.5, 0.5]


def test_run_experiment_shape_and_mean(config):
    result = run_experiment(config)
    assert len(result.utilities) == 3
    assert all(len(run) == 5 for run in result.utilities)
    for episode in range(5):
        column = [run[episode] for run in result.utilities]
        assert result.mean[episode] == pytest.approx(math.fsum(column) / 3)
    assert result.metadata["utility"] == "fishwood_min"
    assert result.metadata["seed"] == 21
    assert len(result.wall_times) == 3


def test_run_experiment_is_deterministic(config):
    assert run_experiment(config).utilities == run_experiment(config).utilities


def test_runs_differ_from_each_other(config):
    config = config.model_copy(update={"episodes": 20, "runs": 2})
    first, second = run_experiment(config).utilities
    assert first != second


def test_run_single_matches_its_column(config):
    result = run_experiment(config)
    assert run_single(config, 2).utilities == result.utilities[2]


async def test_async_runs_match_serial_runs(config):
    serial = run_experiment(config)
    concurrent = await run_experiment_async(config)
    assert concurrent.utilities == serial.utilities


def test_process_pool_matches_serial_runs(config):
    serial = run_experiment(config)
    parallel = run_experiment(config.model_copy(update={"workers": 2}))
    assert parallel.utilities == serial.utilities


def test_tree_persistence(config):
    config = config.model_copy(update={"tree_persistence": True, "algorithm": "nlu-mcts"})
    result = run_experiment(config)
    assert result.episodes == 5


def test_dump_tree(config, tmp_path):
    path = tmp_path / "tree.txt"
    run_experiment(config, dump_tree_path=str(path))
    lines = path.read_text().splitlines()
    assert lines
    assert " decision " in lines[0]


def test_utility_arity_mismatch_is_a_config_error():
    config = RunConfig(environment="fishwood", utility="risk_seeking_sq")
    with raises(ConfigurationError, match="expects 1 objectives"):
        run_experiment(config)


def test_unknown_utility_is_a_config_error():
    config = RunConfig(environment="stock", utility="wiggle")
    with raises(ConfigurationError, match="Unknown utility"):
        resolve_utility(config, StockMdp())


def test_default_utility():
    config = RunConfig(environment="stock")
    assert str(resolve_utility(config, StockMdp())) == "risk_seeking_sq"


def test_random_policy_baseline():
    params = FishwoodParams(p_fish=1.0, p_wood=1.0, horizon=3)
    spec = parse_utility("fishwood_min")
    baseline = random_policy_baseline(Fishwood(params), spec, 4000, np.random.default_rng(0))
    # one river and two woods visits, 3 of the 8 action sequences, reach utility 1
    assert baseline == pytest.approx(3 / 8, abs=0.03)
