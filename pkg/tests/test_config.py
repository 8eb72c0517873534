import math
import os

import pytest
import yaml
from pytest import raises

from esrmcts.config import (
    ConfigurationError,
    RunConfig,
    load_config,
    load_env_params,
    read_config_data,
)

TEST_CONFIG = os.path.join(os.path.dirname(__file__), "test_config.yaml")


def test_defaults():
    config = RunConfig()
    assert config.algorithm == "dmcts"
    assert config.runs == 10
    assert config.exploration == math.sqrt(2)
    assert config.replicates == 100
    assert config.alpha_init == config.beta_init == 1.0
    assert config.trailing_window == 100


@pytest.mark.parametrize(
    "environment, persistent",
    [("fishwood", True), ("redeed", True), ("stock", False), ("random-momdp", False), ("momab", False)],
)
def test_tree_persistence_default_follows_environment(environment, persistent):
    assert RunConfig(environment=environment).tree_persistence is persistent


def test_explicit_tree_persistence_wins():
    assert RunConfig(environment="fishwood", tree_persistence=False).tree_persistence is False
    assert RunConfig(environment="stock", tree_persistence=True).tree_persistence is True


def test_load_config():
    config = load_config(TEST_CONFIG)
    assert config.algorithm == "nlu-mcts"
    assert config.env_params == {"horizon": 4}
    assert config.seed == 17
    assert config.exploration == 1.0
    assert config.config_path == TEST_CONFIG


@pytest.mark.parametrize(
    "field, value, message",
    [
        ("algorithm", "alphazero", "Unsupported algorithm"),
        ("environment", "gridworld", "Unsupported environment"),
        ("n_exec", 0, "n_exec must be at least 1"),
        ("runs", 0, "runs must be at least 1"),
        ("replicates", 0, "replicates must be at least 1"),
        ("seed", -1, "unsigned 64-bit"),
        ("seed", 2**64, "unsigned 64-bit"),
        ("exploration", -0.1, "non-negative"),
        ("beta_init", 0.0, "beta_init must be positive"),
        ("reward_tolerance", -1e-3, "reward_tolerance"),
    ],
)
def test_invalid_config(field, value, message):
    with raises(ConfigurationError, match=message):
        RunConfig(**{field: value})


def test_zero_exploration_is_allowed():
    assert RunConfig(exploration=0.0).exploration == 0.0


@pytest.fixture
def temp_env_file(tmp_path):
    """Writes a YAML document and returns its path"""

    def _create(data):
        path = tmp_path / "env.yaml"
        path.write_text(yaml.dump(data))
        return str(path)

    return _create


def test_env_config_overrides_env_params(temp_env_file):
    path = temp_env_file({"horizon": 6, "p_wood": 0.5})
    config = RunConfig(env_params={"horizon": 4, "p_fish": 0.3}, env_config=path)
    assert config.merged_env_params() == {"horizon": 6, "p_fish": 0.3, "p_wood": 0.5}


def test_env_config_must_be_flat(temp_env_file):
    path = temp_env_file({"stocks": {"a": 1}})
    with raises(ConfigurationError, match="must be flat"):
        load_env_params(path)


def test_env_config_must_be_a_mapping(temp_env_file):
    path = temp_env_file([1, 2, 3])
    with raises(ConfigurationError, match="key/value mapping"):
        load_env_params(path)


def test_empty_env_config(temp_env_file):
    assert load_env_params(temp_env_file(None)) == {}


def test_missing_env_config(tmp_path):
    with raises(ConfigurationError, match="Cannot read environment config"):
        load_env_params(str(tmp_path / "missing.yaml"))


def test_read_config_data_keeps_only_the_file_values(tmp_path):
    path = tmp_path / "experiment.yaml"
    path.write_text(yaml.dump({"episodes": 50, "environment": "momab"}))
    assert read_config_data(str(path)) == {"episodes": 50, "environment": "momab"}

    config = RunConfig(**read_config_data(str(path)))
    assert {"episodes", "environment"} <= config.model_fields_set
    assert "n_exec" not in config.model_fields_set


def test_config_file_must_be_a_mapping(tmp_path):
    path = tmp_path / "experiment.yaml"
    path.write_text("- fishwood\n- stock\n")
    with raises(ConfigurationError, match="key/value mapping"):
        read_config_data(str(path))
