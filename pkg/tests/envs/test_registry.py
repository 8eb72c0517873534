import pytest
from pytest import raises

from esrmcts.config import ConfigurationError, RunConfig
from esrmcts.envs import Bandit, Fishwood, RandomMomdp, build_environment, default_utility, environment_for
from esrmcts.utility import parse_utility


@pytest.mark.parametrize(
    "tag, n_objectives",
    [("fishwood", 2), ("stock", 1), ("redeed", 3), ("random-momdp", 2), ("momab", 2), ("single-arm", 2)],
)
def test_every_environment_builds_with_its_default_utility(tag, n_objectives):
    model = build_environment(tag)
    assert model.n_objectives == n_objectives
    assert parse_utility(default_utility(tag)).accepts(model.n_objectives)


def test_params_are_passed_through():
    model = build_environment("fishwood", {"horizon": 5, "p_fish": 0.5})
    assert isinstance(model, Fishwood)
    assert model.horizon == 5


def test_single_arm_overrides():
    model = build_environment("single-arm", {"success_probability": 0.9})
    assert isinstance(model, Bandit)
    assert model.params.success_probability == 0.9
    assert model.params.bernoulli


def test_unknown_environment():
    with raises(ConfigurationError, match="Unsupported environment"):
        build_environment("gridworld")


def test_unknown_parameter():
    with raises(ConfigurationError, match="Invalid parameters for environment fishwood"):
        build_environment("fishwood", {"p_bird": 0.1})


def test_environment_for_merges_env_config(tmp_path):
    path = tmp_path / "momdp.yaml"
    path.write_text("states: 6\nsuccessors: 3\n")
    config = RunConfig(environment="random-momdp", env_params={"states": 30}, env_config=str(path))
    model = environment_for(config)
    assert isinstance(model, RandomMomdp)
    assert model.params.states == 6
    assert model.successors.shape[-1] == 3
