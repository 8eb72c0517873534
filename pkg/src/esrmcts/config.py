import math
from typing import Any, Dict

import yaml
from pydantic import BaseModel, model_validator

from esrmcts.core import UsageError


class ConfigurationError(UsageError):
    pass


SUPPORTED_ALGORITHMS = {"nlu-mcts", "dmcts"}
SUPPORTED_ENVIRONMENTS = {"fishwood", "stock", "redeed", "random-momdp", "momab", "single-arm"}
# tree_persistence defaults to on for these
PERSISTENT_ENVIRONMENTS = {"fishwood", "redeed"}


class RunConfig(BaseModel):
    algorithm: str = "dmcts"
    environment: str = "fishwood"
    env_params: Dict[str, Any] = {}
    env_config: str | None = None
    utility: str | None = None
    n_exec: int = 2
    episodes: int = 100
    runs: int = 10
    seed: int = 0
    exploration: float = math.sqrt(2)
    replicates: int = 100
    alpha_init: float = 1.0
    beta_init: float = 1.0
    tree_persistence: bool | None = None
    reward_tolerance: float = 1e-9
    trailing_window: int = 100
    workers: int = 1
    config_path: str | None = None

    @model_validator(mode="after")
    def validate_config(self):
        if self.algorithm not in SUPPORTED_ALGORITHMS:
            raise ConfigurationError(f"Unsupported algorithm: {self.algorithm}")

        if self.environment not in SUPPORTED_ENVIRONMENTS:
            raise ConfigurationError(f"Unsupported environment: {self.environment}")

        for name in ("n_exec", "episodes", "runs", "replicates", "trailing_window", "workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")

        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")

        if self.exploration < 0:
            raise ConfigurationError("exploration constant C must be non-negative")

        if self.beta_init <= 0:
            raise ConfigurationError("beta_init must be positive")

        if self.reward_tolerance < 0:
            raise ConfigurationError("reward_tolerance must be non-negative")

        if self.tree_persistence is None:
            self.tree_persistence = self.environment in PERSISTENT_ENVIRONMENTS

        return self

    def merged_env_params(self) -> Dict[str, Any]:
        """Environment parameters with the ``env_config`` file applied on top"""
        params = dict(self.env_params)
        if self.env_config:
            params.update(load_env_params(self.env_config))
        return params


def load_env_params(path: str) -> Dict[str, Any]:
    """Read a flat key/value YAML file of environment parameters"""
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigurationError(f"Cannot read environment config {path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Environment config {path} must be a key/value mapping")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigurationError(
            f"Environment config {path} must be flat; nested keys: {', '.join(nested)}"
        )
    return data


def read_config_data(config_path: str) -> Dict[str, Any]:
    """Raw key/value mapping of an experiment file, before defaults are applied"""
    with open(config_path, "r") as f:
        config_data = yaml.safe_load(f) or {}
    if not isinstance(config_data, dict):
        raise ConfigurationError(f"Experiment file {config_path} must be a key/value mapping")
    return config_data


def load_config(config_path: str) -> RunConfig:
    config = RunConfig(**read_config_data(config_path))
    config.config_path = config_path
    return config
