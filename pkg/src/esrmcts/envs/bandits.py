"""
Multi-objective bandits: the four-arm Gaussian MOMAB and the single-arm
Bernoulli pair demo, usable directly or as horizon-1 environments.
"""

from typing import List, NamedTuple

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.config import ConfigurationError
from esrmcts.core import EnvironmentModel, ReturnVector, Transition, UsageError

MOMAB_MEANS = [[0.0, 0.8], [0.4, 0.4], [0.8, 0.0], [0.9, 0.1]]
MOMAB_VARIANCE = 0.0005


class BanditState(NamedTuple):
    timestep: int


class BanditParams(BaseModel):
    """Either Gaussian arms (mean vector + per-objective variance, no correlation)
    or, with ``bernoulli``, arms paying their mean vector with probability
    ``success_probability`` and zeros otherwise."""

    means: List[List[float]] = MOMAB_MEANS
    variance: float = MOMAB_VARIANCE
    bernoulli: bool = False
    success_probability: float = 0.5
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_params(self):
        if not self.means:
            raise ConfigurationError("at least one arm is required")
        if len({len(m) for m in self.means}) != 1 or not self.means[0]:
            raise ConfigurationError("all arm mean vectors must have the same positive length")
        if self.variance < 0:
            raise ConfigurationError("variance must be non-negative")
        if not 0.0 <= self.success_probability <= 1.0:
            raise ConfigurationError("success_probability must be a probability")
        return self

    @property
    def arms(self) -> int:
        return len(self.means)

    @property
    def n_objectives(self) -> int:
        return len(self.means[0])

    @classmethod
    def momab(cls) -> "BanditParams":
        return cls()

    @classmethod
    def single_arm_demo(cls) -> "BanditParams":
        return cls(means=[[1.0, 1.0]], variance=0.0, bernoulli=True, success_probability=0.5)


def bandit_pull(params: BanditParams, arm: int, rng: np.random.Generator) -> ReturnVector:
    if not 0 <= arm < params.arms:
        raise UsageError(f"Arm {arm} does not exist, there are {params.arms} arms")
    mean = np.asarray(params.means[arm], dtype=np.float64)
    if params.bernoulli:
        return mean.copy() if rng.random() < params.success_probability else np.zeros_like(mean)
    if params.variance == 0:
        return mean.copy()
    return mean + rng.normal(0.0, np.sqrt(params.variance), size=mean.size)


class Bandit(EnvironmentModel):
    """A bandit as a one-step environment"""

    horizon = 1

    def __init__(self, params: BanditParams | None = None):
        self.params = params or BanditParams.momab()
        self.n_objectives = self.params.n_objectives
        self.integer_rewards = self.params.bernoulli and all(
            float(v).is_integer() for m in self.params.means for v in m
        )

    def initial_state(self) -> BanditState:
        return BanditState(0)

    def num_actions(self, state: BanditState) -> int:
        return self.params.arms

    def is_terminal(self, state: BanditState) -> bool:
        return state.timestep >= 1

    def step(self, state: BanditState, action: int, rng: np.random.Generator) -> Transition:
        return Transition(BanditState(state.timestep + 1), bandit_pull(self.params, action, rng), True)
