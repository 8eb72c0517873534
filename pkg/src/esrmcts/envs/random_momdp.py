"""
Seeded random MOMDP: every (state, action) pair moves to one of a fixed set of
successor states with uniformly drawn probabilities, and every
(state, action, successor) triple pays a fixed reward vector drawn from
[0, 1]^n at construction time.
"""

from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.config import ConfigurationError
from esrmcts.core import EnvironmentModel, Transition, UsageError


class MomdpState(NamedTuple):
    timestep: int
    state: int


class RandomMomdpParams(BaseModel):
    seed: int = 0
    states: int = 20
    actions: int = 2
    objectives: int = 2
    successors: int = 8
    horizon: int = 10
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_params(self):
        for name in ("states", "actions", "objectives", "successors", "horizon"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative")
        return self


class RandomMomdp(EnvironmentModel):
    def __init__(
        self,
        params: RandomMomdpParams,
        successors: np.ndarray,
        probabilities: np.ndarray,
        rewards: np.ndarray,
    ):
        self.params = params
        self.horizon = params.horizon
        self.n_objectives = params.objectives
        # [state, action, k]
        self.successors = successors
        self.probabilities = probabilities
        self._cumulative = np.cumsum(probabilities, axis=-1)
        # [state, action, k, objective]
        self.rewards = rewards

    def initial_state(self) -> MomdpState:
        return MomdpState(0, 0)

    def num_actions(self, state: MomdpState) -> int:
        return self.params.actions

    def is_terminal(self, state: MomdpState) -> bool:
        return state.timestep >= self.horizon

    def step(self, state: MomdpState, action: int, rng: np.random.Generator) -> Transition:
        cumulative = self._cumulative[state.state, action]
        k = min(int(np.searchsorted(cumulative, rng.random(), side="right")), cumulative.size - 1)
        timestep = state.timestep + 1
        return Transition(
            MomdpState(timestep, int(self.successors[state.state, action, k])),
            self.rewards[state.state, action, k].copy(),
            timestep >= self.horizon,
        )

    def transition_matrix(self) -> np.ndarray:
        """Dense T[s, a, s'] built from the successor tables"""
        p = self.params
        matrix = np.zeros((p.states, p.actions, p.states))
        for s in range(p.states):
            for a in range(p.actions):
                matrix[s, a, self.successors[s, a]] = self.probabilities[s, a]
        return matrix


def random_momdp_build(params: RandomMomdpParams) -> RandomMomdp:
    if params.successors > params.states:
        raise UsageError(
            f"Cannot draw {params.successors} distinct successors from {params.states} states"
        )
    rng = np.random.default_rng(params.seed)
    shape = (params.states, params.actions)
    successors = np.empty(shape + (params.successors,), dtype=np.int64)
    probabilities = np.empty(shape + (params.successors,))
    for s in range(params.states):
        for a in range(params.actions):
            successors[s, a] = rng.choice(params.states, size=params.successors, replace=False)
            weights = rng.uniform(size=params.successors)
            probabilities[s, a] = weights / weights.sum()
    rewards = rng.uniform(size=shape + (params.successors, params.objectives))
    return RandomMomdp(params, successors, probabilities, rewards)
