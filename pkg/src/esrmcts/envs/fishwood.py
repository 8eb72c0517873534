"""
Fishwood: the agent is either at the river or in the woods. Each timestep it
chooses where to be and then tries to catch a fish (river) or collect wood
(woods). Rewards are [fish, wood].
"""

from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.config import ConfigurationError
from esrmcts.core import EnvironmentModel, Transition, UsageError, as_returns
from esrmcts.utility import UtilityKind, UtilitySpec, eval_utility

RIVER = 0
WOODS = 1
GO_RIVER = 0
GO_WOODS = 1

_FISH = np.array([1.0, 0.0])
_WOOD = np.array([0.0, 1.0])
_NOTHING = np.array([0.0, 0.0])

# Upper bound on (timestep, fish, wood, location) entries for the exact oracle
MAX_ORACLE_STATES = 10_000_000


class FishwoodState(NamedTuple):
    timestep: int
    location: int


class FishwoodParams(BaseModel):
    p_fish: float = 0.25
    p_wood: float = 0.65
    horizon: int = 13
    start: int = WOODS
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_params(self):
        for name in ("p_fish", "p_wood"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must be a probability")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be at least 1")
        if self.start not in (RIVER, WOODS):
            raise ConfigurationError("start must be 0 (river) or 1 (woods)")
        return self


class Fishwood(EnvironmentModel):
    n_objectives = 2
    integer_rewards = True

    def __init__(self, params: FishwoodParams | None = None):
        self.params = params or FishwoodParams()
        self.horizon = self.params.horizon

    def initial_state(self) -> FishwoodState:
        return FishwoodState(0, self.params.start)

    def num_actions(self, state: FishwoodState) -> int:
        return 2

    def is_terminal(self, state: FishwoodState) -> bool:
        return state.timestep >= self.horizon

    def step(self, state: FishwoodState, action: int, rng: np.random.Generator) -> Transition:
        return fishwood_step(self.params, state, action, rng)


def fishwood_step(
    params: FishwoodParams,
    state: FishwoodState,
    action: int,
    rng: np.random.Generator,
) -> Transition:
    location = RIVER if action == GO_RIVER else WOODS
    if location == RIVER:
        reward = _FISH if rng.random() < params.p_fish else _NOTHING
    else:
        reward = _WOOD if rng.random() < params.p_wood else _NOTHING
    timestep = state.timestep + 1
    return Transition(
        FishwoodState(timestep, location), reward.copy(), timestep >= params.horizon
    )


def fishwood_optimal_esr(params: FishwoodParams, spec: UtilitySpec | None = None) -> float:
    """Maximal expected utility of the final [fish, wood] return, by backward induction.

    The augmented state is (timestep, fish, wood, location). Moving is free, so
    the location never changes the value, but it is kept so the tables match
    the environment's own state.
    """
    spec = spec or UtilitySpec(kind=UtilityKind.FISHWOOD_MIN)
    horizon = params.horizon
    counts = horizon + 1
    if (horizon + 1) * counts * counts * 2 > MAX_ORACLE_STATES:
        raise UsageError(f"Horizon {horizon} is too large for the exact Fishwood oracle")

    # value[fish, wood, location] at the current timestep
    value = np.empty((counts, counts, 2))
    for fish in range(counts):
        for wood in range(counts):
            value[fish, wood, :] = eval_utility(spec, as_returns([fish, wood]))

    for t in range(horizon - 1, -1, -1):
        previous = value
        value = np.full((counts, counts, 2), np.nan)
        for fish in range(t + 1):
            for wood in range(t + 1 - fish):
                river = params.p_fish * previous[fish + 1, wood, RIVER] + (
                    1 - params.p_fish
                ) * previous[fish, wood, RIVER]
                woods = params.p_wood * previous[fish, wood + 1, WOODS] + (
                    1 - params.p_wood
                ) * previous[fish, wood, WOODS]
                value[fish, wood, :] = max(river, woods)

    return float(value[0, 0, params.start])
