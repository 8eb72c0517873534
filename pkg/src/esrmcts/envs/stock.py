"""
Risk-Aware stock MDP: each timestep the agent decides how many euros to invest
in the stock of the current state. Stocks are visited in a fixed cycle.
"""

from typing import List, NamedTuple

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.config import ConfigurationError
from esrmcts.core import EnvironmentModel, Transition
from esrmcts.envs.data_utils import load_yaml_data

DEFAULT_STOCK_FILE = "stock_default.yaml"


class StockState(NamedTuple):
    timestep: int
    stock: int


class StockLaw(BaseModel):
    profit_probability: float
    profit_multiplier: float
    loss_multiplier: float
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_law(self):
        if not 0.0 <= self.profit_probability <= 1.0:
            raise ConfigurationError("profit_probability must be a probability")
        if self.loss_multiplier < 0 or self.profit_multiplier < 0:
            raise ConfigurationError("stock multipliers must be non-negative")
        return self

    @property
    def expected_movement(self) -> float:
        return (
            self.profit_probability * self.profit_multiplier
            - (1 - self.profit_probability) * self.loss_multiplier
        )


class StockMdpParams(BaseModel):
    horizon: int = 10
    investments: List[float] = [0, 1, 2, 3]
    stocks: List[StockLaw]
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_params(self):
        if self.horizon < 1:
            raise ConfigurationError("horizon must be at least 1")
        if not self.stocks:
            raise ConfigurationError("at least one stock is required")
        if not self.investments:
            raise ConfigurationError("at least one investment amount is required")
        return self

    @classmethod
    def load(cls, data_file: str = DEFAULT_STOCK_FILE, **overrides) -> "StockMdpParams":
        data = load_yaml_data(data_file)
        data.update(overrides)
        return cls(**data)

    @property
    def minimum_return(self) -> float:
        """Worst cumulative return: the largest amount lost at every step"""
        largest = max(self.investments)
        return -sum(
            largest * self.stocks[t % len(self.stocks)].loss_multiplier
            for t in range(self.horizon)
        )


class StockMdp(EnvironmentModel):
    n_objectives = 1

    def __init__(self, params: StockMdpParams | None = None):
        self.params = params or StockMdpParams.load()
        self.horizon = self.params.horizon
        amounts = self.params.investments + [
            m
            for law in self.params.stocks
            for m in (law.profit_multiplier, law.loss_multiplier)
        ]
        self.integer_rewards = all(float(a).is_integer() for a in amounts)

    def initial_state(self) -> StockState:
        return StockState(0, 0)

    def num_actions(self, state: StockState) -> int:
        return len(self.params.investments)

    def is_terminal(self, state: StockState) -> bool:
        return state.timestep >= self.horizon

    def step(self, state: StockState, action: int, rng: np.random.Generator) -> Transition:
        return stock_step(self.params, state, self.params.investments[action], rng)

    def expected_random_return(self) -> float:
        """Expected cumulative return of the uniform random investment policy"""
        mean_amount = float(np.mean(self.params.investments))
        stocks = self.params.stocks
        return sum(
            mean_amount * stocks[t % len(stocks)].expected_movement for t in range(self.horizon)
        )


def stock_step(
    params: StockMdpParams,
    state: StockState,
    action_amount: float,
    rng: np.random.Generator,
) -> Transition:
    law = params.stocks[state.stock]
    if rng.random() < law.profit_probability:
        movement = law.profit_multiplier
    else:
        movement = -law.loss_multiplier
    timestep = state.timestep + 1
    next_state = StockState(timestep, (state.stock + 1) % len(params.stocks))
    return Transition(
        next_state, np.array([action_amount * movement], dtype=np.float64), timestep >= params.horizon
    )
