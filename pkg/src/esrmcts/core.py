"""
Shared domain types: return vectors, the accrued/future return ledger,
the environment model contract and rng stream derivation.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Hashable, NamedTuple, Sequence

import numpy as np

ReturnVector = np.ndarray
State = Hashable


class UsageError(Exception):
    pass


class ContractViolationError(Exception):
    pass


class HorizonOverrunError(Exception):
    pass


def as_returns(values: Sequence[float] | np.ndarray) -> ReturnVector:
    """Coerce ``values`` into a 1-d float64 return vector"""
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1 or vector.size < 1:
        raise UsageError(
            f"Return vectors must be 1-dimensional with at least one entry, got shape {vector.shape}"
        )
    return vector


def zero_returns(n_objectives: int) -> ReturnVector:
    if n_objectives < 1:
        raise UsageError("A return vector needs at least one objective")
    return np.zeros(n_objectives, dtype=np.float64)


def add_returns(a: ReturnVector, b: ReturnVector) -> ReturnVector:
    if a.shape != b.shape:
        raise UsageError(
            f"Cannot add return vectors of different lengths: {a.size} and {b.size}"
        )
    return a + b


@dataclass
class ReturnLedger:
    """Accrued returns (rewards already received this episode) and the
    future returns collected by one planning iteration."""

    accrued: ReturnVector
    future: ReturnVector

    @classmethod
    def start(cls, n_objectives: int) -> "ReturnLedger":
        return cls(zero_returns(n_objectives), zero_returns(n_objectives))

    def receive(self, reward: ReturnVector) -> None:
        self.accrued = add_returns(self.accrued, reward)

    def collect(self, reward: ReturnVector) -> None:
        self.future = add_returns(self.future, reward)

    def reset_future(self) -> None:
        self.future = zero_returns(self.accrued.size)


def cumulative(ledger: ReturnLedger) -> ReturnVector:
    return add_returns(ledger.accrued, ledger.future)


class Transition(NamedTuple):
    state: State
    reward: ReturnVector
    terminal: bool


class EnvironmentModel(ABC):
    """Generative finite-horizon (MO)MDP used both for planning rollouts and
    for executing the chosen actions.

    States must be hashable and compare by value; they double as the
    observation stored in decision nodes.
    """

    n_objectives: int
    horizon: int
    integer_rewards: bool = False

    @abstractmethod
    def initial_state(self) -> State:
        pass

    @abstractmethod
    def num_actions(self, state: State) -> int:
        pass

    @abstractmethod
    def step(self, state: State, action: int, rng: np.random.Generator) -> Transition:
        """Sample one transition. Identical inputs and rng state give identical outputs."""
        pass

    @abstractmethod
    def is_terminal(self, state: State) -> bool:
        pass


def derive_streams(
    seed: int, run_index: int = 0
) -> tuple[np.random.Generator, np.random.Generator]:
    """Split a master seed into independent (planner, environment) generators for one run"""
    run_sequence = np.random.SeedSequence(seed, spawn_key=(run_index,))
    planner_sequence, env_sequence = run_sequence.spawn(2)
    return np.random.default_rng(planner_sequence), np.random.default_rng(env_sequence)
