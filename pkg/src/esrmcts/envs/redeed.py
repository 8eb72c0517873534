"""
Renewable energy dynamic economic emissions dispatch (REDEED).

Ten generators meet an hourly demand over a day. The agent sets the output of
one generator, one generator is wind powered (its output is scaled by a
sampled storm multiplier during the storm hours), one slack generator covers
whatever demand is left, and all other generators follow a fixed reference
dispatch. Rewards are [-cost, -emissions, -penalty] so larger is better.

The shipped coefficient and demand tables are placeholders in the style of the
ten-unit DEED benchmark; swap them with ``generators_file``/``demand_file``.
"""

import math
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.config import ConfigurationError
from esrmcts.core import EnvironmentModel, Transition
from esrmcts.envs.data_utils import load_table

DEFAULT_GENERATORS_FILE = "redeed_generators.csv"
DEFAULT_DEMAND_FILE = "redeed_demand.csv"

GENERATOR_COLUMNS = tuple(
    "a b c d e alpha beta gamma eta delta p_min p_max ramp_up ramp_down".split()
)


class RedeedState(NamedTuple):
    hour: int
    previous_slack: float | None
    previous_agent: float | None


class GeneratorCoefficients(BaseModel):
    generator: int
    a: float
    b: float
    c: float
    d: float
    e: float
    alpha: float
    beta: float
    gamma: float
    eta: float
    delta: float
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float

    @model_validator(mode="after")
    def validate_limits(self):
        if self.p_min > self.p_max:
            raise ConfigurationError(f"generator {self.generator}: p_min exceeds p_max")
        if self.ramp_up < 0 or self.ramp_down < 0:
            raise ConfigurationError(f"generator {self.generator}: ramp limits must be non-negative")
        return self


class RedeedParams(BaseModel):
    generators: List[GeneratorCoefficients]
    demand: List[float]
    slack: int = 1
    agent: int = 3
    wind: int = 4
    storm_start: int = 16
    storm_end: int = 24
    wind_multipliers: List[float] = [0.75, 1.0, 1.25]
    wind_probabilities: List[float] = [0.15, 0.7, 0.15]
    penalty_scale: float = 1e6
    emission_scale: float = 10.0
    agent_levels: int = 11
    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def validate_params(self):
        numbers = [g.generator for g in self.generators]
        if sorted(numbers) != list(range(1, len(numbers) + 1)):
            raise ConfigurationError("generators must be numbered 1..N without gaps")
        roles = {self.slack, self.agent, self.wind}
        if len(roles) != 3 or not roles <= set(numbers):
            raise ConfigurationError("slack, agent and wind must be three distinct generators")
        if not self.demand:
            raise ConfigurationError("demand profile is empty")
        if not 1 <= self.storm_start <= self.storm_end <= len(self.demand):
            raise ConfigurationError("storm hours must lie within the demand profile")
        if len(self.wind_multipliers) != len(self.wind_probabilities):
            raise ConfigurationError("wind_multipliers and wind_probabilities differ in length")
        if any(p < 0 for p in self.wind_probabilities) or not math.isclose(
            sum(self.wind_probabilities), 1.0, abs_tol=1e-9
        ):
            raise ConfigurationError("wind_probabilities must be non-negative and sum to 1")
        if self.agent_levels < 2:
            raise ConfigurationError("agent_levels must be at least 2")
        if self.penalty_scale < 0:
            raise ConfigurationError("penalty_scale must be non-negative")
        return self

    @classmethod
    def load(
        cls,
        generators_file: str = DEFAULT_GENERATORS_FILE,
        demand_file: str = DEFAULT_DEMAND_FILE,
        **overrides,
    ) -> "RedeedParams":
        table = load_table(generators_file)
        missing = [c for c in ("generator",) + GENERATOR_COLUMNS if c not in table.dtype.names]
        if missing:
            raise ConfigurationError(
                f"{generators_file} is missing coefficient columns: {', '.join(missing)}"
            )
        generators = [
            GeneratorCoefficients(
                generator=int(row["generator"]),
                **{column: float(row[column]) for column in GENERATOR_COLUMNS},
            )
            for row in table
        ]
        demand_table = load_table(demand_file)
        if "demand" not in demand_table.dtype.names:
            raise ConfigurationError(f"{demand_file} has no demand column")
        demand = [float(d) for d in demand_table["demand"]]
        return cls(generators=generators, demand=demand, **overrides)

    def generator(self, number: int) -> GeneratorCoefficients:
        return self.generators[number - 1]

    @property
    def hours(self) -> int:
        return len(self.demand)

    def is_storm_hour(self, hour: int) -> bool:
        return self.storm_start <= hour <= self.storm_end


def redeed_cost(g: GeneratorCoefficients, power: float) -> float:
    """Local cost with the valve-point term"""
    return (
        g.a
        + g.b * power
        + g.c * power**2
        + abs(g.d * math.sin(g.e * (g.p_min - power)))
    )


def redeed_emissions(
    g: GeneratorCoefficients, power: float, emission_scale: float = 10.0, wind: bool = False
) -> float:
    if wind:
        return 0.0
    return emission_scale * (
        g.alpha + g.beta * power + g.gamma * power**2 + g.eta * math.exp(g.delta * power)
    )


def redeed_penalty(violations: Sequence[Tuple[float, float]], penalty_scale: float) -> float:
    """Sum of C * |h + 1| * delta over (h, delta) violation terms"""
    return sum(penalty_scale * abs(h + 1) * delta for h, delta in violations)


def global_cost(params: RedeedParams, powers: Sequence[float]) -> float:
    return sum(redeed_cost(g, p) for g, p in zip(params.generators, powers))


def global_emissions(params: RedeedParams, powers: Sequence[float]) -> float:
    return sum(
        redeed_emissions(g, p, params.emission_scale, wind=g.generator == params.wind)
        for g, p in zip(params.generators, powers)
    )


class Redeed(EnvironmentModel):
    n_objectives = 3

    def __init__(self, params: RedeedParams | None = None):
        self.params = params or RedeedParams.load()
        self.horizon = self.params.hours
        agent = self.params.generator(self.params.agent)
        self.levels = np.linspace(agent.p_min, agent.p_max, self.params.agent_levels)
        self.reference = self._reference_dispatch()
        self._wind_cumulative = np.cumsum(self.params.wind_probabilities)

    def _reference_dispatch(self) -> np.ndarray:
        """[hour, generator] outputs placing every generator at the same fraction of its range"""
        p_min = np.array([g.p_min for g in self.params.generators])
        p_max = np.array([g.p_max for g in self.params.generators])
        demand = np.asarray(self.params.demand)
        span = p_max.sum() - p_min.sum()
        if span > 0:
            fraction = np.clip((demand - p_min.sum()) / span, 0.0, 1.0)
        else:
            fraction = np.zeros_like(demand)
        return p_min[None, :] + fraction[:, None] * (p_max - p_min)[None, :]

    def initial_state(self) -> RedeedState:
        return RedeedState(1, None, None)

    def num_actions(self, state: RedeedState) -> int:
        return self.params.agent_levels

    def is_terminal(self, state: RedeedState) -> bool:
        return state.hour > self.horizon

    def reference_action(self, hour: int) -> int:
        """Agent level closest to the reference dispatch for ``hour``"""
        target = self.reference[hour - 1, self.params.agent - 1]
        return int(np.argmin(np.abs(self.levels - target)))

    def sample_wind_multiplier(self, hour: int, rng: np.random.Generator) -> float:
        if not self.params.is_storm_hour(hour):
            return 1.0
        k = int(np.searchsorted(self._wind_cumulative, rng.random(), side="right"))
        return self.params.wind_multipliers[min(k, len(self.params.wind_multipliers) - 1)]

    def dispatch(self, hour: int, action: int, wind_multiplier: float) -> np.ndarray:
        """Outputs of all generators for ``hour``; the slack generator balances demand"""
        p = self.params
        powers = self.reference[hour - 1].copy()
        powers[p.agent - 1] = self.levels[action]
        powers[p.wind - 1] *= wind_multiplier
        slack = p.slack - 1
        powers[slack] = p.demand[hour - 1] - (powers.sum() - powers[slack])
        return powers

    def violations(self, state: RedeedState, powers: np.ndarray) -> List[Tuple[float, float]]:
        """(magnitude, indicator) terms for slack limits and slack/agent ramp limits"""
        p = self.params
        slack_g = p.generator(p.slack)
        agent_g = p.generator(p.agent)
        slack = powers[p.slack - 1]
        agent = powers[p.agent - 1]
        terms = []
        if slack > slack_g.p_max:
            terms.append((slack - slack_g.p_max, 1.0))
        elif slack < slack_g.p_min:
            terms.append((slack_g.p_min - slack, 1.0))
        for g, now, before in (
            (slack_g, slack, state.previous_slack),
            (agent_g, agent, state.previous_agent),
        ):
            if before is None:
                continue
            if now - before > g.ramp_up:
                terms.append((now - before - g.ramp_up, 1.0))
            elif before - now > g.ramp_down:
                terms.append((before - now - g.ramp_down, 1.0))
        return terms

    def step(self, state: RedeedState, action: int, rng: np.random.Generator) -> Transition:
        return redeed_step(self, state, action, rng)


def redeed_step(
    model: Redeed, state: RedeedState, action: int, rng: np.random.Generator
) -> Transition:
    p = model.params
    multiplier = model.sample_wind_multiplier(state.hour, rng)
    powers = model.dispatch(state.hour, action, multiplier)
    cost = global_cost(p, powers)
    emissions = global_emissions(p, powers)
    penalty = redeed_penalty(model.violations(state, powers), p.penalty_scale)
    next_state = RedeedState(
        state.hour + 1, float(powers[p.slack - 1]), float(powers[p.agent - 1])
    )
    return Transition(
        next_state,
        np.array([-cost, -emissions, -penalty]),
        next_state.hour > model.horizon,
    )
