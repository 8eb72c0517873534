"""
Utility functions known a priori, applied to cumulative return vectors,
and reporting helpers built on top of them.
"""

import math
from enum import Enum
from typing import Callable, Dict, List, Sequence

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.core import ReturnVector, UsageError, as_returns


class UtilityDomainError(UsageError):
    pass


class UtilityKind(str, Enum):
    FISHWOOD_MIN = "fishwood_min"
    RISK_SEEKING_SQ = "risk_seeking_sq"
    RISK_AVERSE_SQRT = "risk_averse_sqrt"
    LINEAR = "linear"
    PRODUCT = "product"
    MOMAB_SCALED_PRODUCT = "momab_scaled_product"
    QUADRATIC_SUM = "quadratic_sum"
    U1_HALFMAX = "u1_halfmax"
    U2_QUARTIC = "u2_quartic"
    U3_MIN_QUARTER = "u3_min_quarter"
    U4_QUADRATIC_SUM = "u4_quadratic_sum"


# None means any arity >= 1
_ARITY: Dict[UtilityKind, int | None] = {
    UtilityKind.FISHWOOD_MIN: 2,
    UtilityKind.RISK_SEEKING_SQ: 1,
    UtilityKind.RISK_AVERSE_SQRT: 1,
    UtilityKind.LINEAR: None,
    UtilityKind.PRODUCT: None,
    UtilityKind.MOMAB_SCALED_PRODUCT: 2,
    UtilityKind.QUADRATIC_SUM: 2,
    UtilityKind.U1_HALFMAX: 2,
    UtilityKind.U2_QUARTIC: 2,
    UtilityKind.U3_MIN_QUARTER: 2,
    UtilityKind.U4_QUADRATIC_SUM: 2,
}

_DEFAULT_PARAMS: Dict[UtilityKind, Dict[str, float]] = {
    UtilityKind.RISK_AVERSE_SQRT: {"shift": 150.0},
    UtilityKind.PRODUCT: {"offset": 0.0},
    UtilityKind.MOMAB_SCALED_PRODUCT: {"scale": 6.25},
}


class UtilitySpec(BaseModel):
    kind: UtilityKind
    params: Dict[str, float] = {}
    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_params(self):
        allowed = set(_DEFAULT_PARAMS.get(self.kind, {}))
        if self.kind == UtilityKind.LINEAR:
            allowed = {k for k in self.params if k.startswith("w")}
        unknown = set(self.params) - allowed
        if unknown:
            raise UsageError(
                f"Unknown parameters for utility {self.kind.value}: {', '.join(sorted(unknown))}"
            )
        return self

    @property
    def arity(self) -> int | None:
        return _ARITY[self.kind]

    def param(self, name: str) -> float:
        return self.params.get(name, _DEFAULT_PARAMS[self.kind][name])

    def accepts(self, n_objectives: int) -> bool:
        return self.arity is None or self.arity == n_objectives

    def __str__(self) -> str:
        if not self.params:
            return self.kind.value
        rendered = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind.value}:{rendered}"


def _fishwood_min(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(min(r[0], math.floor(r[1] / 2)))


def _risk_seeking_sq(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(max(0.0, r[0]) ** 2)


def _risk_averse_sqrt(spec: UtilitySpec, r: ReturnVector) -> float:
    shifted = r[0] + spec.param("shift")
    if shifted < 0:
        raise UtilityDomainError(
            f"risk_averse_sqrt received {r[0]} which is below -shift ({spec.param('shift')}); "
            "the shift is misconfigured for this environment"
        )
    return float(math.sqrt(shifted))


def _linear(spec: UtilitySpec, r: ReturnVector) -> float:
    weights = [spec.params.get(f"w{i}", 1.0) for i in range(r.size)]
    return float(np.dot(weights, r))


def _product(spec: UtilitySpec, r: ReturnVector) -> float:
    """Product of (r_o - offset); a positive offset keeps all-negative objectives away from 0"""
    return float(np.prod(r - spec.param("offset")))


def _momab_scaled_product(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(spec.param("scale") * max(r[0], 0.0) * max(r[1], 0.0))


def _quadratic_sum(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(r[0] ** 2 + r[1] ** 2)


def _u1_halfmax(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(max(r[0] / 2, r[1] / 2))


def _u2_quartic(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(r[0] / 2 + r[1] ** 4)


def _u3_min_quarter(spec: UtilitySpec, r: ReturnVector) -> float:
    return float(min(r[0] / 2, r[1] / 4))


_EVALUATORS: Dict[UtilityKind, Callable[[UtilitySpec, ReturnVector], float]] = {
    UtilityKind.FISHWOOD_MIN: _fishwood_min,
    UtilityKind.RISK_SEEKING_SQ: _risk_seeking_sq,
    UtilityKind.RISK_AVERSE_SQRT: _risk_averse_sqrt,
    UtilityKind.LINEAR: _linear,
    UtilityKind.PRODUCT: _product,
    UtilityKind.MOMAB_SCALED_PRODUCT: _momab_scaled_product,
    UtilityKind.QUADRATIC_SUM: _quadratic_sum,
    UtilityKind.U1_HALFMAX: _u1_halfmax,
    UtilityKind.U2_QUARTIC: _u2_quartic,
    UtilityKind.U3_MIN_QUARTER: _u3_min_quarter,
    UtilityKind.U4_QUADRATIC_SUM: _quadratic_sum,
}


def eval_utility(spec: UtilitySpec, r: ReturnVector) -> float:
    """Scalarise a cumulative return vector"""
    if not spec.accepts(r.size):
        raise UsageError(
            f"Utility {spec.kind.value} expects {spec.arity} objectives, got {r.size}"
        )
    return _EVALUATORS[spec.kind](spec, r)


def parse_utility(text: str) -> UtilitySpec:
    """Parse ``name[:param=val[,param=val...]]``, e.g. ``risk_averse_sqrt:shift=150``"""
    name, _, raw_params = text.strip().partition(":")
    try:
        kind = UtilityKind(name.strip())
    except ValueError:
        known = ", ".join(k.value for k in UtilityKind)
        raise UsageError(f"Unknown utility '{name}'. Known utilities: {known}")

    params = {}
    for part in raw_params.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"Malformed utility parameter '{part}', expected key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"Utility parameter {key.strip()} must be a number")
    return UtilitySpec(kind=kind, params=params)


def min_max_scale(series: Sequence[float]) -> List[float]:
    """Map the minimum of ``series`` to 0 and the maximum to 1.

    A constant series maps to 0.5 everywhere.
    """
    if len(series) == 0:
        raise UsageError("Cannot scale an empty series")
    values = np.asarray(series, dtype=np.float64)
    low, high = values.min(), values.max()
    if high == low:
        return [0.5] * len(values)
    return ((values - low) / (high - low)).tolist()


def expected_scalarised_returns(spec: UtilitySpec, returns: Sequence[ReturnVector]) -> float:
    """ESR: utility of every episode's return, then the average"""
    return float(np.mean([eval_utility(spec, as_returns(r)) for r in returns]))


def scalarised_expected_returns(spec: UtilitySpec, returns: Sequence[ReturnVector]) -> float:
    """SER: utility of the average return vector"""
    return eval_utility(spec, as_returns(np.mean(np.asarray(returns, dtype=np.float64), axis=0)))
