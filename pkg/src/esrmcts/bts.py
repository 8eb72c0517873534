"""
Bootstrap Thompson Sampling: J replicates of (alpha, beta) approximating the
posterior over expected utility, updated by double-or-nothing coin flips.
"""

import math

import numpy as np

from esrmcts.core import UsageError


class BtsDistribution:
    """Replicate j estimates the expected utility as alpha[j] / beta[j]"""

    __slots__ = ("alpha", "beta", "alpha_init", "beta_init")

    def __init__(self, alpha: np.ndarray, beta: np.ndarray, alpha_init: float, beta_init: float):
        self.alpha = alpha
        self.beta = beta
        self.alpha_init = alpha_init
        self.beta_init = beta_init

    @property
    def replicates(self) -> int:
        return self.alpha.size

    def means(self) -> np.ndarray:
        return self.alpha / self.beta

    def heads(self) -> np.ndarray:
        """Number of updates each replicate has absorbed"""
        return np.rint(self.beta - self.beta_init).astype(np.int64)

    def __repr__(self) -> str:
        means = self.means()
        return (
            f"BtsDistribution(J={self.replicates}, mean={means.mean():.4g}, "
            f"min={means.min():.4g}, max={means.max():.4g})"
        )


def bts_new(replicates: int, alpha_init: float = 1.0, beta_init: float = 1.0) -> BtsDistribution:
    if replicates < 1:
        raise UsageError("A bootstrap distribution needs at least one replicate")
    if beta_init <= 0:
        raise UsageError("beta_init must be positive")
    return BtsDistribution(
        alpha=np.full(replicates, float(alpha_init)),
        beta=np.full(replicates, float(beta_init)),
        alpha_init=float(alpha_init),
        beta_init=float(beta_init),
    )


def bts_update(
    d: BtsDistribution,
    utility: float,
    rng: np.random.Generator,
    coins: np.ndarray | None = None,
) -> np.ndarray:
    """Flip a fair coin per replicate; on heads add ``utility`` to alpha and 1 to beta.

    Returns the boolean heads mask. ``coins`` overrides the flips.
    """
    if not math.isfinite(utility):
        raise UsageError(f"Cannot update a bootstrap distribution with utility {utility}")
    if coins is None:
        coins = rng.random(d.replicates) < 0.5
    d.alpha[coins] += utility
    d.beta[coins] += 1.0
    return coins


def bts_sample_mean(d: BtsDistribution, rng: np.random.Generator) -> float:
    j = rng.integers(d.replicates)
    return float(d.alpha[j] / d.beta[j])
