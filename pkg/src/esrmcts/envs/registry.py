from typing import Any, Callable, Dict

from esrmcts.config import ConfigurationError, RunConfig
from esrmcts.core import EnvironmentModel
from esrmcts.envs.bandits import Bandit, BanditParams
from esrmcts.envs.fishwood import Fishwood, FishwoodParams
from esrmcts.envs.random_momdp import RandomMomdpParams, random_momdp_build
from esrmcts.envs.redeed import Redeed, RedeedParams
from esrmcts.envs.stock import StockMdp, StockMdpParams

DEFAULT_UTILITIES = {
    "fishwood": "fishwood_min",
    "stock": "risk_seeking_sq",
    "redeed": "product:offset=1",
    "random-momdp": "quadratic_sum",
    "momab": "momab_scaled_product",
    "single-arm": "product",
}


def _single_arm(params: Dict[str, Any]) -> Bandit:
    return Bandit(BanditParams(**{**BanditParams.single_arm_demo().model_dump(), **params}))


_BUILDERS: Dict[str, Callable[[Dict[str, Any]], EnvironmentModel]] = {
    "fishwood": lambda params: Fishwood(FishwoodParams(**params)),
    "stock": lambda params: StockMdp(StockMdpParams.load(**params)),
    "redeed": lambda params: Redeed(RedeedParams.load(**params)),
    "random-momdp": lambda params: random_momdp_build(RandomMomdpParams(**params)),
    "momab": lambda params: Bandit(BanditParams(**params)),
    "single-arm": _single_arm,
}


def build_environment(tag: str, params: Dict[str, Any] | None = None) -> EnvironmentModel:
    builder = _BUILDERS.get(tag)
    if builder is None:
        raise ConfigurationError(f"Unsupported environment: {tag}")
    try:
        return builder(params or {})
    except (TypeError, ValueError) as e:
        # ValidationError for unknown keys or badly typed values
        raise ConfigurationError(f"Invalid parameters for environment {tag}: {e}") from e


def environment_for(config: RunConfig) -> EnvironmentModel:
    return build_environment(config.environment, config.merged_env_params())


def default_utility(tag: str) -> str:
    return DEFAULT_UTILITIES[tag]
