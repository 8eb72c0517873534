from esrmcts.envs.bandits import Bandit, BanditParams, bandit_pull
from esrmcts.envs.fishwood import Fishwood, FishwoodParams, fishwood_optimal_esr, fishwood_step
from esrmcts.envs.random_momdp import RandomMomdp, RandomMomdpParams, random_momdp_build
from esrmcts.envs.redeed import (
    Redeed,
    RedeedParams,
    redeed_cost,
    redeed_emissions,
    redeed_penalty,
    redeed_step,
)
from esrmcts.envs.registry import build_environment, default_utility, environment_for
from esrmcts.envs.stock import StockMdp, StockMdpParams, stock_step

__all__ = [
    "Bandit",
    "BanditParams",
    "bandit_pull",
    "Fishwood",
    "FishwoodParams",
    "fishwood_optimal_esr",
    "fishwood_step",
    "RandomMomdp",
    "RandomMomdpParams",
    "random_momdp_build",
    "Redeed",
    "RedeedParams",
    "redeed_cost",
    "redeed_emissions",
    "redeed_penalty",
    "redeed_step",
    "build_environment",
    "default_utility",
    "environment_for",
    "StockMdp",
    "StockMdpParams",
    "stock_step",
]
