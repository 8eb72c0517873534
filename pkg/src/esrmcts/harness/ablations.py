"""
Ablations around the bootstrap distribution: the single-arm convergence demo,
update cost as a function of J, the BTS bandit agent on the MOMAB and DMCTS on
the random MOMDP for a list of J values.
"""

import logging
import time
from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel

from esrmcts.bts import BtsDistribution, bts_new, bts_sample_mean, bts_update
from esrmcts.config import RunConfig
from esrmcts.core import UsageError, as_returns
from esrmcts.envs import BanditParams, bandit_pull
from esrmcts.harness.experiment import ExperimentResult, run_experiment
from esrmcts.utility import UtilityKind, UtilitySpec, eval_utility

logger = logging.getLogger(__name__)

SINGLE_ARM_CHECKPOINTS = (1, 8, 32, 128, 250, 300, 500)
RUNTIME_J_LIST = (10, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000)
MOMAB_J_LIST = (10, 100, 500, 1000)
RANDOM_MOMDP_J_LIST = (1, 2, 10, 100, 500, 1000)


def _require_j_list(j_list: Sequence[int]) -> List[int]:
    if not j_list:
        raise UsageError("J list must not be empty")
    if any(j < 1 for j in j_list):
        raise UsageError("Every J value must be at least 1")
    return list(j_list)


class SingleArmDemo(BaseModel):
    replicates: int
    updates: int
    checkpoints: Dict[int, List[float]]

    @property
    def final_mean(self) -> float:
        return float(np.mean(self.checkpoints[max(self.checkpoints)]))

    def __str__(self) -> str:
        result = f"Single-arm BTS, J={self.replicates}\n"
        for update, means in sorted(self.checkpoints.items()):
            result += (
                f"  after {update:>4} updates: mean {np.mean(means):.4f} "
                f"[{min(means):.4f}, {max(means):.4f}]\n"
            )
        return result.rstrip()


def ablation_single_arm(
    replicates: int = 25,
    updates: int = 500,
    seed: int = 0,
    checkpoints: Sequence[int] = SINGLE_ARM_CHECKPOINTS,
) -> SingleArmDemo:
    """Update one distribution from the Bernoulli pair arm under u = r1 * r2"""
    params = BanditParams.single_arm_demo()
    spec = UtilitySpec(kind=UtilityKind.PRODUCT)
    rng = np.random.default_rng(seed)
    d = bts_new(replicates)
    wanted = {c for c in checkpoints if 1 <= c <= updates}

    snapshots: Dict[int, List[float]] = {}
    for update in range(1, updates + 1):
        bts_update(d, eval_utility(spec, bandit_pull(params, 0, rng)), rng)
        if update in wanted:
            snapshots[update] = d.means().tolist()

    logger.info("Single-arm demo finished %d updates, mean %.4f", updates, d.means().mean())
    return SingleArmDemo(replicates=replicates, updates=updates, checkpoints=snapshots)


class RuntimeRow(BaseModel):
    replicates: int
    mean_seconds: float
    std_seconds: float


class RuntimeTable(BaseModel):
    updates: int
    repetitions: int
    rows: List[RuntimeRow]
    slope: float
    intercept: float
    r_squared: float

    def __str__(self) -> str:
        result = f"Seconds per {self.updates} BTS updates ({self.repetitions} repetitions)\n"
        result += "      J      mean       std\n"
        for row in self.rows:
            result += f"{row.replicates:>7} {row.mean_seconds:9.6f} {row.std_seconds:9.6f}\n"
        result += (
            f"fit: {self.slope:.3e} s/replicate + {self.intercept:.3e} s, "
            f"R^2 = {self.r_squared:.4f}"
        )
        return result


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares (slope, intercept, R^2)"""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.unique(x).size < 2:
        return 0.0, float(y.mean()), 1.0
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if total == 0 else 1.0 - residual / total
    return float(slope), float(intercept), r_squared


def _time_updates(d: BtsDistribution, utilities: Sequence[float], rng: np.random.Generator) -> float:
    started = time.perf_counter()
    for utility in utilities:
        bts_update(d, utility, rng)
    return time.perf_counter() - started


def ablation_bts_runtime(
    j_list: Sequence[int] = RUNTIME_J_LIST,
    updates: int = 1000,
    repetitions: int = 10,
    seed: int = 0,
) -> RuntimeTable:
    j_list = _require_j_list(j_list)
    if updates < 1 or repetitions < 1:
        raise UsageError("updates and repetitions must be at least 1")
    rng = np.random.default_rng(seed)

    rows = []
    for j in j_list:
        seconds = [
            _time_updates(bts_new(j), rng.random(updates).tolist(), rng)
            for _ in range(repetitions)
        ]
        rows.append(
            RuntimeRow(
                replicates=j,
                mean_seconds=float(np.mean(seconds)),
                std_seconds=float(np.std(seconds, ddof=1)) if repetitions > 1 else 0.0,
            )
        )
        logger.info("J=%d: %.6fs per %d updates", j, rows[-1].mean_seconds, updates)

    slope, intercept, r_squared = linear_fit(
        [r.replicates for r in rows], [r.mean_seconds for r in rows]
    )
    return RuntimeTable(
        updates=updates,
        repetitions=repetitions,
        rows=rows,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
    )


class BtsBanditAgent:
    """One bootstrap distribution per arm; arms are picked by Thompson sampling"""

    def __init__(
        self, arms: int, replicates: int, alpha_init: float = 1.0, beta_init: float = 1.0
    ):
        if arms < 1:
            raise UsageError("A bandit agent needs at least one arm")
        self.distributions = [bts_new(replicates, alpha_init, beta_init) for _ in range(arms)]

    def select(self, rng: np.random.Generator) -> int:
        samples = [bts_sample_mean(d, rng) for d in self.distributions]
        return int(np.argmax(samples))

    def update(self, arm: int, utility: float, rng: np.random.Generator) -> None:
        bts_update(self.distributions[arm], utility, rng)

    def means(self) -> List[float]:
        return [float(d.means().mean()) for d in self.distributions]


class BanditCurves(BaseModel):
    trials: int
    runs: int
    optimal_arm: int
    utility: Dict[int, List[float]]
    optimal_rate: Dict[int, List[float]]

    def trailing(self, replicates: int, window: int = 1000) -> tuple[float, float]:
        """(mean utility, optimal arm frequency) over the last ``window`` trials"""
        return (
            float(np.mean(self.utility[replicates][-window:])),
            float(np.mean(self.optimal_rate[replicates][-window:])),
        )

    def __str__(self) -> str:
        window = min(1000, self.trials)
        result = f"MOMAB, {self.trials} trials x {self.runs} runs, optimal arm {self.optimal_arm}\n"
        for j in sorted(self.utility):
            utility, rate = self.trailing(j, window)
            result += f"  J={j:>5}: trailing-{window} utility {utility:.4f}, optimal arm {rate:.3f}\n"
        return result.rstrip()


def ablation_momab(
    j_list: Sequence[int] = MOMAB_J_LIST,
    trials: int = 10000,
    runs: int = 10,
    seed: int = 0,
    params: BanditParams | None = None,
    spec: UtilitySpec | None = None,
) -> BanditCurves:
    """Per-J curves of the BTS bandit agent, averaged over ``runs`` seeded runs"""
    j_list = _require_j_list(j_list)
    params = params or BanditParams.momab()
    spec = spec or UtilitySpec(kind=UtilityKind.MOMAB_SCALED_PRODUCT)
    optimal_arm = int(np.argmax([eval_utility(spec, as_returns(m)) for m in params.means]))

    utility: Dict[int, List[float]] = {}
    optimal_rate: Dict[int, List[float]] = {}
    for j in j_list:
        totals = np.zeros(trials)
        hits = np.zeros(trials)
        for run_index in range(runs):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j, run_index)))
            agent = BtsBanditAgent(params.arms, j)
            for trial in range(trials):
                arm = agent.select(rng)
                u = eval_utility(spec, bandit_pull(params, arm, rng))
                agent.update(arm, u, rng)
                totals[trial] += u
                hits[trial] += arm == optimal_arm
        utility[j] = (totals / runs).tolist()
        optimal_rate[j] = (hits / runs).tolist()
        logger.info("MOMAB J=%d: final trailing utility %.4f", j, np.mean(utility[j][-1000:]))

    return BanditCurves(
        trials=trials,
        runs=runs,
        optimal_arm=optimal_arm,
        utility=utility,
        optimal_rate=optimal_rate,
    )


class JCurves(BaseModel):
    results: Dict[int, ExperimentResult]

    def __str__(self) -> str:
        result = "DMCTS on the random MOMDP\n"
        for j, r in sorted(self.results.items()):
            mean, stderr = r.trailing_summary()
            result += (
                f"  J={j:>5}: trailing-{r.trailing_window} utility {mean:.4f} "
                f"± {stderr:.4f}\n"
            )
        return result.rstrip()


def ablation_random_momdp(
    j_list: Sequence[int] = RANDOM_MOMDP_J_LIST,
    episodes: int = 2000,
    runs: int = 10,
    n_exec: int = 10,
    seed: int = 0,
    env_params: Dict | None = None,
    trailing_window: int = 100,
    workers: int = 1,
) -> JCurves:
    j_list = _require_j_list(j_list)
    results = {}
    for j in j_list:
        config = RunConfig(
            algorithm="dmcts",
            environment="random-momdp",
            env_params=env_params or {},
            n_exec=n_exec,
            episodes=episodes,
            runs=runs,
            seed=seed,
            replicates=j,
            trailing_window=min(trailing_window, episodes),
            workers=workers,
        )
        results[j] = run_experiment(config)
        logger.info("Random MOMDP J=%d: trailing utility %.4f", j, results[j].trailing_summary()[0])
    return JCurves(results=results)
