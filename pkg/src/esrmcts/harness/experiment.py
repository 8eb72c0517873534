import asyncio
import logging
import math
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from functools import partial
from typing import Any, Dict, List, Sequence

import numpy as np
from pydantic import BaseModel

from esrmcts.config import ConfigurationError, RunConfig
from esrmcts.core import EnvironmentModel, UsageError, derive_streams, zero_returns
from esrmcts.envs import default_utility, environment_for
from esrmcts.planners import new_tree, planner_kind, run_episode
from esrmcts.utility import UtilitySpec, eval_utility, min_max_scale, parse_utility

logger = logging.getLogger(__name__)


def trailing_mean(series: Sequence[float], window: int) -> List[float]:
    """Mean of the last ``window`` entries up to and including each position"""
    values = np.asarray(series, dtype=np.float64)
    sums = np.concatenate(([0.0], np.cumsum(values)))
    ends = np.arange(1, values.size + 1)
    starts = np.maximum(ends - window, 0)
    return ((sums[ends] - sums[starts]) / (ends - starts)).tolist()


def mean_and_stderr(columns: Sequence[Sequence[float]]) -> tuple[List[float], List[float]]:
    """Per-position mean across runs (compensated summation) and its standard error"""
    runs = len(columns)
    mean, stderr = [], []
    for values in zip(*columns):
        m = math.fsum(values) / runs
        mean.append(m)
        if runs > 1:
            variance = math.fsum((v - m) ** 2 for v in values) / (runs - 1)
            stderr.append(math.sqrt(variance / runs))
        else:
            stderr.append(0.0)
    return mean, stderr


class ExperimentResult(BaseModel):
    utilities: List[List[float]]
    mean: List[float]
    stderr: List[float]
    trailing_mean: List[float]
    trailing_window: int
    metadata: Dict[str, Any] = {}
    wall_times: List[float] = []

    @classmethod
    def from_utilities(
        cls,
        utilities: List[List[float]],
        trailing_window: int = 100,
        metadata: Dict[str, Any] | None = None,
        wall_times: List[float] | None = None,
    ) -> "ExperimentResult":
        if not utilities or not utilities[0]:
            raise UsageError("An experiment result needs at least one run and one episode")
        mean, stderr = mean_and_stderr(utilities)
        return cls(
            utilities=utilities,
            mean=mean,
            stderr=stderr,
            trailing_mean=trailing_mean(mean, trailing_window),
            trailing_window=trailing_window,
            metadata=metadata or {},
            wall_times=wall_times or [],
        )

    @property
    def runs(self) -> int:
        return len(self.utilities)

    @property
    def episodes(self) -> int:
        return len(self.mean)

    def scaled_trailing_mean(self) -> List[float]:
        """Trailing mean curve mapped onto [0, 1]"""
        return min_max_scale(self.trailing_mean)

    def trailing_summary(self, window: int | None = None) -> tuple[float, float]:
        """Mean utility over each run's last ``window`` episodes, averaged over runs, with stderr"""
        window = window or self.trailing_window
        per_run = [[math.fsum(run[-window:]) / len(run[-window:])] for run in self.utilities]
        mean, stderr = mean_and_stderr(per_run)
        return mean[0], stderr[0]

    def __str__(self) -> str:
        final_mean, final_stderr = self.trailing_summary()
        result = ""
        for key in ("environment", "algorithm", "utility"):
            if key in self.metadata:
                result += f"{key}: {self.metadata[key]}\n"
        result += f"runs: {self.runs}, episodes: {self.episodes}\n"
        result += (
            f"trailing-{self.trailing_window} mean utility: "
            f"{final_mean:.6g} ± {final_stderr:.3g}\n"
        )
        if self.wall_times:
            result += f"wall time per run: {np.mean(self.wall_times):.2f}s"
        return result.rstrip()


class RunOutcome(BaseModel):
    run_index: int
    utilities: List[float]
    seconds: float
    tree_dump: str | None = None


def resolve_utility(config: RunConfig, model: EnvironmentModel) -> UtilitySpec:
    text = config.utility or default_utility(config.environment)
    try:
        spec = parse_utility(text)
    except UsageError as e:
        raise ConfigurationError(str(e)) from e
    if not spec.accepts(model.n_objectives):
        raise ConfigurationError(
            f"Utility {spec.kind.value} expects {spec.arity} objectives but environment "
            f"{config.environment} has {model.n_objectives}"
        )
    return spec


def run_single(config: RunConfig, run_index: int, dump_tree: bool = False) -> RunOutcome:
    """One seeded repetition of ``config.episodes`` episodes"""
    started = time.perf_counter()
    model = environment_for(config)
    spec = resolve_utility(config, model)
    kind = planner_kind(config)
    planner_rng, env_rng = derive_streams(config.seed, run_index)
    tree = new_tree(model, config.reward_tolerance) if config.tree_persistence else None

    utilities = []
    episode = None
    for index in range(config.episodes):
        if dump_tree and tree is None and index == config.episodes - 1:
            # keep the last episode's tree; pruning never changes the chosen actions
            tree = new_tree(model, config.reward_tolerance)
        episode = run_episode(model, kind, spec, config, planner_rng, env_rng=env_rng, tree=tree)
        utilities.append(episode.utility)

    seconds = time.perf_counter() - started
    logger.info(
        "Run %d finished %d episodes in %.2fs, last utility %s",
        run_index,
        config.episodes,
        seconds,
        episode.utility,
    )
    return RunOutcome(
        run_index=run_index,
        utilities=utilities,
        seconds=seconds,
        tree_dump=tree.dump() if dump_tree and tree is not None else None,
    )


def _metadata(config: RunConfig, spec: UtilitySpec) -> Dict[str, Any]:
    metadata = config.model_dump()
    metadata["utility"] = str(spec)
    return metadata


def _collect(
    config: RunConfig,
    spec: UtilitySpec,
    outcomes: List[RunOutcome],
    dump_tree_path: str | None = None,
) -> ExperimentResult:
    outcomes = sorted(outcomes, key=lambda o: o.run_index)
    if dump_tree_path is not None:
        write_tree_dump(outcomes[0].tree_dump or "", dump_tree_path)
    return ExperimentResult.from_utilities(
        [o.utilities for o in outcomes],
        trailing_window=config.trailing_window,
        metadata=_metadata(config, spec),
        wall_times=[o.seconds for o in outcomes],
    )


def write_tree_dump(dump: str, path: str) -> None:
    try:
        with open(path, "w") as f:
            f.write(dump)
    except OSError as e:
        raise OSError(f"Cannot write tree dump to {path}: {e}") from e


async def run_experiment_async(
    config: RunConfig,
    executor: Executor | None = None,
    dump_tree_path: str | None = None,
) -> ExperimentResult:
    """Run every repetition in ``executor`` (the loop's default thread pool if None)"""
    spec = resolve_utility(config, environment_for(config))
    logger.info("Starting %d runs of %s on %s", config.runs, config.algorithm, config.environment)

    loop = asyncio.get_running_loop()
    tasks = [
        loop.run_in_executor(
            executor,
            partial(
                run_single,
                config,
                run_index,
                dump_tree=dump_tree_path is not None and run_index == 0,
            ),
        )
        for run_index in range(config.runs)
    ]
    outcomes = await asyncio.gather(*tasks)
    return _collect(config, spec, list(outcomes), dump_tree_path)


def run_experiment(config: RunConfig, dump_tree_path: str | None = None) -> ExperimentResult:
    """Run ``config.runs`` independent seeded repetitions; identical for any worker count"""
    spec = resolve_utility(config, environment_for(config))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return asyncio.run(run_experiment_async(config, pool, dump_tree_path))

    logger.info("Starting %d runs of %s on %s", config.runs, config.algorithm, config.environment)
    outcomes = [
        run_single(config, run_index, dump_tree=dump_tree_path is not None and run_index == 0)
        for run_index in range(config.runs)
    ]
    return _collect(config, spec, outcomes, dump_tree_path)


def random_policy_baseline(
    model: EnvironmentModel, spec: UtilitySpec, episodes: int, rng: np.random.Generator
) -> float:
    """Mean utility of the uniform random policy over ``episodes`` sampled episodes"""
    total = []
    for _ in range(episodes):
        state = model.initial_state()
        returns = zero_returns(model.n_objectives)
        terminal = model.is_terminal(state)
        while not terminal:
            action = rng.integers(model.num_actions(state))
            state, reward, terminal = model.step(state, action, rng)
            returns = returns + reward
        total.append(eval_utility(spec, returns))
    return math.fsum(total) / episodes
