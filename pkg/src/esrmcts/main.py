"""
esrmcts command line: run NLU-MCTS or DMCTS experiments on the benchmark
environments, or one of the bootstrap distribution ablations.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List

import yaml
from pydantic import ValidationError

from esrmcts.config import ConfigurationError, RunConfig, read_config_data
from esrmcts.core import UsageError
from esrmcts.harness import (
    ablation_bts_runtime,
    ablation_momab,
    ablation_random_momdp,
    ablation_single_arm,
    run_experiment,
    write_csv,
)
from esrmcts.harness.ablations import MOMAB_J_LIST, RANDOM_MOMDP_J_LIST, RUNTIME_J_LIST

logger = logging.getLogger(__name__)

# argparse destination -> RunConfig field
_OVERRIDES = {
    "env": "environment",
    "algo": "algorithm",
    "utility": "utility",
    "episodes": "episodes",
    "n_exec": "n_exec",
    "runs": "runs",
    "seed": "seed",
    "C": "exploration",
    "J": "replicates",
    "alpha_init": "alpha_init",
    "beta_init": "beta_init",
    "env_config": "env_config",
    "trailing_window": "trailing_window",
    "workers": "workers",
}

ABLATIONS = ("single-arm", "bts-runtime", "momab", "random-momdp")


def find_config_file(cli_path: str | None = None) -> str | None:
    """Looks for an experiment file in the following places:
    1. --config flag (if provided)
    2. ESRMCTS_CONFIG environment variable
    3. ./esrmcts.yaml (current working directory)
    No file is required; flags alone describe an experiment.
    """
    if cli_path:
        return cli_path

    env_config = os.environ.get("ESRMCTS_CONFIG")
    if env_config and os.path.exists(env_config):
        return env_config

    cwd_config = os.path.join(os.getcwd(), "esrmcts.yaml")
    if os.path.exists(cwd_config):
        return cwd_config

    return None


def _j_list(text: str) -> List[int]:
    try:
        return [int(j) for j in text.split(",") if j.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esrmcts",
        description="Monte Carlo tree search for nonlinear utility functions (ESR criterion)",
    )
    parser.add_argument("--config", help="YAML experiment file")
    parser.add_argument(
        "--env",
        choices=["fishwood", "stock", "redeed", "random-momdp", "momab", "single-arm"],
    )
    parser.add_argument("--algo", choices=["nlu-mcts", "dmcts"])
    parser.add_argument("--utility", help="<name>[:param=val,...]")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--n-exec", dest="n_exec", type=int)
    parser.add_argument("--runs", type=int, help="independent seeded runs (default 10)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--C", dest="C", type=float, help="UCB exploration constant (default sqrt 2)")
    parser.add_argument("--J", dest="J", type=int, help="bootstrap replicates (default 100)")
    parser.add_argument("--alpha-init", dest="alpha_init", type=float)
    parser.add_argument("--beta-init", dest="beta_init", type=float)
    parser.add_argument("--tree-persist", dest="tree_persist", choices=["on", "off"])
    parser.add_argument("--out", help="write per-episode utilities to this CSV file")
    parser.add_argument("--env-config", dest="env_config", help="flat YAML environment parameters")
    parser.add_argument("--trailing-window", dest="trailing_window", type=int)
    parser.add_argument("--workers", type=int, help="run repetitions in this many processes")
    parser.add_argument("--dump-tree", dest="dump_tree", help="write the final tree of run 0 here")
    parser.add_argument("--ablation", choices=ABLATIONS)
    parser.add_argument("--J-list", dest="j_list", type=_j_list, help="comma-separated J values")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """File values first (if a file is found), command line flags on top"""
    data: Dict[str, Any] = {}
    config_path = find_config_file(args.config)
    if config_path:
        try:
            data = dict(read_config_data(config_path), config_path=config_path)
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Cannot load experiment file {config_path}: {e}") from e

    for name, field in _OVERRIDES.items():
        value = getattr(args, name)
        if value is not None:
            data[field] = value
    if args.tree_persist is not None:
        data["tree_persistence"] = args.tree_persist == "on"
    return RunConfig(**data)


def _suffixed(path: str, suffix: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_{suffix}{ext or '.csv'}"


def _chosen(config: RunConfig, field: str, default: Any) -> Any:
    """``config.<field>`` if a file or flag set it, else the ablation's own default"""
    return getattr(config, field) if field in config.model_fields_set else default


def run_ablation(args: argparse.Namespace, config: RunConfig) -> str:
    if args.ablation == "single-arm":
        return str(ablation_single_arm(replicates=args.J or 25, seed=config.seed))

    if args.ablation == "bts-runtime":
        return str(ablation_bts_runtime(args.j_list or RUNTIME_J_LIST, seed=config.seed))

    if args.ablation == "momab":
        curves = ablation_momab(
            args.j_list or MOMAB_J_LIST,
            trials=_chosen(config, "episodes", 10000),
            runs=config.runs,
            seed=config.seed,
        )
        return str(curves)

    env_params = None
    if config.environment == "random-momdp" or "environment" not in config.model_fields_set:
        env_params = config.merged_env_params()
    elif config.env_params or config.env_config:
        logger.warning(
            "Ignoring %s environment parameters in the random MOMDP ablation", config.environment
        )
    curves = ablation_random_momdp(
        args.j_list or RANDOM_MOMDP_J_LIST,
        episodes=_chosen(config, "episodes", 2000),
        runs=config.runs,
        n_exec=_chosen(config, "n_exec", 10),
        seed=config.seed,
        env_params=env_params,
        trailing_window=config.trailing_window,
        workers=config.workers,
    )
    if args.out:
        for j, result in curves.results.items():
            write_csv(result, _suffixed(args.out, f"J{j}"))
    return str(curves)


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = config_from_args(args)
        if args.ablation:
            print(run_ablation(args, config))
            return 0

        result = run_experiment(config, dump_tree_path=args.dump_tree)
        if args.out:
            write_csv(result, args.out)
        print(result)
        return 0
    except (UsageError, ValidationError) as e:
        print(f"esrmcts: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception("Experiment failed")
        print(f"esrmcts: failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
