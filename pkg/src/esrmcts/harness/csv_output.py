import csv
import logging
from typing import List

from esrmcts.core import UsageError
from esrmcts.harness.experiment import ExperimentResult

logger = logging.getLogger(__name__)


def csv_header(runs: int) -> List[str]:
    return (
        ["episode", "mean_utility", "stderr"]
        + [f"run_{k}" for k in range(runs)]
        + ["trailing_mean", "scaled_trailing_mean"]
    )


def write_csv(result: ExperimentResult, path: str) -> None:
    """One row per episode; floats are written with repr so they read back exactly"""
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(csv_header(result.runs))
            scaled = result.scaled_trailing_mean()
            for episode in range(result.episodes):
                writer.writerow(
                    [episode, repr(result.mean[episode]), repr(result.stderr[episode])]
                    + [repr(run[episode]) for run in result.utilities]
                    + [repr(result.trailing_mean[episode]), repr(scaled[episode])]
                )
    except OSError as e:
        raise OSError(f"Cannot write results to {path}: {e}") from e
    logger.info("Wrote %d episodes x %d runs to %s", result.episodes, result.runs, path)


def read_csv(path: str) -> ExperimentResult:
    """Rebuild a result (without metadata) from a file written by ``write_csv``"""
    try:
        with open(path, "r", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise OSError(f"Cannot read results from {path}: {e}") from e

    if not rows:
        raise UsageError(f"{path} is empty")
    header = rows[0]
    run_columns = [i for i, name in enumerate(header) if name.startswith("run_")]
    if header != csv_header(len(run_columns)):
        raise UsageError(f"{path} does not have a results header")

    body = rows[1:]
    utilities = [[float(row[i]) for row in body] for i in run_columns]
    trailing = [float(row[-2]) for row in body]
    return ExperimentResult(
        utilities=utilities,
        mean=[float(row[1]) for row in body],
        stderr=[float(row[2]) for row in body],
        trailing_mean=trailing,
        trailing_window=0,
    )
