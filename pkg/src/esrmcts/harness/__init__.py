from esrmcts.harness.ablations import (
    BtsBanditAgent,
    ablation_bts_runtime,
    ablation_momab,
    ablation_random_momdp,
    ablation_single_arm,
)
from esrmcts.harness.csv_output import read_csv, write_csv
from esrmcts.harness.experiment import (
    ExperimentResult,
    random_policy_baseline,
    resolve_utility,
    run_experiment,
    run_experiment_async,
    run_single,
)

__all__ = [
    "BtsBanditAgent",
    "ablation_bts_runtime",
    "ablation_momab",
    "ablation_random_momdp",
    "ablation_single_arm",
    "read_csv",
    "write_csv",
    "ExperimentResult",
    "random_policy_baseline",
    "resolve_utility",
    "run_experiment",
    "run_experiment_async",
    "run_single",
]
