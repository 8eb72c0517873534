import os

import pytest
import yaml

from esrmcts.main import build_parser, config_from_args, find_config_file, main

TEST_CONFIG = os.path.join(os.path.dirname(__file__), "test_config.yaml")

SMALL_RUN = [
    "--env",
    "fishwood",
    "--env-config",
    "{env_config}",
    "--episodes",
    "3",
    "--runs",
    "2",
    "--n-exec",
    "2",
    "--J",
    "5",
]


@pytest.fixture(autouse=True)
def no_config_discovery(monkeypatch, tmp_path):
    """Keeps a developer's esrmcts.yaml or ESRMCTS_CONFIG out of the tests"""
    monkeypatch.delenv("ESRMCTS_CONFIG", raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def small_run(tmp_path):
    env_config = tmp_path / "fishwood.yaml"
    env_config.write_text(yaml.dump({"horizon": 3}))
    return [arg.format(env_config=env_config) for arg in SMALL_RUN]


def test_find_config_file(monkeypatch, tmp_path):
    assert find_config_file() is None
    assert find_config_file("explicit.yaml") == "explicit.yaml"

    monkeypatch.setenv("ESRMCTS_CONFIG", TEST_CONFIG)
    assert find_config_file() == TEST_CONFIG

    monkeypatch.delenv("ESRMCTS_CONFIG")
    (tmp_path / "esrmcts.yaml").write_text("runs: 3\n")
    assert find_config_file() == os.path.join(os.getcwd(), "esrmcts.yaml")


def test_flags_override_the_config_file():
    args = build_parser().parse_args(["--config", TEST_CONFIG, "--runs", "5", "--tree-persist", "on"])
    config = config_from_args(args)
    assert config.algorithm == "nlu-mcts"
    assert config.seed == 17
    assert config.runs == 5
    assert config.tree_persistence


def test_flags_without_a_config_file():
    args = build_parser().parse_args(["--algo", "nlu-mcts", "--C", "0.5", "--J", "7"])
    config = config_from_args(args)
    assert config.exploration == 0.5
    assert config.replicates == 7
    assert config.config_path is None


def test_run_writes_csv_and_summary(small_run, tmp_path, capsys):
    out = tmp_path / "result.csv"
    assert main(small_run + ["--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
    assert "runs: 2, episodes: 3" in capsys.readouterr().out


def test_identical_arguments_give_identical_bytes(small_run, tmp_path):
    assert main(small_run + ["--seed", "9", "--out", str(tmp_path / "a.csv")]) == 0
    assert main(small_run + ["--seed", "9", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_dump_tree(small_run, tmp_path):
    path = tmp_path / "tree.txt"
    assert main(small_run + ["--dump-tree", str(path)]) == 0
    assert path.read_text()


def test_config_errors_exit_with_2(small_run, capsys):
    assert main(small_run + ["--utility", "risk_seeking_sq"]) == 2
    assert "expects 1 objectives" in capsys.readouterr().err
    assert main(small_run + ["--runs", "0"]) == 2
    assert main(["--config", "no_such_file.yaml"]) == 2


def test_argparse_errors_exit_with_2():
    with pytest.raises(SystemExit) as exc:
        main(["--env", "gridworld"])
    assert exc.value.code == 2


def test_runtime_failure_exits_with_1(small_run, tmp_path):
    assert main(small_run + ["--out", str(tmp_path / "missing" / "result.csv")]) == 1


def test_single_arm_ablation(capsys):
    assert main(["--ablation", "single-arm", "--seed", "3"]) == 0
    assert "Single-arm BTS, J=25" in capsys.readouterr().out


def test_bts_runtime_ablation(capsys):
    assert main(["--ablation", "bts-runtime", "--J-list", "10,20"]) == 0
    assert "R^2" in capsys.readouterr().out


def test_random_momdp_ablation_writes_one_csv_per_j(tmp_path):
    out = tmp_path / "momdp.csv"
    args = [
        "--ablation",
        "random-momdp",
        "--J-list",
        "1,2",
        "--episodes",
        "2",
        "--runs",
        "1",
        "--n-exec",
        "2",
        "--trailing-window",
        "2",
        "--out",
        str(out),
    ]
    assert main(args) == 0
    assert (tmp_path / "momdp_J1.csv").exists()
    assert (tmp_path / "momdp_J2.csv").exists()


def test_random_momdp_ablation_ignores_other_environment_params(tmp_path):
    config = tmp_path / "fishwood.yaml"
    config.write_text(
        yaml.dump(
            {
                "environment": "fishwood",
                "env_params": {"p_fish": 0.3},
                "episodes": 2,
                "runs": 1,
                "n_exec": 2,
                "trailing_window": 2,
            }
        )
    )
    args = ["--config", str(config), "--ablation", "random-momdp", "--J-list", "1"]
    assert main(args) == 0


def test_momab_ablation_trials_follow_the_experiment_file(monkeypatch, tmp_path):
    calls = []

    def fake_momab(j_list, trials, runs, seed):
        calls.append(trials)
        return "momab"

    monkeypatch.setattr("esrmcts.main.ablation_momab", fake_momab)
    config = tmp_path / "momab.yaml"
    config.write_text(yaml.dump({"environment": "momab", "episodes": 50}))

    assert main(["--config", str(config), "--ablation", "momab"]) == 0
    assert main(["--ablation", "momab", "--episodes", "30"]) == 0
    assert main(["--ablation", "momab"]) == 0
    assert calls == [50, 30, 10000]


def test_random_momdp_ablation_defaults(monkeypatch):
    calls = []

    def fake_random_momdp(j_list, **kwargs):
        calls.append(kwargs)
        return "momdp"

    monkeypatch.setattr("esrmcts.main.ablation_random_momdp", fake_random_momdp)
    assert main(["--ablation", "random-momdp", "--J-list", "1"]) == 0
    assert calls[0]["episodes"] == 2000
    assert calls[0]["n_exec"] == 10
    assert calls[0]["env_params"] == {}
