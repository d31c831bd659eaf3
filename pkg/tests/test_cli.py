import csv
import json

import pytest

from meshsense.cli import main
from meshsense.experiment import RESULT_COLUMNS, load_results

TINY = {
    "trial": {
        "scenario": {"name": "tiny", "side_m": 30.0, "n_nodes": 9, "placement": "uniform"},
        "decision_vars": {
            "sharing_frequency": 2,
            "resend_threshold": 5,
            "strategy": "least-interacted",
        },
    },
    "scenarios": [{"name": "tiny", "side_m": 30.0, "n_nodes": 9, "placement": "uniform"}],
    "grid": {
        "sharing_frequency": [1, 3],
        "resend_threshold": [0, 10],
        "strategy": ["random", "least-interacted"],
    },
    "repetitions": 2,
    "base_seed": 7,
}


@pytest.fixture
def tiny_config_path(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY))
    return path


def rows_without_wall_time(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return [row[:-1] for row in rows]


# --- trial ---------------------------------------------------------------------


def test_trial_writes_run_directory(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["trial", "--config", str(tiny_config_path), "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "reliability=" in captured and "latency_generations=" in captured
    assert (out / "config.json").exists()
    assert (out / "topology.json").exists()
    assert (out / "results.csv").exists()
    assert len(list((out / "traces").glob("*.csv"))) == 1
    topology = json.loads((out / "topology.json").read_text())
    assert len(topology["nodes"]) == 9
    (result,) = load_results(out / "results.csv")
    assert result.objectives is not None


def test_trial_seed_reproducible(tiny_config_path, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert (
            main(
                [
                    "trial",
                    "--config",
                    str(tiny_config_path),
                    "--seed",
                    "123",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        outs.append(out)
    a, b = outs
    assert rows_without_wall_time(a / "results.csv") == rows_without_wall_time(b / "results.csv")
    assert (a / "topology.json").read_bytes() == (b / "topology.json").read_bytes()
    trace_a = next((a / "traces").glob("*.csv")).read_bytes()
    trace_b = next((b / "traces").glob("*.csv")).read_bytes()
    assert trace_a == trace_b


def test_trial_reports_non_convergence_at_cap(tiny_config_path, tmp_path, capsys):
    cfg = json.loads(tiny_config_path.read_text())
    cfg["thresholds"] = {"psi": 0.9995, "theta": 0.999, "max_rounds": 3}
    tiny_config_path.write_text(json.dumps(cfg))
    assert main(["trial", "--config", str(tiny_config_path), "--out", str(tmp_path / "r")]) == 0
    out = capsys.readouterr().out
    assert "did not converge within max_rounds=3" in out
    assert "converged=false" in out


def test_trial_activity_violation_exit_2(tiny_config_path, tmp_path, capsys):
    cfg = json.loads(tiny_config_path.read_text())
    cfg["node"] = {"max_energy_j": 1e-9}
    tiny_config_path.write_text(json.dumps(cfg))
    assert main(["trial", "--config", str(tiny_config_path), "--out", str(tmp_path / "r")]) == 2
    assert "constraint violation: activity" in capsys.readouterr().err


def test_trial_infeasible_topology_exit_3(tiny_config_path, tmp_path, capsys):
    cfg = json.loads(tiny_config_path.read_text())
    cfg["trial"]["scenario"] = {
        "name": "sparse",
        "side_m": 10000.0,
        "n_nodes": 2,
        "placement": "random",
    }
    tiny_config_path.write_text(json.dumps(cfg))
    assert main(["trial", "--config", str(tiny_config_path), "--out", str(tmp_path / "r")]) == 3
    assert "infeasible topology" in capsys.readouterr().err


def test_config_error_exit_4(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"thresholds": {"psi": 0.5, "theta": 0.9}}))
    assert main(["trial", "--config", str(bad), "--out", str(tmp_path / "r")]) == 4
    assert "config error" in capsys.readouterr().err


def test_unreadable_config_exit_4(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["trial", "--config", str(missing), "--out", str(tmp_path / "r")]) == 4


# --- sweep ---------------------------------------------------------------------


def test_sweep_row_count_and_summary(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(tiny_config_path), "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    assert "16 rows" in summary
    assert len(load_results(out / "results.csv")) == 16  # 2*2*2 grid x 2 reps


def test_sweep_refuses_existing_results_without_force(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(tiny_config_path), "--out", str(out)]) == 0
    assert main(["sweep", "--config", str(tiny_config_path), "--out", str(out)]) == 1
    assert "--force" in capsys.readouterr().err
    assert (
        main(["sweep", "--config", str(tiny_config_path), "--out", str(out), "--force"]) == 0
    )


def test_sweep_scenario_filter(tiny_config_path, tmp_path):
    out = tmp_path / "sweep"
    assert (
        main(
            [
                "sweep",
                "--config",
                str(tiny_config_path),
                "--out",
                str(out),
                "--scenario",
                "tiny",
            ]
        )
        == 0
    )
    results = load_results(out / "results.csv")
    assert len(results) == 16
    assert all(r.scenario.name == "tiny" for r in results)


# --- pareto --------------------------------------------------------------------


@pytest.fixture
def sweep_dir(tiny_config_path, tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(tiny_config_path), "--out", str(out)]) == 0
    return out


def test_pareto_writes_front_subset(sweep_dir, capsys):
    assert (
        main(["pareto", str(sweep_dir / "results.csv"), "--out", str(sweep_dir), "--verify"])
        == 0
    )
    out = capsys.readouterr().out
    assert "front verified against brute-force filter" in out
    with open(sweep_dir / "pareto_points.csv") as fh:
        points = list(csv.DictReader(fh))
    with open(sweep_dir / "pareto_front.csv") as fh:
        front = list(csv.DictReader(fh))
    assert 1 <= len(front) <= len(points)
    point_ids = {r["row_id"] for r in points}
    assert {r["row_id"] for r in front} <= point_ids


def test_pareto_single_row_is_front(sweep_dir, tmp_path):
    (row,) = [r for r in load_results(sweep_dir / "results.csv")][:1]
    from meshsense.experiment import write_results

    single = tmp_path / "single.csv"
    write_results([row], single)
    out = tmp_path / "pareto"
    assert main(["pareto", str(single), "--out", str(out)]) == 0
    with open(out / "pareto_front.csv") as fh:
        front = list(csv.DictReader(fh))
    assert len(front) == 1
    assert front[0]["score"] == "1.0"


def test_pareto_empty_input_error(tmp_path, capsys):
    empty = tmp_path / "results.csv"
    empty.write_text(",".join(RESULT_COLUMNS) + "\r\n")
    assert main(["pareto", str(empty), "--out", str(tmp_path / "p")]) == 1
    assert "no Pareto candidates" in capsys.readouterr().err


def test_pareto_aggregate_mode(sweep_dir, tmp_path):
    out = tmp_path / "agg"
    assert (
        main(
            ["pareto", str(sweep_dir / "results.csv"), "--out", str(out), "--aggregate"]
        )
        == 0
    )
    with open(out / "pareto_points.csv") as fh:
        points = list(csv.DictReader(fh))
    assert all(p["row_id"].endswith("-agg2") for p in points)
