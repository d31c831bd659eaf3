import csv
import json
import subprocess
import sys
import warnings
from pathlib import Path

import pytest

from meshplots.figures import TooFewFrontPointsError, plot_front, plot_series, plot_topology
from meshplots.io import MissingRunFileError

DESK_CONFIG = {
    "scenarios": [{"name": "desk", "side_m": 100.0, "n_nodes": 16, "placement": "uniform"}],
    "grid": {
        "sharing_frequency": [1, 3, 5],
        "resend_threshold": [0, 25, 50],
        "strategy": ["least-interacted"],
    },
    "node": {"message_send_success_rate": 0.9},
    "repetitions": 2,
    "base_seed": 3,
}


def run_primary(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "meshsense.cli", *argv], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory) -> Path:
    """A completed desk-scale run directory built through the public CLI."""
    root = tmp_path_factory.mktemp("desk")
    config_path = root / "desk.json"
    config_path.write_text(json.dumps(DESK_CONFIG))
    run_dir = root / "run"
    run_primary("sweep", "--config", str(config_path), "--out", str(run_dir), "--trace")
    run_primary("pareto", str(run_dir / "results.csv"), "--out", str(run_dir))
    return run_dir


def snapshot(run_dir: Path):
    return sorted((p.relative_to(run_dir), p.stat().st_size) for p in run_dir.rglob("*"))


def test_topology_markers_match_node_count(desk_run, tmp_path):
    before = snapshot(desk_run)
    paths, meta = plot_topology(desk_run, tmp_path / "topology.png")
    assert all(p.exists() for p in paths)
    topology_file = next(desk_run.glob("topology_*.json"))
    nodes = json.loads(topology_file.read_text())["nodes"]
    assert meta["n_markers"] == len(nodes) == 16
    assert meta["n_profiles"] == 3
    assert snapshot(desk_run) == before  # read-only contract


def test_series_renders_three_figures(desk_run, tmp_path):
    paths, meta = plot_series(desk_run, tmp_path / "series.png")
    assert len(paths) == 3
    assert all(p.exists() for p in paths)
    suffixes = {p.stem.split("_")[-1] for p in paths}
    assert suffixes == {"reliability", "energy", "accuracy"}
    trace = sorted((desk_run / "traces").glob("*.csv"))[0]  # the one plot_series picks
    with open(trace) as fh:
        n_rows = len(list(csv.DictReader(fh)))
    assert meta["n_generations"] == n_rows
    assert meta["convergence_generation"] is not None


def test_scatter_outlines_match_front_csv(desk_run, tmp_path):
    paths, meta = plot_front(
        desk_run / "pareto_points.csv", desk_run / "pareto_front.csv", tmp_path / "front.png"
    )
    assert len(paths) == 3  # three camera angles
    assert all(p.exists() for p in paths)
    with open(desk_run / "pareto_front.csv") as fh:
        front_rows = len(list(csv.DictReader(fh)))
    assert meta["n_outlined"] == front_rows
    with open(desk_run / "pareto_points.csv") as fh:
        point_rows = len(list(csv.DictReader(fh)))
    assert meta["n_points"] == point_rows


def test_front_mesh_renders_surface(desk_run, tmp_path):
    paths, meta = plot_front(
        desk_run / "pareto_points.csv",
        desk_run / "pareto_front.csv",
        tmp_path / "mesh.png",
        with_mesh=True,
    )
    assert len(paths) == 3
    assert meta["with_mesh"] is True
    assert meta["n_outlined"] >= 3


def test_cli_renders_all_four_kinds(desk_run, tmp_path):
    for kind in ("topology", "series", "scatter3d", "front-mesh"):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "meshplots.cli",
                kind,
                "--run",
                str(desk_run),
                "--out",
                str(tmp_path / f"{kind}.png"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        printed = [Path(line) for line in proc.stdout.splitlines()]
        assert printed and all(p.exists() for p in printed)


def test_figures_deterministic(desk_run, tmp_path):
    a, _ = plot_topology(desk_run, tmp_path / "a.png")
    b, _ = plot_topology(desk_run, tmp_path / "b.png")
    assert a[0].read_bytes() == b[0].read_bytes()


def test_missing_topology_errors(tmp_path):
    with pytest.raises(MissingRunFileError):
        plot_topology(tmp_path, tmp_path / "x.png")


def test_missing_traces_error(tmp_path):
    with pytest.raises(MissingRunFileError):
        plot_series(tmp_path, tmp_path / "x.png")


def test_cli_missing_files_exit_nonzero(tmp_path):
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "meshplots.cli",
            "topology",
            "--run",
            str(tmp_path),
            "--out",
            str(tmp_path / "x.png"),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "error:" in proc.stderr


def write_pareto_pair(directory: Path, rows):
    header = "row_id,reliability,energy_j,latency_gens,score,on_front\n"
    body = "".join(
        f"{rid},{r},{e},{l},{s},true\n" for rid, r, e, l, s in rows
    )
    (directory / "pareto_points.csv").write_text(header + body)
    (directory / "pareto_front.csv").write_text(header + body)


def test_mesh_with_too_few_points_errors(tmp_path):
    write_pareto_pair(tmp_path, [("a", 0.9, 1.0, 2, 1.0), ("b", 0.8, 2.0, 3, 0.0)])
    with pytest.raises(TooFewFrontPointsError):
        plot_front(
            tmp_path / "pareto_points.csv",
            tmp_path / "pareto_front.csv",
            tmp_path / "m.png",
            with_mesh=True,
        )


def test_degenerate_geometry_warns_but_renders(tmp_path):
    # identical (energy, latency) coordinates cannot be triangulated
    write_pareto_pair(
        tmp_path,
        [("a", 0.9, 1.0, 2, 1.0), ("b", 0.8, 1.0, 2, 0.5), ("c", 0.7, 1.0, 2, 0.0)],
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        paths, meta = plot_front(
            tmp_path / "pareto_points.csv",
            tmp_path / "pareto_front.csv",
            tmp_path / "m.png",
            with_mesh=True,
        )
    assert any("degenerate" in str(w.message) for w in caught)
    assert meta["with_mesh"] is False
    assert all(p.exists() for p in paths)
