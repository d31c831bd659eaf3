"""Readers for the files a run directory exports."""

from __future__ import annotations

import csv
import json
from pathlib import Path


class MissingRunFileError(FileNotFoundError):
    pass


def find_topology(run_dir: Path) -> Path:
    """topology.json if present, else the first per-scenario export."""
    direct = run_dir / "topology.json"
    if direct.exists():
        return direct
    candidates = sorted(run_dir.glob("topology_*.json"))
    if not candidates:
        raise MissingRunFileError(f"no topology JSON in {run_dir}")
    return candidates[0]


def load_topology(path: Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("side_m", "tx_range_m", "nodes"):
        if key not in doc:
            raise ValueError(f"{path}: missing {key!r}")
    return doc


def find_trace(run_dir: Path) -> Path:
    traces = sorted((run_dir / "traces").glob("*.csv")) if (run_dir / "traces").is_dir() else []
    if not traces:
        raise MissingRunFileError(f"no trace CSVs under {run_dir}/traces")
    return traces[0]


def load_series(path: Path) -> dict[str, list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trace")
    return {key: [float(row[key]) for row in rows] for key in rows[0]}


def load_thresholds(run_dir: Path) -> tuple[float, float] | None:
    """(psi, theta) from the config sidecar when available."""
    path = run_dir / "config.json"
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    thresholds = doc.get("thresholds", {})
    if "psi" in thresholds and "theta" in thresholds:
        return float(thresholds["psi"]), float(thresholds["theta"])
    return None


def load_convergence_generation(run_dir: Path, trace_stem: str) -> int | None:
    """Latency of the results row matching a trace file name, if converged."""
    path = run_dir / "results.csv"
    if not path.exists():
        return None
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            row_id = (
                f"{row['scenario']}-f{row['sharing_frequency']}-t{row['resend_threshold']}"
                f"-{row['strategy']}-r{row['repetition']}"
            )
            if row_id == trace_stem and row["converged"] == "true" and row["latency_gens"]:
                return int(row["latency_gens"])
    return None


def load_points_csv(path: Path) -> dict[str, list]:
    if not Path(path).exists():
        raise MissingRunFileError(f"missing Pareto CSV {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {
        "row_id": [r["row_id"] for r in rows],
        "reliability": [float(r["reliability"]) for r in rows],
        "energy_j": [float(r["energy_j"]) for r in rows],
        "latency_gens": [float(r["latency_gens"]) for r in rows],
        "score": [float(r["score"]) for r in rows],
    }
