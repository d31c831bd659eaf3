"""Non-dominated filtering of objective triples and display scoring.

Reliability is maximized; energy and latency are minimized. Only
violation-free, converged rows become candidate points. The performance
score is min-max normalization averaged across the three objectives; it is
display metadata and never affects front membership.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

from .experiment import SimResult

PARETO_COLUMNS = ["row_id", "reliability", "energy_j", "latency_gens", "score", "on_front"]


@dataclass(frozen=True)
class ObjectivePoint:
    reliability: float
    energy_j: float
    latency_gens: float
    row_id: str


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """a is at least as good everywhere and strictly better somewhere."""
    if a.reliability < b.reliability or a.energy_j > b.energy_j or a.latency_gens > b.latency_gens:
        return False
    return (
        a.reliability > b.reliability
        or a.energy_j < b.energy_j
        or a.latency_gens < b.latency_gens
    )


def front_indices(points: list[ObjectivePoint]) -> list[int]:
    """Indices of the non-dominated points, ascending.

    Candidates are visited best-first (by reliability, then energy, then
    latency), so any dominator of a point is already on the partial front
    and each candidate only needs checking against it. Duplicates of a
    front point never dominate each other and are all retained.
    """
    order = sorted(
        range(len(points)),
        key=lambda i: (-points[i].reliability, points[i].energy_j, points[i].latency_gens),
    )
    front_idx: list[int] = []
    for i in order:
        if not any(dominates(points[j], points[i]) for j in front_idx):
            front_idx.append(i)
    return sorted(front_idx)


def pareto_front(points: list[ObjectivePoint]) -> list[ObjectivePoint]:
    """Points not dominated by any other, in input order."""
    return [points[i] for i in front_indices(points)]


def performance_score(points: list[ObjectivePoint]) -> list[float]:
    """Min-max normalized mean of the objectives, 1 = best on every axis.

    An objective constant across the set normalizes to 1 for all points.
    """
    if not points:
        raise ValueError("need at least one point")

    def normalize(values: list[float], invert: bool) -> list[float]:
        lo, hi = min(values), max(values)
        if hi == lo:
            return [1.0] * len(values)
        return [(hi - v) / (hi - lo) if invert else (v - lo) / (hi - lo) for v in values]

    r = normalize([p.reliability for p in points], invert=False)
    e = normalize([p.energy_j for p in points], invert=True)
    l = normalize([p.latency_gens for p in points], invert=True)
    return [(r[i] + e[i] + l[i]) / 3.0 for i in range(len(points))]


def points_from_results(
    results: list[SimResult], aggregate: bool = False
) -> tuple[list[ObjectivePoint], int]:
    """Candidate points from violation-free converged rows.

    Returns (points, n_excluded). aggregate=True first averages the
    repetitions of each (scenario, decision_vars) configuration.
    """
    valid = [
        r for r in results if r.violation is None and r.objectives and r.objectives.converged
    ]
    excluded = len(results) - len(valid)
    if not aggregate:
        points = [
            ObjectivePoint(
                reliability=r.objectives.reliability,
                energy_j=r.objectives.energy_j_per_node_per_gen,
                latency_gens=float(r.objectives.latency_generations),
                row_id=r.row_id,
            )
            for r in valid
        ]
        return points, excluded
    groups: dict[tuple, list[SimResult]] = defaultdict(list)
    for r in valid:
        groups[(r.scenario.name, r.decision_vars)].append(r)
    points = []
    for (scenario_name, dv), rows in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1].sharing_frequency,
                                        kv[0][1].resend_threshold, kv[0][1].strategy)
    ):
        n = len(rows)
        points.append(
            ObjectivePoint(
                reliability=sum(r.objectives.reliability for r in rows) / n,
                energy_j=sum(r.objectives.energy_j_per_node_per_gen for r in rows) / n,
                latency_gens=sum(r.objectives.latency_generations for r in rows) / n,
                row_id=f"{scenario_name}-f{dv.sharing_frequency}-t{dv.resend_threshold}"
                f"-{dv.strategy}-agg{n}",
            )
        )
    return points, excluded


def write_pareto_csvs(points: list[ObjectivePoint], out_dir) -> tuple[int, int]:
    """Write pareto_points.csv (all candidates, scored and flagged) and
    pareto_front.csv (front rows only). Returns (n_points, n_front)."""
    from pathlib import Path

    out_dir = Path(out_dir)
    scores = performance_score(points) if points else []
    front = set(front_indices(points))

    def rows(only_front: bool):
        for i, (p, s) in enumerate(zip(points, scores)):
            if only_front and i not in front:
                continue
            yield [
                p.row_id,
                repr(p.reliability),
                repr(p.energy_j),
                repr(p.latency_gens),
                repr(s),
                "true" if i in front else "false",
            ]

    for name, only_front in (("pareto_points.csv", False), ("pareto_front.csv", True)):
        with open(out_dir / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(PARETO_COLUMNS)
            for row in rows(only_front):
                writer.writerow(row)
    return len(points), len(front)
