"""Objectives, convergence detection, constraints, and the simulation loop.

Reliability is the per-generation mean of each sender's successful/total
unique-message ratio, averaged over generations. Energy consumption is the
per-generation mean energy per node, averaged over generations. Latency is
the first generation whose accuracy triple passes the convergence
predicate.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .config import DecisionVars, NodeParams
from .nodemodel import McuProfile, NodeState, sense
from .protocol import (
    GenerationStats,
    RadioConfig,
    SendRecord,
    ActivityConstraintError,
    SimStreams,
    run_generation,
)
from .region import TemperatureField
from .topology import MeshGraph, Placement, is_connected


@dataclass(frozen=True)
class ConvergenceConfig:
    psi: float = 0.95
    theta: float = 0.80
    max_rounds: int = 50

    def __post_init__(self) -> None:
        if not (0.0 < self.theta <= self.psi < 1.0):
            raise ValueError("need 0 < theta <= psi < 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass(frozen=True)
class ObjectiveTriple:
    reliability: float
    energy_j_per_node_per_gen: float
    latency_generations: int
    converged: bool


class ConstraintViolation(str, enum.Enum):
    ACTIVITY = "activity"
    ENERGY = "energy"
    CONNECTIVITY = "connectivity"


def reliability(history: list[GenerationStats]) -> float:
    """Mean over generations of the mean per-sender success ratio."""
    if not history:
        raise ValueError("history is empty")
    per_gen = []
    for stats in history:
        ratios = list(stats.per_node_reliability.values())
        if not ratios:
            raise ValueError(f"generation {stats.round_index} recorded no sends")
        per_gen.append(sum(ratios) / len(ratios))
    return sum(per_gen) / len(per_gen)


def energy_consumption(history: list[GenerationStats]) -> float:
    """Mean over generations of the mean per-node energy (all nodes)."""
    if not history:
        raise ValueError("history is empty")
    per_gen = [float(np.mean(stats.per_node_energy_j)) for stats in history]
    return sum(per_gen) / len(per_gen)


def check_convergence(min_g: float, avg_g: float, max_g: float, cfg: ConvergenceConfig) -> bool:
    """Accuracy predicate: (avg above psi, or within one percentage point of
    max, which covers regions with undetectable subregions) and min above
    theta."""
    return (avg_g > cfg.psi or avg_g + 0.01 >= max_g) and min_g > cfg.theta


def enforce_constraints(
    nodes: list[NodeState], graph: MeshGraph, phi: float
) -> ConstraintViolation | None:
    if any(node.energy_j <= 0.0 for node in nodes):
        return ConstraintViolation.ACTIVITY
    mean_fraction = float(np.mean([node.energy_j / node.max_energy_j for node in nodes]))
    if mean_fraction < phi:
        return ConstraintViolation.ENERGY
    if not is_connected(graph):
        return ConstraintViolation.CONNECTIVITY
    return None


@dataclass
class SeriesRow:
    generation: int
    reliability_min: float
    reliability_avg: float
    reliability_max: float
    energy_j: float
    accuracy_min: float
    accuracy_avg: float
    accuracy_max: float


SERIES_COLUMNS = [
    "generation",
    "reliability_min",
    "reliability_avg",
    "reliability_max",
    "energy_j",
    "accuracy_min",
    "accuracy_avg",
    "accuracy_max",
]


def series_to_csv(series: list[SeriesRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_COLUMNS)
        for row in series:
            writer.writerow(
                [
                    row.generation,
                    repr(row.reliability_min),
                    repr(row.reliability_avg),
                    repr(row.reliability_max),
                    repr(row.energy_j),
                    repr(row.accuracy_min),
                    repr(row.accuracy_avg),
                    repr(row.accuracy_max),
                ]
            )


@dataclass
class SimOutput:
    objectives: ObjectiveTriple | None
    violation: ConstraintViolation | None
    series: list[SeriesRow]
    history: list[GenerationStats]
    send_ledger: list[SendRecord]
    final_energy_j: list[float]
    generations_executed: int


def build_nodes(
    field: TemperatureField,
    placement: Placement,
    graph: MeshGraph,
    params: NodeParams,
    profiles: tuple[McuProfile, ...],
    decision_vars: DecisionVars,
) -> list[NodeState]:
    """Create sensed node states; profiles are assigned round-robin by id."""
    nodes = []
    for i, pos in enumerate(placement.positions):
        nodes.append(
            NodeState(
                node_id=i,
                position=pos,
                profile=profiles[i % len(profiles)],
                model=sense(pos, params.detect_range_m, field),
                neighbor_order=list(graph.adjacency[i]),
                max_energy_j=params.max_energy_j,
                energy_j=params.max_energy_j,
                tx_range_m=params.tx_range_m,
                detect_range_m=params.detect_range_m,
                message_send_success_rate=params.message_send_success_rate,
                ack_send_success_rate=params.ack_send_success_rate,
                resend_threshold=decision_vars.resend_threshold,
            )
        )
    return nodes


def run_simulation(
    field: TemperatureField,
    placement: Placement,
    graph: MeshGraph,
    decision_vars: DecisionVars,
    radio: RadioConfig,
    convergence: ConvergenceConfig,
    params: NodeParams,
    profiles: tuple[McuProfile, ...],
    phi: float,
    seed: int,
    collect_ledger: bool = True,
) -> SimOutput:
    """Sense, then gossip until the convergence predicate fires, a
    constraint is violated, or max_rounds pass.

    Objectives cover exactly the executed generations. A violated run
    reports the violation kind instead of objectives.
    """
    nodes = build_nodes(field, placement, graph, params, profiles, decision_vars)
    streams = SimStreams(seed)
    history: list[GenerationStats] = []
    series: list[SeriesRow] = []
    ledger: list[SendRecord] = []
    violation: ConstraintViolation | None = None
    converged = False
    generation = 0
    while generation < convergence.max_rounds:
        generation += 1
        try:
            stats, records = run_generation(
                nodes,
                graph,
                decision_vars.strategy,
                decision_vars.sharing_frequency,
                radio,
                field,
                params.accuracy_epsilon_c,
                streams,
                generation,
            )
        except ActivityConstraintError:
            violation = ConstraintViolation.ACTIVITY
            break
        history.append(stats)
        if collect_ledger:
            ledger.extend(records)
        ratios = list(stats.per_node_reliability.values())
        series.append(
            SeriesRow(
                generation=generation,
                reliability_min=min(ratios),
                reliability_avg=sum(ratios) / len(ratios),
                reliability_max=max(ratios),
                energy_j=float(np.mean(stats.per_node_energy_j)),
                accuracy_min=stats.min_accuracy,
                accuracy_avg=stats.avg_accuracy,
                accuracy_max=stats.max_accuracy,
            )
        )
        violation = enforce_constraints(nodes, graph, phi)
        if violation is not None:
            break
        if check_convergence(stats.min_accuracy, stats.avg_accuracy, stats.max_accuracy, convergence):
            converged = True
            break
    objectives = None
    if violation is None:
        objectives = ObjectiveTriple(
            reliability=reliability(history),
            energy_j_per_node_per_gen=energy_consumption(history),
            latency_generations=generation if converged else convergence.max_rounds,
            converged=converged,
        )
    return SimOutput(
        objectives=objectives,
        violation=violation,
        series=series,
        history=history,
        send_ledger=ledger,
        final_energy_j=[node.energy_j for node in nodes],
        generations_executed=generation,
    )
