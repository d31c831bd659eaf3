"""Sweep driver: scenarios x decision grid x repetitions, persisted as CSV.

Each sweep cell is an independent job with seeds derived by hashing
(base_seed, scenario, vars, repetition), so any cell can be re-run in
isolation and parallel execution changes nothing but row order. The field
and topology are derived per (scenario, repetition) and shared across the
grid, so decision-variable effects are not confounded by placement luck.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from .config import DecisionVars, ExperimentConfig, GridSpec, Scenario
from .metrics import ConvergenceConfig, ObjectiveTriple, run_simulation, series_to_csv
from .region import RegionConfig, generate_field
from .topology import TopologyInfeasibleError, build_valid_topology, topology_to_json

TOPOLOGY_INFEASIBLE = "topology_infeasible"

RESULT_COLUMNS = [
    "scenario",
    "side_m",
    "n_nodes",
    "placement",
    "sharing_frequency",
    "resend_threshold",
    "strategy",
    "repetition",
    "seed",
    "reliability",
    "energy_j",
    "latency_gens",
    "converged",
    "violation",
    "wall_time_s",
]


class ResultsFormatError(ValueError):
    """Results CSV does not match the expected schema."""


@dataclass(frozen=True)
class SimResult:
    scenario: Scenario
    decision_vars: DecisionVars
    repetition: int
    seed: int
    objectives: ObjectiveTriple | None
    violation: str | None
    wall_time_s: float

    @property
    def row_id(self) -> str:
        v = self.decision_vars
        return (
            f"{self.scenario.name}-f{v.sharing_frequency}-t{v.resend_threshold}"
            f"-{v.strategy}-r{self.repetition}"
        )


def default_grid() -> list[DecisionVars]:
    """The full decision grid: 5 frequencies x 11 thresholds x 2 strategies."""
    return GridSpec().cells()


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed from the base seed and a cell key."""
    key = "|".join([str(base_seed), *map(str, parts)])
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def setup_seeds(base_seed: int, scenario: Scenario, repetition: int) -> tuple[int, int]:
    field_seed = derive_seed(base_seed, scenario.name, repetition, "field")
    topology_seed = derive_seed(base_seed, scenario.name, repetition, "topology")
    return field_seed, topology_seed


def cell_seed(base_seed: int, scenario: Scenario, dv: DecisionVars, repetition: int) -> int:
    return derive_seed(
        base_seed,
        scenario.name,
        dv.sharing_frequency,
        dv.resend_threshold,
        dv.strategy,
        repetition,
    )


@dataclass(frozen=True)
class CellSpec:
    config: ExperimentConfig
    scenario: Scenario
    decision_vars: DecisionVars
    repetition: int
    trace_dir: str | None = None


def sweep_cells(
    cfg: ExperimentConfig,
    scenario_filter: str | None = None,
    trace_dir: str | None = None,
) -> list[CellSpec]:
    scenarios = [
        s for s in cfg.scenarios if scenario_filter is None or s.name == scenario_filter
    ]
    if scenario_filter is not None and not scenarios:
        raise ValueError(f"no scenario named {scenario_filter!r} in config")
    grid = cfg.grid.cells()
    return [
        CellSpec(cfg, s, dv, rep, trace_dir)
        for s in scenarios
        for dv in grid
        for rep in range(cfg.repetitions)
    ]


def _region_config(cfg: ExperimentConfig, scenario: Scenario, seed: int) -> RegionConfig:
    return RegionConfig(
        side_m=scenario.side_m,
        cell_size_m=cfg.region.cell_size_m,
        temp_min_c=cfg.region.temp_min_c,
        temp_max_c=cfg.region.temp_max_c,
        max_adjacent_delta_c=cfg.region.max_adjacent_delta_c,
        seed=seed,
    )


# Grid cells sharing a (scenario, repetition) reuse the same field and
# topology; cache them so a long-lived worker builds each setup once.
# Neither object is mutated by a simulation.
_cached_field = functools.lru_cache(maxsize=8)(generate_field)
_cached_topology = functools.lru_cache(maxsize=8)(build_valid_topology)


def run_cell(spec: CellSpec) -> SimResult:
    """Run one sweep cell from scratch (topology, field, simulation)."""
    cfg = spec.config
    scenario = spec.scenario
    started = time.perf_counter()
    seed = cell_seed(cfg.base_seed, scenario, spec.decision_vars, spec.repetition)
    field_seed, topology_seed = setup_seeds(cfg.base_seed, scenario, spec.repetition)
    try:
        placement, graph = _cached_topology(
            scenario.n_nodes,
            scenario.side_m,
            scenario.placement,
            cfg.node.tx_range_m,
            topology_seed,
        )
    except TopologyInfeasibleError:
        return SimResult(
            scenario=scenario,
            decision_vars=spec.decision_vars,
            repetition=spec.repetition,
            seed=seed,
            objectives=None,
            violation=TOPOLOGY_INFEASIBLE,
            wall_time_s=time.perf_counter() - started,
        )
    field = _cached_field(_region_config(cfg, scenario, field_seed))
    output = run_simulation(
        field,
        placement,
        graph,
        spec.decision_vars,
        cfg.radio,
        ConvergenceConfig(cfg.thresholds.psi, cfg.thresholds.theta, cfg.thresholds.max_rounds),
        cfg.node,
        cfg.profiles,
        cfg.thresholds.phi,
        seed,
        collect_ledger=False,
    )
    result = SimResult(
        scenario=scenario,
        decision_vars=spec.decision_vars,
        repetition=spec.repetition,
        seed=seed,
        objectives=output.objectives,
        violation=output.violation.value if output.violation else None,
        wall_time_s=time.perf_counter() - started,
    )
    if spec.trace_dir is not None:
        series_to_csv(output.series, Path(spec.trace_dir) / f"{result.row_id}.csv")
    return result


def result_to_row(result: SimResult) -> list[str]:
    obj = result.objectives
    return [
        result.scenario.name,
        repr(result.scenario.side_m),
        str(result.scenario.n_nodes),
        result.scenario.placement,
        str(result.decision_vars.sharing_frequency),
        str(result.decision_vars.resend_threshold),
        result.decision_vars.strategy,
        str(result.repetition),
        str(result.seed),
        repr(obj.reliability) if obj else "",
        repr(obj.energy_j_per_node_per_gen) if obj else "",
        str(obj.latency_generations) if obj else "",
        ("true" if obj.converged else "false") if obj else "false",
        result.violation or "",
        repr(result.wall_time_s),
    ]


def result_from_row(row: list[str], line_no: int) -> SimResult:
    if len(row) != len(RESULT_COLUMNS):
        raise ResultsFormatError(
            f"line {line_no}: expected {len(RESULT_COLUMNS)} fields, got {len(row)}"
        )
    try:
        scenario = Scenario(
            name=row[0], side_m=float(row[1]), n_nodes=int(row[2]), placement=row[3]
        )
        dv = DecisionVars(
            sharing_frequency=int(row[4]), resend_threshold=int(row[5]), strategy=row[6]
        )
        violation = row[13] or None
        objectives = None
        if row[9]:
            objectives = ObjectiveTriple(
                reliability=float(row[9]),
                energy_j_per_node_per_gen=float(row[10]),
                latency_generations=int(row[11]),
                converged=row[12] == "true",
            )
        return SimResult(
            scenario=scenario,
            decision_vars=dv,
            repetition=int(row[7]),
            seed=int(row[8]),
            objectives=objectives,
            violation=violation,
            wall_time_s=float(row[14]),
        )
    except ValueError as exc:
        if isinstance(exc, ResultsFormatError):
            raise
        raise ResultsFormatError(f"line {line_no}: {exc}") from exc


def write_results(results: list[SimResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for result in results:
            writer.writerow(result_to_row(result))


def load_results(path) -> list[SimResult]:
    """Parse a results CSV; empty files are an empty (valid) result set."""
    with open(path, newline="", encoding="utf-8") as fh:
        raw = fh.read()
    if raw == "":
        return []
    if raw and not raw.endswith("\n"):
        n_lines = raw.count("\n") + 1
        raise ResultsFormatError(f"line {n_lines}: truncated final line")
    rows = list(csv.reader(raw.splitlines()))
    if rows[0] != RESULT_COLUMNS:
        raise ResultsFormatError(f"line 1: unexpected header {rows[0]!r}")
    return [result_from_row(row, i + 2) for i, row in enumerate(rows[1:])]


def run_sweep(
    cfg: ExperimentConfig,
    out_dir=None,
    parallelism: int = 1,
    trace: bool = False,
    scenario_filter: str | None = None,
    on_result=None,
) -> list[SimResult]:
    """Run every cell, streaming rows to out_dir/results.csv as they finish.

    Per-cell failures become violation rows; only setup errors (bad config,
    unwritable directory) abort the sweep.
    """
    out_path = None
    trace_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        out_path = out_dir / "results.csv"
        if trace:
            trace_dir = out_dir / "traces"
            trace_dir.mkdir(exist_ok=True)
    cells = sweep_cells(cfg, scenario_filter, str(trace_dir) if trace_dir else None)
    seeds = [cell_seed(cfg.base_seed, c.scenario, c.decision_vars, c.repetition) for c in cells]
    if len(set(seeds)) != len(seeds):
        raise RuntimeError("derived seed collision within sweep; change base_seed")

    if out_dir is not None:
        _export_topologies(cfg, cells, out_dir)

    results: list[SimResult] = []
    writer = None
    fh = None
    if out_path is not None:
        fh = open(out_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        fh.flush()

    def record(result: SimResult) -> None:
        results.append(result)
        if writer is not None:
            writer.writerow(result_to_row(result))
            fh.flush()
        if on_result is not None:
            on_result(result)

    try:
        if parallelism <= 1:
            for cell in cells:
                record(run_cell(cell))
        else:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                futures = [pool.submit(run_cell, cell) for cell in cells]
                for future in as_completed(futures):
                    record(future.result())
    finally:
        if fh is not None:
            fh.close()
    return results


def _export_topologies(cfg: ExperimentConfig, cells: list[CellSpec], out_dir: Path) -> None:
    """One topology JSON per (scenario, repetition) that builds successfully."""
    seen = set()
    for cell in cells:
        key = (cell.scenario.name, cell.repetition)
        if key in seen:
            continue
        seen.add(key)
        _, topology_seed = setup_seeds(cfg.base_seed, cell.scenario, cell.repetition)
        try:
            placement, graph = build_valid_topology(
                cell.scenario.n_nodes,
                cell.scenario.side_m,
                cell.scenario.placement,
                cfg.node.tx_range_m,
                topology_seed,
            )
        except TopologyInfeasibleError:
            continue
        names = [cfg.profiles[i % len(cfg.profiles)].name for i in range(placement.n_nodes)]
        topology_to_json(
            placement,
            graph,
            names,
            cfg.node.tx_range_m,
            cell.scenario.side_m,
            out_dir / f"topology_{cell.scenario.name}_rep{cell.repetition}.json",
        )
