"""Command-line entry point: trial runs, sweeps, and Pareto analysis.

Exit codes: 0 success, 2 constraint violation, 3 infeasible topology,
4 config error, 1 anything else.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config, save_config
from .experiment import (
    cell_seed,
    load_results,
    run_sweep,
    result_to_row,
    setup_seeds,
    write_results,
    RESULT_COLUMNS,
    ResultsFormatError,
    SimResult,
)
from .metrics import ConvergenceConfig, run_simulation, series_to_csv
from .pareto import (
    dominates,
    front_indices,
    pareto_front,
    performance_score,
    points_from_results,
    write_pareto_csvs,
)
from .region import generate_field
from .topology import TopologyInfeasibleError, build_valid_topology, topology_to_json

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_VIOLATION = 2
EXIT_INFEASIBLE = 3
EXIT_CONFIG = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshsense")
    sub = parser.add_subparsers(dest="command", required=True)

    trial = sub.add_parser("trial", help="run one traced simulation")
    trial.add_argument("--config", type=Path, default=None)
    trial.add_argument("--seed", type=int, default=None, help="override base_seed")
    trial.add_argument("--out", type=Path, required=True, help="run directory")

    sweep = sub.add_parser("sweep", help="run the full scenario x grid x repetition sweep")
    sweep.add_argument("--config", type=Path, default=None)
    sweep.add_argument("--seed", type=int, default=None, help="override base_seed")
    sweep.add_argument("--out", type=Path, required=True, help="run directory")
    sweep.add_argument("--parallelism", type=int, default=1)
    sweep.add_argument("--trace", action="store_true", help="write per-run time series")
    sweep.add_argument("--force", action="store_true", help="overwrite an existing run directory")
    sweep.add_argument("--scenario", default=None, help="run only the named scenario")

    pareto = sub.add_parser("pareto", help="extract the Pareto front from a results CSV")
    pareto.add_argument("results", type=Path)
    pareto.add_argument("--out", type=Path, required=True, help="output directory")
    pareto.add_argument(
        "--aggregate", action="store_true", help="average repetitions per configuration first"
    )
    pareto.add_argument(
        "--verify", action="store_true", help="cross-check the front against a brute-force filter"
    )
    return parser


def _format_objectives(result: SimResult) -> str:
    obj = result.objectives
    return (
        f"reliability={obj.reliability:.6f} "
        f"energy_j_per_node_per_gen={obj.energy_j_per_node_per_gen:.9f} "
        f"latency_generations={obj.latency_generations} "
        f"converged={'true' if obj.converged else 'false'}"
    )


def cmd_trial(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    scenario = cfg.trial.scenario
    dv = cfg.trial.decision_vars
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "traces").mkdir(exist_ok=True)
    save_config(cfg, out_dir / "config.json")

    field_seed, topology_seed = setup_seeds(cfg.base_seed, scenario, 0)
    seed = cell_seed(cfg.base_seed, scenario, dv, 0)
    from .experiment import _region_config

    started = time.perf_counter()
    try:
        placement, graph = build_valid_topology(
            scenario.n_nodes, scenario.side_m, scenario.placement, cfg.node.tx_range_m,
            topology_seed,
        )
    except TopologyInfeasibleError as exc:
        print(f"infeasible topology: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    field = generate_field(_region_config(cfg, scenario, field_seed))
    profile_names = [cfg.profiles[i % len(cfg.profiles)].name for i in range(placement.n_nodes)]
    topology_to_json(
        placement, graph, profile_names, cfg.node.tx_range_m, scenario.side_m,
        out_dir / "topology.json",
    )
    output = run_simulation(
        field,
        placement,
        graph,
        dv,
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
        decision_vars=dv,
        repetition=0,
        seed=seed,
        objectives=output.objectives,
        violation=output.violation.value if output.violation else None,
        wall_time_s=time.perf_counter() - started,
    )
    series_to_csv(output.series, out_dir / "traces" / f"{result.row_id}.csv")
    write_results([result], out_dir / "results.csv")
    if output.violation is not None:
        print(
            f"constraint violation: {output.violation.value} "
            f"(after {output.generations_executed} generations)",
            file=sys.stderr,
        )
        return EXIT_VIOLATION
    print(_format_objectives(result))
    if not output.objectives.converged:
        print(f"did not converge within max_rounds={cfg.thresholds.max_rounds}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    out_dir = Path(args.out)
    if (out_dir / "results.csv").exists() and not args.force:
        print(f"{out_dir} already holds results.csv; use --force to overwrite", file=sys.stderr)
        return EXIT_OTHER
    out_dir.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out_dir / "config.json")
    started = time.perf_counter()
    results = run_sweep(
        cfg,
        out_dir=out_dir,
        parallelism=args.parallelism,
        trace=args.trace,
        scenario_filter=args.scenario,
    )
    elapsed = time.perf_counter() - started
    violations = sum(1 for r in results if r.violation is not None)
    unconverged = sum(
        1 for r in results if r.violation is None and r.objectives and not r.objectives.converged
    )
    print(
        f"{len(results)} rows ({violations} violations, {unconverged} non-converged) "
        f"in {elapsed:.1f} s -> {out_dir / 'results.csv'}"
    )
    return EXIT_OK


def _brute_force_front_ok(points) -> bool:
    brute = [
        i
        for i in range(len(points))
        if not any(j != i and dominates(points[j], points[i]) for j in range(len(points)))
    ]
    return brute == front_indices(points)


def cmd_pareto(args) -> int:
    results = load_results(args.results)
    points, excluded = points_from_results(results, aggregate=args.aggregate)
    if not points:
        print(
            f"no Pareto candidates in {args.results} "
            f"({excluded} rows excluded as violated or non-converged)",
            file=sys.stderr,
        )
        return EXIT_OTHER
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_points, n_front = write_pareto_csvs(points, out_dir)
    if args.verify:
        if not _brute_force_front_ok(points):
            print("front verification FAILED against brute-force filter", file=sys.stderr)
            return EXIT_OTHER
        print("front verified against brute-force filter")
    scores = performance_score(points)
    front_set = set(front_indices(points))
    print(
        f"{n_front} Pareto-efficient of {n_points} candidate points "
        f"({excluded} rows excluded); wrote {out_dir / 'pareto_points.csv'} "
        f"and {out_dir / 'pareto_front.csv'}"
    )
    print(f"{'row_id':<50} {'reliability':>11} {'energy_j':>12} {'latency':>8} {'score':>6}")
    for i in sorted(front_set):
        p = points[i]
        print(
            f"{p.row_id:<50} {p.reliability:>10.2%} {p.energy_j:>12.6g} "
            f"{p.latency_gens:>8.3g} {scores[i]:>6.3f}"
        )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "trial":
            return cmd_trial(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_pareto(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResultsFormatError as exc:
        print(f"results format error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
