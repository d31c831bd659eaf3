"""meshsense-plot: render figures from a completed run directory.

Usage: meshsense-plot <topology|series|scatter3d|front-mesh> --run DIR --out PATH
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import TooFewFrontPointsError, plot_front, plot_series, plot_topology
from .io import MissingRunFileError

KINDS = ("topology", "series", "scatter3d", "front-mesh")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshsense-plot")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--run", type=Path, required=True, help="run directory")
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    run_dir: Path = args.run
    try:
        if args.kind == "topology":
            paths, meta = plot_topology(run_dir, args.out)
        elif args.kind == "series":
            paths, meta = plot_series(run_dir, args.out)
        else:
            paths, meta = plot_front(
                run_dir / "pareto_points.csv",
                run_dir / "pareto_front.csv",
                args.out,
                with_mesh=args.kind == "front-mesh",
            )
    except (MissingRunFileError, TooFewFrontPointsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
