#!/usr/bin/env python3
"""End-to-end desk-scale demo: a small sweep, the Pareto front, and (when
the meshsense-plots package is installed) all four figure kinds.

    python scripts/desk_demo.py --out runs/demo
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

from meshsense.cli import main as meshsense_main

DESK_CONFIG = {
    "scenarios": [{"name": "desk", "side_m": 100.0, "n_nodes": 16, "placement": "uniform"}],
    "grid": {
        "sharing_frequency": [1, 2, 3, 4, 5],
        "resend_threshold": [0, 10, 25, 50],
        "strategy": ["random", "least-interacted"],
    },
    "node": {"message_send_success_rate": 0.9},
    "repetitions": 3,
    "base_seed": 3,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--parallelism", type=int, default=1)
    args = parser.parse_args()
    out = Path(args.out)

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(DESK_CONFIG, fh)
        config_path = fh.name
    code = meshsense_main(
        ["sweep", "--config", config_path, "--out", str(out), "--trace",
         "--parallelism", str(args.parallelism), "--force"]
    )
    if code != 0:
        return code
    code = meshsense_main(["pareto", str(out / "results.csv"), "--out", str(out), "--verify"])
    if code != 0:
        return code

    try:
        from meshplots.figures import plot_front, plot_series, plot_topology
    except ImportError:
        print("meshsense-plots not installed; skipping figures (pip install -e plots/)")
        return 0
    figures = out / "figures"
    figures.mkdir(exist_ok=True)
    for paths, _ in (
        plot_topology(out, figures / "topology.png"),
        plot_series(out, figures / "series.png"),
        plot_front(out / "pareto_points.csv", out / "pareto_front.csv", figures / "front.png"),
        plot_front(
            out / "pareto_points.csv",
            out / "pareto_front.csv",
            figures / "front_mesh.png",
            with_mesh=True,
        ),
    ):
        for path in paths:
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
