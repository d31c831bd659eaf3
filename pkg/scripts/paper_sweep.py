#!/usr/bin/env python3
"""Run the full four-scenario experiment: 4 scenarios x 110 decision-variable
combinations x 3 repetitions = 1320 simulations.

The two 500 m scenarios are large (121 and 250 nodes over 250k cells), so a
full sweep takes hours on one core. Use --parallelism, or --scenario to run
one scenario at a time. Results stream to <out>/results.csv as cells finish,
so a partial sweep is still usable.

    python scripts/paper_sweep.py --out runs/full --parallelism 8
    python scripts/paper_sweep.py --out runs/81n --scenario uniform-300m-81n
"""

import argparse
import sys

from meshsense.cli import main as meshsense_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--config", default=None, help="overrides merged onto defaults")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--parallelism", type=int, default=1)
    parser.add_argument("--scenario", default=None)
    parser.add_argument("--trace", action="store_true")
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args()

    argv = ["sweep", "--out", args.out, "--seed", str(args.seed),
            "--parallelism", str(args.parallelism)]
    if args.config:
        argv += ["--config", args.config]
    if args.scenario:
        argv += ["--scenario", args.scenario]
    if args.trace:
        argv.append("--trace")
    if args.force:
        argv.append("--force")
    code = meshsense_main(argv)
    if code == 0:
        code = meshsense_main(["pareto", f"{args.out}/results.csv", "--out", args.out, "--verify"])
    return code


if __name__ == "__main__":
    sys.exit(main())
