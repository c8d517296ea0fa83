#!/usr/bin/env python3
"""Run the whole pipeline end to end on a synthetic fleet.

synth -> summarize -> aggregate, then print per-metric totals. Leaves the
generated data and tables under the chosen work directory, ready for
``drivemetrics serve <work>/tables``.
"""

import argparse
import sys
from pathlib import Path

from drivemetrics.cli import main as cli_main

REPO_ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("work_dir", help="working directory for all outputs")
    parser.add_argument(
        "--config", default=str(REPO_ROOT / "configs" / "demo_fleet.yaml")
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--parallelism", type=int, default=4)
    args = parser.parse_args()

    work = Path(args.work_dir)
    fleet = work / "fleet"
    store = work / "trip_store.csv"
    tables = work / "tables"

    synth = ["synth", args.config, str(fleet)]
    if args.seed is not None:
        synth += ["--seed", str(args.seed)]
    for step in (
        synth,
        [
            "summarize", str(fleet / "trips"), str(store),
            "--parallelism", str(args.parallelism),
        ],
        [
            "aggregate", str(store), str(tables),
            "--drivers", str(fleet / "drivers.csv"),
            "--vehicles", str(fleet / "vehicles.csv"),
            "--trip-index", str(fleet / "trip_index.csv"),
        ],
    ):
        code = cli_main(step)
        if code != 0:
            print(f"step {step[0]} failed with exit code {code}", file=sys.stderr)
            return code
    print(f"\ndone; serve with: drivemetrics serve {tables}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
