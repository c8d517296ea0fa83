#!/usr/bin/env python3
"""Write the golden speeding/headway summary tables to a data directory.

Useful for serving the UI against data with exactly known cohort
percentages: ``drivemetrics serve <out_dir>``.
"""

import argparse

from drivemetrics.golden import write_golden_tables


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory to write <metric>.summary files")
    args = parser.parse_args()
    for path in write_golden_tables(args.out_dir):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
