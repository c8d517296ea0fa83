"""Operator command line: synth, summarize, aggregate, query, serve.

Exit codes: 0 success, 1 usage error, 2 data error. A bad trip file never
aborts a summarize run; it is logged and skipped.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import signal
import sys
from dataclasses import dataclass
from pathlib import Path

from drivemetrics.domain import MetricKind, TripMeta
from drivemetrics.metrics import (
    aggregate_metric,
    read_driver_roster,
    read_trip_index,
    read_vehicle_roster,
    summary_filename,
    write_metric_table,
)
from drivemetrics.synth import FleetConfig, generate_fleet
from drivemetrics.trips import TripSummaryStore, read_raw_trip, summarize_trip

USAGE_ERROR = 1
DATA_ERROR = 2


@dataclass
class PipelineManifest:
    """Resolved paths and settings for one pipeline run."""

    raw_dir: Path
    store_path: Path
    driver_roster: Path
    vehicle_roster: Path
    trip_index: Path
    out_dir: Path
    parallelism: int = 1
    metrics: tuple[MetricKind, ...] = tuple(MetricKind)

    def __post_init__(self):
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _trip_file_id(path: Path) -> str:
    name = path.name
    for suffix in (".csv.gz", ".csv"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return path.stem


def _process_trip(path_str: str):
    """Worker: summarize one raw trip file. Runs in the pool."""
    path = Path(path_str)
    file_id = _trip_file_id(path)
    records = read_raw_trip(path)
    rows = summarize_trip(records, TripMeta(file_id, "", ""))
    return rows


def cmd_synth(args) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        print(f"config file not found: {config_path}", file=sys.stderr)
        return USAGE_ERROR
    try:
        config = FleetConfig.from_file(config_path, seed_override=args.seed)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"invalid config {config_path}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    fleet = generate_fleet(config, args.out_dir)
    print(
        f"generated {len(fleet.drivers)} drivers, {len(fleet.trips)} trips "
        f"under {fleet.out_dir}"
    )
    return 0


def cmd_summarize(args) -> int:
    raw_dir = Path(args.raw_dir)
    paths = sorted(
        p for p in raw_dir.iterdir() if p.name.endswith((".csv", ".csv.gz"))
    )
    if not paths:
        print(f"no trip files in {raw_dir}", file=sys.stderr)
        return DATA_ERROR
    all_rows = []
    ok = failed = 0
    if args.parallelism <= 1:
        results = []
        for p in paths:
            try:
                results.append(_process_trip(str(p)))
            except Exception as exc:
                print(f"warning: skipping {p.name}: {exc}", file=sys.stderr)
                failed += 1
                results.append(None)
        for rows in results:
            if rows is not None:
                ok += 1
                all_rows.extend(rows)
    else:
        with concurrent.futures.ProcessPoolExecutor(args.parallelism) as pool:
            futures = {pool.submit(_process_trip, str(p)): p for p in paths}
            for future in concurrent.futures.as_completed(futures):
                p = futures[future]
                try:
                    all_rows.extend(future.result())
                    ok += 1
                except Exception as exc:
                    print(f"warning: skipping {p.name}: {exc}", file=sys.stderr)
                    failed += 1
    if ok == 0:
        print("no trips processed successfully", file=sys.stderr)
        return DATA_ERROR
    store = TripSummaryStore(args.store)
    n = store.write_all(all_rows)
    print(f"summarized {ok} trips ({failed} skipped), {n} store rows -> {args.store}")
    return 0


def cmd_aggregate(args) -> int:
    for label, path in (
        ("trip-summary store", args.store),
        ("driver roster", args.drivers),
        ("vehicle roster", args.vehicles),
        ("trip index", args.trip_index),
    ):
        if not Path(path).exists():
            print(f"missing {label}: {path}", file=sys.stderr)
            return DATA_ERROR
    metrics = (
        [MetricKind(m) for m in args.metrics] if args.metrics else list(MetricKind)
    )
    trip_rows = TripSummaryStore(args.store).read_rows()
    drivers = read_driver_roster(args.drivers)
    vehicles = read_vehicle_roster(args.vehicles)
    trip_index = read_trip_index(args.trip_index)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for metric in metrics:
        table = aggregate_metric(trip_rows, metric, trip_index, drivers, vehicles)
        path = out_dir / summary_filename(metric)
        write_metric_table(table, path)
        note = ""
        if table.unresolved_drivers or table.unresolved_vehicles:
            note = (
                f" ({table.unresolved_drivers} unresolved drivers, "
                f"{table.unresolved_vehicles} unresolved vehicles)"
            )
        print(
            f"{metric.value}: {len(table.rows)} rows, "
            f"{table.total_miles():.3f} miles -> {path}{note}"
        )
    return 0


def cmd_query(args) -> int:
    from drivemetrics.service import QueryRequest, load_snapshot, run_query
    from fastapi import HTTPException

    snapshot = load_snapshot(args.data_dir)
    if not snapshot:
        print(f"no metric tables in {args.data_dir}", file=sys.stderr)
        return DATA_ERROR
    try:
        with open(args.request) as fh:
            req = QueryRequest(**json.load(fh))
        response = run_query(snapshot, req)
    except HTTPException as exc:
        print(f"query failed: {exc.detail}", file=sys.stderr)
        return DATA_ERROR
    except (OSError, ValueError) as exc:
        print(f"bad request file {args.request}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    json.dump(response, sys.stdout, indent=2)
    print()
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from drivemetrics.service import create_app, load_snapshot

    app = create_app(args.data_dir, static_dir=args.static_dir)

    def reload_snapshot(signum, frame):
        app.state.snapshot = load_snapshot(args.data_dir)

    if hasattr(signal, "SIGHUP"):
        signal.signal(signal.SIGHUP, reload_snapshot)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"serve failed: {exc}", file=sys.stderr)
        return DATA_ERROR
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drivemetrics", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic fleet")
    p.add_argument("config", help="fleet config file (YAML)")
    p.add_argument("out_dir", help="output directory for rosters and trips")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("summarize", help="build the trip-summary store")
    p.add_argument("raw_dir", help="directory of raw trip files")
    p.add_argument("store", help="trip-summary store output path")
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("aggregate", help="build per-metric summary tables")
    p.add_argument("store", help="trip-summary store path")
    p.add_argument("out_dir", help="output directory for <metric>.summary files")
    p.add_argument("--drivers", required=True, help="driver roster file")
    p.add_argument("--vehicles", required=True, help="vehicle roster file")
    p.add_argument("--trip-index", required=True, help="trip index file")
    p.add_argument(
        "--metrics",
        nargs="*",
        choices=[m.value for m in MetricKind],
        help="subset of metrics to build (default: all five)",
    )
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("query", help="run one query offline and print the response")
    p.add_argument("data_dir", help="directory of <metric>.summary files")
    p.add_argument("request", help="JSON file with a query request")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="run the analytics HTTP service")
    p.add_argument("data_dir", help="directory of <metric>.summary files")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None, help="UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130


def file_sha256(path) -> str:
    """Convenience for determinism checks in tests and scripts."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


if __name__ == "__main__":
    sys.exit(main())
