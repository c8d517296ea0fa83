#!/usr/bin/env python3
"""Dump golden-table API responses as files for the frontend test suite.

Writes the exact payloads the HTTP service would return, so the UI tests can
assert against real server output without running the Python service.
"""

import argparse
import json
from pathlib import Path

from drivemetrics.domain import MetricKind
from drivemetrics.golden import speeding_gender_table, headway_age_table
from drivemetrics.query import observed_dimensions
from drivemetrics.service import QueryRequest, run_export, run_query

SPEEDING_REQUEST = {
    "metric": "speeding",
    "filters": {"age_range": ["16-19"], "speed_limit": ["65"]},
    "facet": "gender",
    "mode": "percent",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "out_dir",
        nargs="?",
        default=str(Path(__file__).resolve().parent.parent / "frontend/tests/fixtures"),
    )
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tables: dict = {}
    for table in (speeding_gender_table(), headway_age_table()):
        tables[table.metric] = table

    metrics_payload = [
        {
            "metric": metric.value,
            "total_miles": table.total_miles(),
            "n_drivers": table.n_drivers(),
        }
        for metric, table in sorted(tables.items(), key=lambda kv: kv[0].value)
    ]
    (out / "metrics.json").write_text(json.dumps(metrics_payload, indent=2))

    (out / "dimensions_speeding.json").write_text(
        json.dumps(observed_dimensions(tables[MetricKind.SPEEDING]), indent=2)
    )

    request = QueryRequest(**SPEEDING_REQUEST)
    (out / "query_speeding_request.json").write_text(
        json.dumps(SPEEDING_REQUEST, indent=2)
    )
    (out / "query_speeding_response.json").write_text(
        json.dumps(run_query(tables, request), indent=2)
    )
    (out / "export_speeding.csv").write_text(run_export(tables, request))
    print(f"wrote fixtures under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
