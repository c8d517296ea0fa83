"""HTTP analytics service over the published per-metric summary files.

Read-only endpoints backed by an immutable in-memory snapshot; a snapshot
swap (operator reload) is a single attribute assignment, so every request
sees exactly one snapshot.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from drivemetrics.domain import MetricKind
from drivemetrics.metrics import MetricTable, read_metric_table, summary_filename
from drivemetrics.query import (
    DIMENSIONS,
    FilterSet,
    apply_filters,
    box_series,
    export_view,
    observed_dimensions,
    step_series,
)

Snapshot = dict[MetricKind, MetricTable]


def load_snapshot(data_dir) -> Snapshot:
    """Load every <metric>.summary file present under data_dir."""
    data_dir = Path(data_dir)
    snapshot: Snapshot = {}
    for metric in MetricKind:
        path = data_dir / summary_filename(metric)
        if path.exists():
            snapshot[metric] = read_metric_table(path, metric)
    return snapshot


class QueryRequest(BaseModel):
    metric: str
    filters: dict[str, list[str]] = Field(default_factory=dict)
    facet: Optional[str] = None
    mode: str = "miles"


def _parse_filters(filters: dict[str, list[str]]) -> FilterSet:
    try:
        return FilterSet({dim: frozenset(vals) for dim, vals in filters.items()})
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _resolve(snapshot: Snapshot, metric_name: str) -> MetricTable:
    try:
        metric = MetricKind(metric_name)
    except ValueError:
        raise HTTPException(status_code=404, detail=f"unknown metric {metric_name!r}")
    table = snapshot.get(metric)
    if table is None:
        raise HTTPException(status_code=404, detail=f"metric {metric_name!r} not loaded")
    return table


def run_query(snapshot: Snapshot, req: QueryRequest) -> dict:
    """Pure query evaluation shared by the HTTP endpoint and the offline CLI."""
    table = _resolve(snapshot, req.metric)
    if req.mode not in ("miles", "percent"):
        raise HTTPException(status_code=400, detail=f"unknown mode {req.mode!r}")
    if req.facet is not None and req.facet not in DIMENSIONS:
        raise HTTPException(status_code=400, detail=f"unknown facet {req.facet!r}")
    filters = _parse_filters(req.filters)
    view = apply_filters(table, filters)
    step = step_series(view, mode=req.mode, facet=req.facet)
    box = box_series(view, facet=req.facet)
    return {
        "metric": req.metric,
        "mode": req.mode,
        "total_miles": view.total_miles(),
        "n_drivers": len(view.driver_ids()),
        "step": [
            {
                "facet_value": s.facet_value,
                "total_miles": s.total_miles,
                "points": [asdict(p) for p in s.points],
            }
            for s in step
        ],
        "box": [
            {
                "facet_value": facet_value,
                "stats": [
                    {
                        "bin_index": b.bin_index,
                        "label": b.label,
                        "n_drivers": b.n_drivers,
                        "min_whisker": b.min_whisker,
                        "q1": b.q1,
                        "median": b.median,
                        "q3": b.q3,
                        "max_whisker": b.max_whisker,
                        "outliers": [
                            {"driver_id": d, "percent": p} for d, p in b.outliers
                        ],
                    }
                    for b in stats
                ],
            }
            for facet_value, stats in box
        ],
    }


def run_export(snapshot: Snapshot, req: QueryRequest) -> str:
    table = _resolve(snapshot, req.metric)
    if req.facet is not None and req.facet not in DIMENSIONS:
        raise HTTPException(status_code=400, detail=f"unknown facet {req.facet!r}")
    view = apply_filters(table, _parse_filters(req.filters))
    return export_view(view, req.facet)


def create_app(data_dir, static_dir=None) -> FastAPI:
    app = FastAPI(title="drivemetrics analytics service")
    app.state.snapshot = load_snapshot(data_dir)
    app.state.data_dir = Path(data_dir)

    def snapshot() -> Snapshot:
        snap = app.state.snapshot
        if not snap:
            raise HTTPException(
                status_code=503,
                detail={"reason": "no metric tables loaded", "data_dir": str(data_dir)},
            )
        return snap

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/metrics")
    def list_metrics():
        snap = snapshot()
        return [
            {
                "metric": metric.value,
                "total_miles": table.total_miles(),
                "n_drivers": table.n_drivers(),
            }
            for metric, table in sorted(snap.items(), key=lambda kv: kv[0].value)
        ]

    @app.get("/api/dimensions")
    def dimensions(metric: str):
        table = _resolve(snapshot(), metric)
        return observed_dimensions(table)

    @app.post("/api/query")
    def query(req: QueryRequest):
        return run_query(snapshot(), req)

    @app.post("/api/export")
    def export(req: QueryRequest):
        payload = run_export(snapshot(), req)
        return Response(
            content=payload,
            media_type="text/csv",
            headers={
                "Content-Disposition": f'attachment; filename="{req.metric}_export.csv"'
            },
        )

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
