"""Shared fixtures: a small deterministic synthetic fleet and pipeline helpers."""

from __future__ import annotations

import pytest

from drivemetrics.domain import MetricKind, TripMeta
from drivemetrics.metrics import (
    aggregate_metric,
    read_driver_roster,
    read_trip_index,
    read_vehicle_roster,
)
from drivemetrics.synth import Cohort, FleetConfig, RoadSegment, generate_fleet
from drivemetrics.trips import read_raw_trip, summarize_trip

ROAD_CATALOG = [
    RoadSegment("L100", "W100", "2", "motorway", "2", 65),
    RoadSegment("L200", "W200", "3", "primary", "3", 55),
    RoadSegment("L300", "W300", "5", "residential", "6", 35),
]

COHORTS = [
    Cohort("steady", 1.0, speeding_bias_mean_mph=0.0, headway_mean_s=2.2),
    Cohort("hurried", 1.0, speeding_bias_mean_mph=5.0, headway_mean_s=1.2),
]


def make_config(**overrides) -> FleetConfig:
    params = dict(
        seed=42,
        n_drivers=6,
        road_segments=ROAD_CATALOG,
        cohorts=COHORTS,
        n_trips_per_driver=(2, 4),
        trip_duration_s=(15.0, 40.0),
        dropout={
            "headway_s": 0.3,
            "following_distance_m": 0.3,
            "lane_offset_m": 0.2,
            "speed_limit_mph": 0.05,
            "speed_mph": 0.02,
        },
    )
    params.update(overrides)
    return FleetConfig(**params)


@pytest.fixture(scope="session")
def small_fleet(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("fleet")
    fleet = generate_fleet(make_config(), out_dir)
    return fleet


_SUMMARY_CACHE: dict = {}


def summarize_fleet(fleet):
    """Summarize every trip file of a fleet, returning all store rows."""
    cached = _SUMMARY_CACHE.get(fleet.out_dir)
    if cached is not None:
        return list(cached)
    rows = []
    for path in sorted(fleet.trip_dir.iterdir()):
        file_id = path.name.removesuffix(".csv.gz").removesuffix(".csv")
        records = read_raw_trip(path)
        rows.extend(summarize_trip(records, TripMeta(file_id, "", "")))
    _SUMMARY_CACHE[fleet.out_dir] = rows
    return list(rows)


def build_tables(fleet) -> dict[MetricKind, object]:
    """Full in-process pipeline: raw files -> per-metric tables."""
    trip_rows = summarize_fleet(fleet)
    drivers = read_driver_roster(fleet.out_dir / "drivers.csv")
    vehicles = read_vehicle_roster(fleet.out_dir / "vehicles.csv")
    trip_index = read_trip_index(fleet.out_dir / "trip_index.csv")
    return {
        metric: aggregate_metric(trip_rows, metric, trip_index, drivers, vehicles)
        for metric in MetricKind
    }


@pytest.fixture(scope="session")
def small_tables(small_fleet):
    return build_tables(small_fleet)
