"""Stage 2: collapse the trip-summary store into one table per driving metric.

Trip identifiers are dropped, driver demographics and vehicle class are
joined in, and rows whose metric bin is absent are filtered out. Measures
are accumulated as exact rationals, so merging partial tables is exactly
commutative and associative regardless of shard order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Optional

from drivemetrics.binning import BinIndex, bin_label
from drivemetrics.domain import (
    UNKNOWN,
    DriverProfile,
    MetricKind,
    TripMeta,
    VehicleProfile,
)
from drivemetrics.trips import TripSummaryRow

_BIN_FIELD = {
    MetricKind.SPEED: "speed_bin",
    MetricKind.SPEEDING: "speeding_bin",
    MetricKind.HEADWAY: "headway_bin",
    MetricKind.FOLLOWING_DISTANCE: "following_bin",
    MetricKind.LANE_POSITION: "lane_bin",
}


class MetricKey(NamedTuple):
    """Grouping key of one metric-table row (everything but the measures)."""

    vehicle_id: str
    driver_id: str
    gender: str
    age_range: str
    vehicle_class: str
    functional_class: Optional[str]
    road_class: Optional[str]
    speed_category: Optional[str]
    speed_limit_mph: Optional[int]
    bin_index: int


def _key_sort(key: MetricKey):
    return tuple((v is None, v) for v in key)


@dataclass
class MetricTable:
    """One metric's study-wide summary: key -> (miles, time in tenths of s)."""

    metric: MetricKind
    rows: dict[MetricKey, tuple[Fraction, int]] = field(default_factory=dict)
    unresolved_drivers: int = 0
    unresolved_vehicles: int = 0

    def total_miles(self) -> float:
        return float(sum((m for m, _ in self.rows.values()), Fraction(0)))

    def n_drivers(self) -> int:
        return len({k.driver_id for k in self.rows})

    def sorted_keys(self) -> list[MetricKey]:
        return sorted(self.rows, key=_key_sort)

    def add(self, key: MetricKey, miles: Fraction, time_tenths: int) -> None:
        prev = self.rows.get(key)
        if prev is None:
            self.rows[key] = (miles, time_tenths)
        else:
            self.rows[key] = (prev[0] + miles, prev[1] + time_tenths)


def aggregate_metric(
    trip_rows: Iterable[TripSummaryRow],
    metric: MetricKind,
    trip_index: dict[str, TripMeta],
    drivers: dict[str, DriverProfile],
    vehicles: dict[str, VehicleProfile],
) -> MetricTable:
    """Group trip rows with the metric's bin present into a MetricTable.

    Rows whose bin is absent are excluded; unresolved driver or vehicle ids
    fall into Unknown categories and are counted on the result.
    """
    if not isinstance(metric, MetricKind):
        raise ValueError(f"unknown metric {metric!r}")
    bin_field = _BIN_FIELD[metric]
    table = MetricTable(metric)
    unresolved_d: set[str] = set()
    unresolved_v: set[str] = set()
    for row in trip_rows:
        bin_idx = getattr(row, bin_field)
        if bin_idx is None:
            continue
        meta = trip_index.get(row.file_id)
        if meta is None:
            raise KeyError(f"trip {row.file_id!r} missing from trip index")
        driver = drivers.get(meta.driver_id)
        if driver is None:
            unresolved_d.add(meta.driver_id)
            gender = age_range = UNKNOWN
        else:
            gender, age_range = driver.gender, driver.age_range
        vehicle = vehicles.get(meta.vehicle_id)
        if vehicle is None:
            unresolved_v.add(meta.vehicle_id)
            vehicle_class = UNKNOWN
        else:
            vehicle_class = vehicle.vehicle_class
        key = MetricKey(
            vehicle_id=meta.vehicle_id,
            driver_id=meta.driver_id,
            gender=gender,
            age_range=age_range,
            vehicle_class=vehicle_class,
            functional_class=row.road.functional_class,
            road_class=row.road.road_class,
            speed_category=row.road.speed_category,
            speed_limit_mph=row.road.speed_limit_mph,
            bin_index=bin_idx,
        )
        table.add(key, Fraction(row.miles), row.time_tenths)
    table.unresolved_drivers = len(unresolved_d)
    table.unresolved_vehicles = len(unresolved_v)
    return table


def merge_metric_tables(a: MetricTable, b: MetricTable) -> MetricTable:
    """Key-wise sum of two partial tables for the same metric."""
    if a.metric is not b.metric:
        raise ValueError(f"cannot merge {a.metric} with {b.metric}")
    merged = MetricTable(
        a.metric,
        dict(a.rows),
        unresolved_drivers=a.unresolved_drivers + b.unresolved_drivers,
        unresolved_vehicles=a.unresolved_vehicles + b.unresolved_vehicles,
    )
    for key, (miles, tenths) in b.rows.items():
        merged.add(key, miles, tenths)
    return merged


# ---------------------------------------------------------------------------
# Published file format: one <metric>.summary file per driving metric.

SUMMARY_COLUMNS = [
    "vehicle_id",
    "driver_id",
    "gender",
    "age_range",
    "vehicle_class",
    "functional_class",
    "road_class",
    "speed_category",
    "speed_limit_mph",
    "bin_index",
    "bin_label",
    "miles",
    "time_s",
]


def summary_filename(metric: MetricKind) -> str:
    return f"{metric.value}.summary"


def write_metric_table(table: MetricTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for key in table.sorted_keys():
            miles, tenths = table.rows[key]
            writer.writerow(
                [
                    key.vehicle_id,
                    key.driver_id,
                    key.gender,
                    key.age_range,
                    key.vehicle_class,
                    key.functional_class or "",
                    key.road_class or "",
                    key.speed_category or "",
                    "" if key.speed_limit_mph is None else key.speed_limit_mph,
                    key.bin_index,
                    bin_label(BinIndex(table.metric, key.bin_index)),
                    repr(float(miles)),
                    f"{tenths // 10}.{tenths % 10}",
                ]
            )


def read_metric_table(path, metric: MetricKind) -> MetricTable:
    table = MetricTable(metric)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SUMMARY_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        for line in reader:
            key = MetricKey(
                vehicle_id=line["vehicle_id"],
                driver_id=line["driver_id"],
                gender=line["gender"],
                age_range=line["age_range"],
                vehicle_class=line["vehicle_class"],
                functional_class=line["functional_class"] or None,
                road_class=line["road_class"] or None,
                speed_category=line["speed_category"] or None,
                speed_limit_mph=(
                    int(line["speed_limit_mph"]) if line["speed_limit_mph"] else None
                ),
                bin_index=int(line["bin_index"]),
            )
            table.add(
                key,
                Fraction(float(line["miles"])),
                round(float(line["time_s"]) * 10),
            )
    return table


# ---------------------------------------------------------------------------
# Roster and trip-index files: delimited text with headers.


def read_driver_roster(path) -> dict[str, DriverProfile]:
    drivers = {}
    with open(path, newline="") as fh:
        for line in csv.DictReader(fh):
            d = DriverProfile(
                driver_id=line["driver_id"],
                gender=line["gender"] or UNKNOWN,
                age_range=line["age_range"] or UNKNOWN,
            )
            if d.driver_id in drivers:
                raise ValueError(f"duplicate driver_id {d.driver_id!r}")
            drivers[d.driver_id] = d
    return drivers


def read_vehicle_roster(path) -> dict[str, VehicleProfile]:
    vehicles = {}
    with open(path, newline="") as fh:
        for line in csv.DictReader(fh):
            v = VehicleProfile(line["vehicle_id"], line["vehicle_class"])
            if v.vehicle_id in vehicles:
                raise ValueError(f"duplicate vehicle_id {v.vehicle_id!r}")
            vehicles[v.vehicle_id] = v
    return vehicles


def read_trip_index(path) -> dict[str, TripMeta]:
    index = {}
    with open(path, newline="") as fh:
        for line in csv.DictReader(fh):
            meta = TripMeta(line["file_id"], line["driver_id"], line["vehicle_id"])
            if meta.file_id in index:
                raise ValueError(f"duplicate file_id {meta.file_id!r}")
            index[meta.file_id] = meta
    return index


def write_driver_roster(path, drivers: Iterable[DriverProfile]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["driver_id", "gender", "age_range"])
        for d in drivers:
            writer.writerow([d.driver_id, d.gender, d.age_range])


def write_vehicle_roster(path, vehicles: Iterable[VehicleProfile]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vehicle_id", "vehicle_class"])
        for v in vehicles:
            writer.writerow([v.vehicle_id, v.vehicle_class])


def write_trip_index(path, trips: Iterable[TripMeta]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file_id", "driver_id", "vehicle_id"])
        for t in trips:
            writer.writerow([t.file_id, t.driver_id, t.vehicle_id])
