"""Stage 1: reduce one trip's raw 100-ms records to binned group-summary rows.

Each trip becomes one row per unique (road attributes x five-bin tuple)
combination, carrying aggregate miles and seconds. No timestamped data
survives the summary. Per-step distances are accumulated as exact rationals
so parallel and serial runs write byte-identical stores.
"""

from __future__ import annotations

import csv
import gzip
import io
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from drivemetrics.binning import BinIndex, bin_value, speeding_value
from drivemetrics.domain import (
    TIMESTEP_MS,
    MetricKind,
    RawTimestep,
    RoadAttributes,
    TripMeta,
    canonical_bin_spec,
)

# One 100-ms step at speed v mph covers v * 0.1 / 3600 miles.
_STEP_MILES_PER_MPH = Fraction(1, 36000)


@dataclass(frozen=True)
class DerivedTimestep:
    """One raw record with distance and all five bins assigned."""

    road: RoadAttributes
    distance_mi: Optional[Fraction]
    speed_bin: Optional[BinIndex]
    speeding_bin: Optional[BinIndex]
    lane_bin: Optional[BinIndex]
    headway_bin: Optional[BinIndex]
    following_bin: Optional[BinIndex]


@dataclass(frozen=True)
class TripSummaryRow:
    """Aggregate miles/time for one bin combination within one trip."""

    file_id: str
    road: RoadAttributes
    speed_bin: Optional[int]
    speeding_bin: Optional[int]
    lane_bin: Optional[int]
    headway_bin: Optional[int]
    following_bin: Optional[int]
    miles: float
    time_tenths: int  # tenths of a second, so time is an exact 0.1-s multiple

    @property
    def time_s(self) -> float:
        return self.time_tenths / 10


def derive_timestep(raw: RawTimestep) -> DerivedTimestep:
    """Assign distance and per-metric bins; absence propagates, never raises."""
    speed = raw.speed_mph
    if speed is not None and speed < 0:
        speed = None  # extraneous sensor value

    def _bin(metric: MetricKind, value: Optional[float]) -> Optional[BinIndex]:
        if value is None:
            return None
        return bin_value(value, canonical_bin_spec(metric))

    speeding = None
    if speed is not None and raw.road.speed_limit_mph is not None:
        speeding = speeding_value(speed, raw.road.speed_limit_mph)

    distance = None if speed is None else Fraction(speed) * _STEP_MILES_PER_MPH
    return DerivedTimestep(
        road=raw.road,
        distance_mi=distance,
        speed_bin=_bin(MetricKind.SPEED, speed),
        speeding_bin=_bin(MetricKind.SPEEDING, speeding),
        lane_bin=_bin(MetricKind.LANE_POSITION, raw.lane_offset_m),
        headway_bin=_bin(MetricKind.HEADWAY, raw.headway_s),
        following_bin=_bin(MetricKind.FOLLOWING_DISTANCE, raw.following_distance_m),
    )


def _opt(x):
    # None-safe sort component
    return (x is None, x)


def group_sort_key(row: TripSummaryRow):
    """Deterministic ordering: road identifiers first, then bins in table order."""
    r = row.road
    return (
        _opt(r.link_id),
        _opt(r.way_id),
        _opt(r.functional_class),
        _opt(r.road_class),
        _opt(r.speed_category),
        _opt(r.speed_limit_mph),
        _opt(row.speed_bin),
        _opt(row.speeding_bin),
        _opt(row.lane_bin),
        _opt(row.headway_bin),
        _opt(row.following_bin),
    )


def validate_timestamps(records: Sequence[RawTimestep]) -> None:
    """Require strictly increasing timestamps with a uniform 100-ms step."""
    for i in range(1, len(records)):
        gap = records[i].timestamp_ms - records[i - 1].timestamp_ms
        if gap != TIMESTEP_MS:
            raise ValueError(
                f"non-uniform timestep at record {i}: gap {gap} ms "
                f"(expected {TIMESTEP_MS} ms)"
            )


def summarize_trip(
    records: Sequence[RawTimestep], meta: TripMeta
) -> list[TripSummaryRow]:
    """Group a trip's derived records into summary rows, sorted by grouping key.

    Records without a usable speed accrue neither miles nor time (distance
    cannot be estimated for them, and dropping them keeps both denominators
    consistent).
    """
    validate_timestamps(records)
    groups: dict[tuple, list] = {}
    for raw in records:
        d = derive_timestep(raw)
        if d.distance_mi is None:
            continue
        key = (
            d.road,
            None if d.speed_bin is None else d.speed_bin.index,
            None if d.speeding_bin is None else d.speeding_bin.index,
            None if d.lane_bin is None else d.lane_bin.index,
            None if d.headway_bin is None else d.headway_bin.index,
            None if d.following_bin is None else d.following_bin.index,
        )
        acc = groups.get(key)
        if acc is None:
            groups[key] = [d.distance_mi, 1]
        else:
            acc[0] += d.distance_mi
            acc[1] += 1
    rows = [
        TripSummaryRow(
            file_id=meta.file_id,
            road=key[0],
            speed_bin=key[1],
            speeding_bin=key[2],
            lane_bin=key[3],
            headway_bin=key[4],
            following_bin=key[5],
            miles=float(miles),
            time_tenths=count,
        )
        for key, (miles, count) in groups.items()
    ]
    rows.sort(key=group_sort_key)
    return rows


# ---------------------------------------------------------------------------
# Raw trip files: delimited text, one file per trip, optional gzip.

RAW_COLUMNS = [
    "timestamp_ms",
    "speed_mph",
    "link_id",
    "way_id",
    "functional_class",
    "road_class",
    "speed_category",
    "speed_limit_mph",
    "lane_offset_m",
    "headway_s",
    "following_distance_m",
]


def _open_text(path, mode="rt"):
    path = Path(path)
    if path.suffix == ".gz":
        if "r" in mode:
            return gzip.open(path, "rt", newline="")
        # fixed mtime keeps repeated runs byte-identical
        raw = gzip.GzipFile(filename="", mode="wb", fileobj=open(path, "wb"), mtime=0)
        return io.TextIOWrapper(raw, newline="")
    return open(path, mode.replace("t", ""), newline="")


def read_raw_trip(path) -> list[RawTimestep]:
    """Parse one raw trip file. Empty fields are absent values."""
    with _open_text(path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RAW_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        records = []
        for line in reader:
            def f(name, conv=float):
                v = line[name]
                return conv(v) if v != "" else None

            records.append(
                RawTimestep(
                    timestamp_ms=int(line["timestamp_ms"]),
                    speed_mph=f("speed_mph"),
                    road=RoadAttributes(
                        link_id=f("link_id", str),
                        way_id=f("way_id", str),
                        functional_class=f("functional_class", str),
                        road_class=f("road_class", str),
                        speed_category=f("speed_category", str),
                        speed_limit_mph=f("speed_limit_mph", int),
                    ),
                    lane_offset_m=f("lane_offset_m"),
                    headway_s=f("headway_s"),
                    following_distance_m=f("following_distance_m"),
                )
            )
    return records


def write_raw_trip(path, records: Iterable[RawTimestep]) -> None:
    with _open_text(path, "wt") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_COLUMNS)
        for r in records:
            road = r.road
            writer.writerow(
                [
                    r.timestamp_ms,
                    "" if r.speed_mph is None else r.speed_mph,
                    road.link_id or "",
                    road.way_id or "",
                    road.functional_class or "",
                    road.road_class or "",
                    road.speed_category or "",
                    "" if road.speed_limit_mph is None else road.speed_limit_mph,
                    "" if r.lane_offset_m is None else r.lane_offset_m,
                    "" if r.headway_s is None else r.headway_s,
                    "" if r.following_distance_m is None else r.following_distance_m,
                ]
            )


# ---------------------------------------------------------------------------
# Trip-summary store: the stage-1 output table, sorted, file_id-idempotent.

STORE_COLUMNS = [
    "file_id",
    "link_id",
    "way_id",
    "functional_class",
    "road_class",
    "speed_category",
    "speed_limit_mph",
    "speed_bin",
    "speeding_bin",
    "lane_bin",
    "headway_bin",
    "following_bin",
    "miles",
    "time_s",
]


class TripSummaryStore:
    """CSV-backed store of trip summary rows, kept sorted by (file_id, key).

    Re-appending a trip replaces its rows. Writes go through a temp file and
    an atomic rename, so a failed write leaves the previous contents intact.
    """

    def __init__(self, path):
        self.path = Path(path)

    def read_rows(self) -> list[TripSummaryRow]:
        if not self.path.exists():
            return []
        with open(self.path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != STORE_COLUMNS:
                raise ValueError(f"{self.path}: unexpected columns {reader.fieldnames}")
            rows = []
            for line in reader:
                def f(name, conv):
                    v = line[name]
                    return conv(v) if v != "" else None

                rows.append(
                    TripSummaryRow(
                        file_id=line["file_id"],
                        road=RoadAttributes(
                            link_id=f("link_id", str),
                            way_id=f("way_id", str),
                            functional_class=f("functional_class", str),
                            road_class=f("road_class", str),
                            speed_category=f("speed_category", str),
                            speed_limit_mph=f("speed_limit_mph", int),
                        ),
                        speed_bin=f("speed_bin", int),
                        speeding_bin=f("speeding_bin", int),
                        lane_bin=f("lane_bin", int),
                        headway_bin=f("headway_bin", int),
                        following_bin=f("following_bin", int),
                        miles=float(line["miles"]),
                        time_tenths=round(float(line["time_s"]) * 10),
                    )
                )
        return rows

    def write_all(self, rows: Iterable[TripSummaryRow]) -> int:
        """Replace the entire store with the given rows, sorted."""
        ordered = sorted(rows, key=lambda r: (r.file_id,) + group_sort_key(r))
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(STORE_COLUMNS)
                for r in ordered:
                    road = r.road

                    def b(v):
                        return "" if v is None else v

                    writer.writerow(
                        [
                            r.file_id,
                            b(road.link_id),
                            b(road.way_id),
                            b(road.functional_class),
                            b(road.road_class),
                            b(road.speed_category),
                            b(road.speed_limit_mph),
                            b(r.speed_bin),
                            b(r.speeding_bin),
                            b(r.lane_bin),
                            b(r.headway_bin),
                            b(r.following_bin),
                            repr(r.miles),
                            f"{r.time_tenths // 10}.{r.time_tenths % 10}",
                        ]
                    )
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return len(ordered)


def write_trip_summaries(rows: Sequence[TripSummaryRow], store: TripSummaryStore) -> int:
    """Append one trip's rows, replacing any previous rows for its file_id."""
    if not rows:
        return 0
    file_ids = {r.file_id for r in rows}
    if len(file_ids) != 1:
        raise ValueError("write_trip_summaries appends one trip at a time")
    (file_id,) = file_ids
    kept = [r for r in store.read_rows() if r.file_id != file_id]
    store.write_all(kept + list(rows))
    return len(rows)
