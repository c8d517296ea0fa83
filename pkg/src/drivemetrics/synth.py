"""Seeded synthetic fleet generator.

Stands in for real instrumented-vehicle data at desk scale: produces driver
and vehicle rosters, a trip index, and raw 100-ms trip files with known
qualitative structure (per-cohort speeding bias and headway preference).

Generation is deterministic for a given (config, seed). Separate RNG streams
are derived per purpose, so e.g. changing the trips-per-driver range leaves
the roster files untouched. Pipeline tests must treat the generated raw files
as the only ground truth, never the generator's intent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from drivemetrics.domain import (
    AGE_RANGES,
    DriverProfile,
    RawTimestep,
    RoadAttributes,
    TripMeta,
    VehicleProfile,
)
from drivemetrics.metrics import (
    write_driver_roster,
    write_trip_index,
    write_vehicle_roster,
)
from drivemetrics.trips import write_raw_trip

# Physically plausible per-100ms speed change bound, mph.
MAX_SPEED_STEP_MPH = 3.5

MPH_TO_M_PER_S = 0.44704


@dataclass(frozen=True)
class RoadSegment:
    link_id: str
    way_id: str
    functional_class: str
    road_class: str
    speed_category: str
    speed_limit_mph: int


@dataclass(frozen=True)
class Cohort:
    """A behavior group drivers are assigned to."""

    name: str
    weight: float
    speeding_bias_mean_mph: float = 0.0
    speeding_bias_sd_mph: float = 1.0
    headway_mean_s: float = 2.0
    headway_sd_s: float = 0.5


@dataclass
class FleetConfig:
    seed: int
    n_drivers: int
    road_segments: list[RoadSegment]
    cohorts: list[Cohort]
    gender_weights: dict[str, float] = field(
        default_factory=lambda: {"Male": 1.0, "Female": 1.0}
    )
    age_weights: dict[str, float] = field(
        default_factory=lambda: {a: 1.0 for a in AGE_RANGES}
    )
    vehicle_class_weights: dict[str, float] = field(
        default_factory=lambda: {
            "Car": 4.0,
            "SUV-Crossover": 3.0,
            "Truck": 2.0,
            "Minivan": 1.0,
        }
    )
    n_trips_per_driver: tuple[int, int] = (2, 5)
    trip_duration_s: tuple[float, float] = (30.0, 120.0)
    dropout: dict[str, float] = field(default_factory=dict)
    compress: bool = False

    def __post_init__(self):
        if not self.road_segments:
            raise ValueError("road segment catalog must not be empty")
        if not self.cohorts:
            raise ValueError("at least one cohort is required")
        for name, weights in (
            ("gender_weights", self.gender_weights),
            ("age_weights", self.age_weights),
            ("vehicle_class_weights", self.vehicle_class_weights),
        ):
            if any(w < 0 for w in weights.values()) or not any(weights.values()):
                raise ValueError(f"{name}: weights must be nonnegative, one positive")
        for fld, p in self.dropout.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"dropout[{fld!r}] outside [0, 1]")

    @classmethod
    def from_file(cls, path, seed_override: Optional[int] = None) -> "FleetConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh)
        raw["road_segments"] = [RoadSegment(**s) for s in raw["road_segments"]]
        raw["cohorts"] = [Cohort(**c) for c in raw["cohorts"]]
        for key in ("n_trips_per_driver", "trip_duration_s"):
            if key in raw:
                raw[key] = tuple(raw[key])
        if seed_override is not None:
            raw["seed"] = seed_override
        return cls(**raw)


@dataclass
class FleetOutput:
    out_dir: Path
    drivers: list[DriverProfile]
    vehicles: list[VehicleProfile]
    trips: list[TripMeta]
    cohort_by_driver: dict[str, str]

    @property
    def trip_dir(self) -> Path:
        return self.out_dir / "trips"


def _weighted_choice(rng: random.Random, weights: dict[str, float]) -> str:
    labels = list(weights)
    return rng.choices(labels, weights=[weights[k] for k in labels], k=1)[0]


def _stream(seed: int, purpose: str) -> random.Random:
    return random.Random(f"{seed}/{purpose}")


def _generate_trip(
    rng: random.Random,
    config: FleetConfig,
    bias_mph: float,
    headway_pref_s: float,
) -> list[RawTimestep]:
    duration = rng.uniform(*config.trip_duration_s)
    n_steps = max(1, int(duration * 10))
    # Trip drives over one to three catalog segments.
    n_segments = rng.randint(1, min(3, len(config.road_segments)))
    segments = rng.sample(config.road_segments, n_segments)
    boundaries = sorted(rng.sample(range(1, n_steps), n_segments - 1)) + [n_steps]

    drop = config.dropout

    def kept(fld: str) -> bool:
        p = drop.get(fld, 0.0)
        return p <= 0.0 or rng.random() >= p

    seg_i = 0
    segment = segments[0]
    speed = max(0.0, segment.speed_limit_mph + bias_mph + rng.gauss(0, 2.0))
    headway = max(0.05, rng.gauss(headway_pref_s, 0.3))
    lane = rng.gauss(0.0, 0.3)
    records = []
    for step in range(n_steps):
        while step >= boundaries[seg_i]:
            seg_i += 1
            segment = segments[seg_i]
        target = segment.speed_limit_mph + bias_mph
        dv = 0.15 * (target - speed) + rng.gauss(0, 0.8)
        dv = max(-MAX_SPEED_STEP_MPH, min(MAX_SPEED_STEP_MPH, dv))
        speed = max(0.0, speed + dv)
        headway = min(12.0, max(0.05, headway + rng.gauss(0, 0.03)))
        lane = max(-2.5, min(2.5, lane + rng.gauss(0, 0.02)))
        following = headway * speed * MPH_TO_M_PER_S

        road = RoadAttributes(
            link_id=segment.link_id,
            way_id=segment.way_id,
            functional_class=segment.functional_class,
            road_class=segment.road_class,
            speed_category=segment.speed_category,
            speed_limit_mph=(
                segment.speed_limit_mph if kept("speed_limit_mph") else None
            ),
        )
        records.append(
            RawTimestep(
                timestamp_ms=step * 100,
                speed_mph=round(speed, 3) if kept("speed_mph") else None,
                road=road,
                lane_offset_m=round(lane, 3) if kept("lane_offset_m") else None,
                headway_s=round(headway, 3) if kept("headway_s") else None,
                following_distance_m=(
                    round(following, 2) if kept("following_distance_m") else None
                ),
            )
        )
    return records


def generate_fleet(config: FleetConfig, out_dir) -> FleetOutput:
    """Write rosters, trip index, and per-trip raw files under out_dir."""
    out_dir = Path(out_dir)
    trip_dir = out_dir / "trips"
    trip_dir.mkdir(parents=True, exist_ok=True)

    roster_rng = _stream(config.seed, "roster")
    drivers, vehicles, cohort_by_driver = [], [], {}
    bias_by_driver, headway_by_driver = {}, {}
    cohort_weights = {c.name: c.weight for c in config.cohorts}
    cohorts = {c.name: c for c in config.cohorts}
    for i in range(config.n_drivers):
        driver_id = f"D{i:04d}"
        drivers.append(
            DriverProfile(
                driver_id=driver_id,
                gender=_weighted_choice(roster_rng, config.gender_weights),
                age_range=_weighted_choice(roster_rng, config.age_weights),
            )
        )
        vehicles.append(
            VehicleProfile(
                vehicle_id=f"V{i:04d}",
                vehicle_class=_weighted_choice(
                    roster_rng, config.vehicle_class_weights
                ),
            )
        )
        cohort = cohorts[_weighted_choice(roster_rng, cohort_weights)]
        cohort_by_driver[driver_id] = cohort.name
        bias_by_driver[driver_id] = roster_rng.gauss(
            cohort.speeding_bias_mean_mph, cohort.speeding_bias_sd_mph
        )
        headway_by_driver[driver_id] = max(
            0.3, roster_rng.gauss(cohort.headway_mean_s, cohort.headway_sd_s)
        )

    trips_rng = _stream(config.seed, "trips")
    trips = []
    suffix = ".csv.gz" if config.compress else ".csv"
    for i, driver in enumerate(drivers):
        n_trips = trips_rng.randint(*config.n_trips_per_driver)
        for _ in range(n_trips):
            file_id = f"T{len(trips):05d}"
            meta = TripMeta(file_id, driver.driver_id, vehicles[i].vehicle_id)
            trip_rng = _stream(config.seed, f"trip/{file_id}")
            records = _generate_trip(
                trip_rng,
                config,
                bias_by_driver[driver.driver_id],
                headway_by_driver[driver.driver_id],
            )
            write_raw_trip(trip_dir / f"{file_id}{suffix}", records)
            trips.append(meta)

    write_driver_roster(out_dir / "drivers.csv", drivers)
    write_vehicle_roster(out_dir / "vehicles.csv", vehicles)
    write_trip_index(out_dir / "trip_index.csv", trips)
    return FleetOutput(out_dir, drivers, vehicles, trips, cohort_by_driver)
