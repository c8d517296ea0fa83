"""Shared semantic types: metrics, bin specifications, rosters, raw telemetry records.

All numeric bin parameters are carried as exact :class:`fractions.Fraction`
values so that bin edges are identical across platforms and runs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class MetricKind(enum.Enum):
    """The five driving metrics that get binned and summarized."""

    SPEED = "speed"
    SPEEDING = "speeding"
    HEADWAY = "headway"
    FOLLOWING_DISTANCE = "following_distance"
    LANE_POSITION = "lane_position"


@dataclass(frozen=True)
class BinSpec:
    """Half-open binning grid for one metric.

    Bin k covers [anchor + k*width, anchor + (k+1)*width). ``lower``/``upper``
    of ``None`` mean unbounded on that side.
    """

    metric: MetricKind
    width: Fraction
    lower: Optional[Fraction]
    upper: Optional[Fraction]
    anchor: Fraction = Fraction(0)

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("bin width must be positive")
        if self.lower is not None and self.upper is not None:
            if self.lower >= self.upper:
                raise ValueError("lower bound must be below upper bound")
            # bounded edges must land exactly on the anchored grid
            if (self.upper - self.lower) % self.width != 0:
                raise ValueError("bounds must span a whole number of bins")
        for bound in (self.lower, self.upper):
            if bound is not None and (bound - self.anchor) % self.width != 0:
                raise ValueError("bounds must lie on the anchored grid")

    @property
    def n_bins(self) -> Optional[int]:
        """Number of bins between the bounds; None when unbounded."""
        if self.lower is None or self.upper is None:
            return None
        return int((self.upper - self.lower) / self.width)

    def index_range(self) -> Optional[tuple[int, int]]:
        """Inclusive (min_index, max_index) for bounded metrics, else None."""
        if self.lower is None or self.upper is None:
            return None
        lo = int((self.lower - self.anchor) / self.width)
        return lo, lo + self.n_bins - 1


_CANONICAL_SPECS = {
    MetricKind.SPEED: BinSpec(
        MetricKind.SPEED, width=Fraction(5, 2), lower=Fraction(0), upper=None
    ),
    MetricKind.SPEEDING: BinSpec(
        MetricKind.SPEEDING, width=Fraction(5, 2), lower=None, upper=None
    ),
    # Headway beyond 10 s is "no meaningful lead vehicle"; treated as absent.
    MetricKind.HEADWAY: BinSpec(
        MetricKind.HEADWAY, width=Fraction(1, 4), lower=Fraction(0), upper=Fraction(10)
    ),
    MetricKind.FOLLOWING_DISTANCE: BinSpec(
        MetricKind.FOLLOWING_DISTANCE,
        width=Fraction(10),
        lower=Fraction(0),
        upper=Fraction(200),
    ),
    MetricKind.LANE_POSITION: BinSpec(
        MetricKind.LANE_POSITION,
        width=Fraction(1, 10),
        lower=Fraction(-2),
        upper=Fraction(2),
    ),
}


def canonical_bin_spec(metric: MetricKind) -> BinSpec:
    """Return the fixed bin specification for a metric."""
    return _CANONICAL_SPECS[metric]


UNKNOWN = "Unknown"

GENDERS = ("Male", "Female", UNKNOWN)

# Ordered age bands; the youngest band is four years wide by convention.
AGE_RANGES = (
    "16-19",
    "20-24",
    "25-29",
    "30-34",
    "35-39",
    "40-44",
    "45-49",
    "50-54",
    "55-59",
    "60-64",
    "65-69",
    "70-74",
    "75-79",
    "80+",
)

VEHICLE_CLASSES = ("Car", "SUV-Crossover", "Truck", "Minivan")


@dataclass(frozen=True)
class RoadAttributes:
    """Map-matched roadway attributes for one road segment; any field may be absent."""

    link_id: Optional[str] = None
    way_id: Optional[str] = None
    functional_class: Optional[str] = None
    road_class: Optional[str] = None
    speed_category: Optional[str] = None
    speed_limit_mph: Optional[int] = None

    def __post_init__(self):
        lim = self.speed_limit_mph
        if lim is not None and (lim < 5 or lim > 85 or lim % 5 != 0):
            raise ValueError(f"speed limit {lim} not a multiple of 5 in [5, 85]")


@dataclass(frozen=True)
class DriverProfile:
    driver_id: str
    gender: str = UNKNOWN
    age_range: str = UNKNOWN

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ValueError(f"unknown gender label {self.gender!r}")
        if self.age_range != UNKNOWN and self.age_range not in AGE_RANGES:
            raise ValueError(f"unknown age range {self.age_range!r}")


@dataclass(frozen=True)
class VehicleProfile:
    vehicle_id: str
    vehicle_class: str

    def __post_init__(self):
        if self.vehicle_class not in VEHICLE_CLASSES:
            raise ValueError(f"unknown vehicle class {self.vehicle_class!r}")


@dataclass(frozen=True)
class RawTimestep:
    """One 100-ms telemetry record."""

    timestamp_ms: int
    speed_mph: Optional[float] = None
    road: RoadAttributes = RoadAttributes()
    lane_offset_m: Optional[float] = None  # left of center is negative
    headway_s: Optional[float] = None
    following_distance_m: Optional[float] = None


@dataclass(frozen=True)
class TripMeta:
    file_id: str
    driver_id: str
    vehicle_id: str


TIMESTEP_MS = 100
