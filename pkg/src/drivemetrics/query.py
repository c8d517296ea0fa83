"""Filter/facet analytics over a loaded metric table.

Produces step-plot series (miles or percent of miles per bin) and per-driver
box-and-whisker statistics, plus a delimited-text export of the filtered
selection. Tables are immutable after load; everything here is read-only.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from drivemetrics.binning import BinIndex, bin_label
from drivemetrics.domain import UNKNOWN, MetricKind
from drivemetrics.metrics import SUMMARY_COLUMNS, MetricKey, MetricTable, _key_sort

# The filterable/facetable dimensions, in display order.
DIMENSIONS = (
    "speed_limit",
    "age_range",
    "gender",
    "vehicle_class",
    "functional_class",
    "road_class",
    "speed_category",
)


def dimension_value(key: MetricKey, dim: str) -> str:
    """Categorical value of a dimension for one row; absent becomes Unknown."""
    if dim == "speed_limit":
        return UNKNOWN if key.speed_limit_mph is None else str(key.speed_limit_mph)
    raw = getattr(key, dim)
    return UNKNOWN if raw is None else raw


@dataclass(frozen=True)
class FilterSet:
    """Per-dimension allowed-value sets; a missing dimension means "all"."""

    allowed: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        for dim, values in self.allowed.items():
            if dim not in DIMENSIONS:
                raise ValueError(f"unknown filter dimension {dim!r}")
            if not values:
                raise ValueError(f"empty allowed set for {dim!r}")

    @classmethod
    def of(cls, **selections) -> "FilterSet":
        """Build from keyword args, e.g. FilterSet.of(age_range={"16-19"})."""
        return cls({dim: frozenset(vals) for dim, vals in selections.items()})

    def matches(self, key: MetricKey) -> bool:
        return all(
            dimension_value(key, dim) in values
            for dim, values in self.allowed.items()
        )


@dataclass
class FilteredView:
    """Rows of a metric table matching a FilterSet."""

    metric: MetricKind
    rows: list[tuple[MetricKey, float, float]]  # (key, miles, time_s)

    def total_miles(self) -> float:
        return sum(miles for _, miles, _ in self.rows)

    def driver_ids(self) -> set[str]:
        return {key.driver_id for key, _, _ in self.rows}


def apply_filters(table: MetricTable, filters: FilterSet) -> FilteredView:
    """Select rows matching every dimension constraint (conjunctive)."""
    rows = [
        (key, float(miles), tenths / 10)
        for key, (miles, tenths) in table.rows.items()
        if filters.matches(key)
    ]
    rows.sort(key=lambda r: _key_sort(r[0]))
    return FilteredView(table.metric, rows)


@dataclass
class StepPoint:
    bin_index: int
    label: str
    miles: float
    percent: float


@dataclass
class StepSeries:
    facet_value: str
    points: list[StepPoint]
    total_miles: float


def _facet_groups(
    view: FilteredView, facet: Optional[str]
) -> list[tuple[str, list[tuple[MetricKey, float, float]]]]:
    if not view.rows:
        return []
    if facet is None:
        return [("(all)", view.rows)]
    if facet not in DIMENSIONS:
        raise ValueError(f"unknown facet dimension {facet!r}")
    groups: dict[str, list] = {}
    for row in view.rows:
        groups.setdefault(dimension_value(row[0], facet), []).append(row)
    return sorted(groups.items())


def _bin_range(view: FilteredView) -> Optional[range]:
    """Populated bin span of the whole view; shared across facet panels so
    every series lives on one unified x-axis."""
    indices = [key.bin_index for key, _, _ in view.rows]
    if not indices:
        return None
    return range(min(indices), max(indices) + 1)


def step_series(
    view: FilteredView, mode: str = "miles", facet: Optional[str] = None
) -> list[StepSeries]:
    """One bin-ordered series per facet value, with zero-filled gaps.

    Both miles and percent are populated on every point; ``mode`` is carried
    by callers as the default display encoding only.
    """
    if mode not in ("miles", "percent"):
        raise ValueError(f"unknown mode {mode!r}")
    bins = _bin_range(view)
    result = []
    for facet_value, rows in _facet_groups(view, facet):
        per_bin: dict[int, float] = {}
        for key, miles, _ in rows:
            per_bin[key.bin_index] = per_bin.get(key.bin_index, 0.0) + miles
        total = sum(per_bin.values())
        points = [
            StepPoint(
                bin_index=k,
                label=bin_label(BinIndex(view.metric, k)),
                miles=per_bin.get(k, 0.0),
                percent=(100.0 * per_bin.get(k, 0.0) / total) if total > 0 else 0.0,
            )
            for k in (bins or range(0))
        ]
        result.append(StepSeries(facet_value, points, total))
    return result


@dataclass
class BoxStats:
    """Tukey five-number summary of per-driver percentages for one bin."""

    bin_index: int
    label: str
    n_drivers: int
    min_whisker: float
    q1: float
    median: float
    q3: float
    max_whisker: float
    outliers: list[tuple[str, float]]


def tukey_box(values: Sequence[tuple[str, float]]) -> tuple:
    """Five-number summary with 1.5*IQR whiskers anchored on data points.

    Returns (min_whisker, q1, median, q3, max_whisker, outliers).
    """
    data = np.array([v for _, v in values], dtype=float)
    q1, median, q3 = np.percentile(data, [25, 50, 75], method="linear")
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = data[(data >= lo_fence) & (data <= hi_fence)]
    outliers = [
        (driver, v) for driver, v in values if v < lo_fence or v > hi_fence
    ]
    # whiskers sit on data points, clamped to the box when the interpolated
    # quartile falls outside the in-fence data
    return (
        float(min(inside.min(), q1)),
        float(q1),
        float(median),
        float(q3),
        float(max(inside.max(), q3)),
        sorted(outliers),
    )


def box_series(
    view: FilteredView,
    facet: Optional[str] = None,
    include_zero_drivers: bool = True,
) -> list[tuple[str, list[BoxStats]]]:
    """Per-bin driver-level distribution of percent-of-own-miles.

    Each driver's percent is relative to that driver's total filtered miles.
    Drivers with zero miles in a bin contribute 0 percent there (omitting
    them biases medians upward); zero-total drivers never contribute.
    """
    bins = _bin_range(view)
    result = []
    for facet_value, rows in _facet_groups(view, facet):
        driver_total: dict[str, float] = {}
        driver_bin: dict[tuple[str, int], float] = {}
        for key, miles, _ in rows:
            driver_total[key.driver_id] = driver_total.get(key.driver_id, 0.0) + miles
            dk = (key.driver_id, key.bin_index)
            driver_bin[dk] = driver_bin.get(dk, 0.0) + miles
        drivers = sorted(d for d, t in driver_total.items() if t > 0)
        if not drivers or bins is None:
            result.append((facet_value, []))
            continue
        stats = []
        for k in bins:
            values = [
                (d, 100.0 * driver_bin.get((d, k), 0.0) / driver_total[d])
                for d in drivers
            ]
            if not include_zero_drivers:
                values = [(d, p) for d, p in values if driver_bin.get((d, k), 0.0) > 0]
            if not values:
                continue
            lo, q1, med, q3, hi, outliers = tukey_box(values)
            stats.append(
                BoxStats(
                    bin_index=k,
                    label=bin_label(BinIndex(view.metric, k)),
                    n_drivers=len(values),
                    min_whisker=lo,
                    q1=q1,
                    median=med,
                    q3=q3,
                    max_whisker=hi,
                    outliers=outliers,
                )
            )
        result.append((facet_value, stats))
    return result


def export_view(view: FilteredView, facet: Optional[str] = None) -> str:
    """Delimited-text payload of the view's rows plus the facet column."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SUMMARY_COLUMNS + ["facet"])
    for key, miles, time_s in view.rows:
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
                bin_label(BinIndex(view.metric, key.bin_index)),
                repr(miles),
                repr(time_s),
                "(all)" if facet is None else dimension_value(key, facet),
            ]
        )
    return buf.getvalue()


def observed_dimensions(table: MetricTable) -> dict[str, list[str]]:
    """Distinct observed values per filterable dimension, sorted."""
    values: dict[str, set[str]] = {dim: set() for dim in DIMENSIONS}
    for key in table.rows:
        for dim in DIMENSIONS:
            values[dim].add(dimension_value(key, dim))
    out = {}
    for dim in DIMENSIONS:
        if dim == "speed_limit":
            # numeric sort, Unknown last
            out[dim] = sorted(
                values[dim], key=lambda v: (v == UNKNOWN, int(v) if v != UNKNOWN else 0)
            )
        else:
            out[dim] = sorted(values[dim])
    return out
