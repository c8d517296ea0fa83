"""Half-open bin assignment, bin labels, and the derived speeding value.

Edge arithmetic is done with exact rationals so that a value sitting exactly
on a bin edge (e.g. 65.0 on the 2.5-wide grid) lands in the upper bin on
every platform, with no floating-point drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from drivemetrics.domain import BinSpec, MetricKind, canonical_bin_spec


@dataclass(frozen=True, order=True)
class BinIndex:
    """Bin k of a metric's grid: [anchor + k*width, anchor + (k+1)*width)."""

    metric: MetricKind
    index: int


# Display precision per metric: mph one decimal, seconds two, meters one.
_LABEL_DECIMALS = {
    MetricKind.SPEED: 1,
    MetricKind.SPEEDING: 1,
    MetricKind.HEADWAY: 2,
    MetricKind.FOLLOWING_DISTANCE: 1,
    MetricKind.LANE_POSITION: 1,
}


def bin_edge(spec: BinSpec, k: int) -> Fraction:
    """Exact lower edge of bin k."""
    return spec.anchor + k * spec.width


def bin_value(value: float, spec: BinSpec) -> Optional[BinIndex]:
    """Map a finite value to its half-open bin, or None when out of range.

    Raises ValueError on non-finite input; out-of-range is not an error.
    """
    if not math.isfinite(value):
        raise ValueError(f"cannot bin non-finite value {value!r}")
    v = Fraction(value)
    if spec.lower is not None and v < spec.lower:
        return None
    if spec.upper is not None and v >= spec.upper:
        return None
    k = (v - spec.anchor) // spec.width
    return BinIndex(spec.metric, int(k))


def speeding_value(speed_mph: float, speed_limit_mph: int) -> float:
    """Speed relative to the posted limit, negative when under it."""
    return speed_mph - speed_limit_mph


def bin_label(index: BinIndex) -> str:
    """Render a bin as "[lo-hi)" at the metric's natural precision."""
    spec = canonical_bin_spec(index.metric)
    decimals = _LABEL_DECIMALS[index.metric]
    lo = float(bin_edge(spec, index.index))
    hi = float(bin_edge(spec, index.index + 1))
    return f"[{lo:.{decimals}f}-{hi:.{decimals}f})"
