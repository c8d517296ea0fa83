"""Binned driving-metric summarization pipeline and analytics query engine."""

from drivemetrics.domain import MetricKind, canonical_bin_spec

__all__ = ["MetricKind", "canonical_bin_spec"]
