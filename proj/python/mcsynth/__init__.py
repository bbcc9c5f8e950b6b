"""Multicore cache topology synthesis toolkit."""

from ._core import (
    McsynthError,
    canonical_name,
    classify,
    connection_quota,
    emit,
    fill_power_template,
    generate_edges,
    loc_report,
    parse_csv,
    parse_stats_report,
    to_csv,
    validate_edges,
)

__all__ = [
    "McsynthError",
    "canonical_name",
    "classify",
    "connection_quota",
    "emit",
    "fill_power_template",
    "generate_edges",
    "loc_report",
    "parse_csv",
    "parse_stats_report",
    "to_csv",
    "validate_edges",
]
