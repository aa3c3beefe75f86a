"""Reported quantities of a packer run."""

from colopack.metrics.measures import (
    colocation_factor,
    cost,
    fragmentation,
    fragmentation_all,
    freed_per_arch,
    interference,
    newly_occupied_per_arch,
    occupied_per_arch,
    tasks_moved,
    tco_by_type,
    tco_delta,
    wsl,
)
from colopack.metrics.report import ROW_COLUMNS, report, report_rows, save_report

__all__ = [
    "ROW_COLUMNS",
    "colocation_factor",
    "cost",
    "fragmentation",
    "fragmentation_all",
    "freed_per_arch",
    "interference",
    "newly_occupied_per_arch",
    "occupied_per_arch",
    "report",
    "report_rows",
    "save_report",
    "tasks_moved",
    "tco_by_type",
    "tco_delta",
    "wsl",
]
