"""Consolidated metrics report and its flat, plot-ready row form."""

from pathlib import Path

import pandas as pd
from loguru import logger

from colopack.metrics.measures import (
    colocation_factor,
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
from colopack.models.fleet import Assignment, Fleet
from colopack.models.metrics import MetricsReport
from colopack.models.sensitivity import SensitivityTable
from colopack.models.solver import SolverConfig
from colopack.utils.documents import write_json

ROW_COLUMNS = ("metric", "arch", "value")
ALL = "all"


def report(
    fleet: Fleet,
    before: Assignment,
    after: Assignment,
    config: SolverConfig,
    table: SensitivityTable | None = None,
) -> MetricsReport:
    """
    Compare two placements of one fleet.

    Args:
        fleet: Fleet both placements refer to
        before: Baseline placement
        after: Placement to evaluate
        config: Run configuration; its limit mode decides fragmentation
        table: Sensitivity table; interference is omitted without one

    Returns:
        MetricsReport: Every reported quantity; a fleet without tasks
        occupies no host before or after and reports a TCO delta of 0
    """
    mode = config.limit_mode
    tco = tco_delta(fleet, before, after) if before else 0.0
    result = MetricsReport(
        limit_mode=mode,
        hosts_occupied_before=occupied_per_arch(fleet, before),
        hosts_occupied=occupied_per_arch(fleet, after),
        hosts_freed=freed_per_arch(fleet, before, after),
        hosts_newly_occupied=newly_occupied_per_arch(fleet, before, after),
        tasks_moved=tasks_moved(fleet, before, after),
        fragmentation_before=fragmentation_all(fleet, before, mode),
        fragmentation=fragmentation_all(fleet, after, mode),
        tco=tco,
        tco_by_type=tco_by_type(fleet, after),
        wsl=wsl(fleet, before, after),
        colocation_factor=colocation_factor(fleet, after),
        interference_before=None if table is None else interference(fleet, before, table),
        interference=None if table is None else interference(fleet, after, table),
    )
    logger.info(
        "Report computed",
        mode=mode.value,
        hosts_before=result.total_hosts_before,
        hosts_after=result.total_hosts_after,
        tco=round(result.tco, 4),
    )
    return result


def report_rows(result: MetricsReport) -> pd.DataFrame:
    """
    Flatten a report into ``metric,arch,value`` rows.

    Per-architecture metrics get one row per architecture; fleet-wide ones use
    ``arch=all``. Rows keep a fixed metric order.
    """
    rows: list[tuple[str, str, float]] = []

    def per_arch(metric: str, values: dict[str, int] | dict[str, float]) -> None:
        rows.extend((metric, arch, float(value)) for arch, value in sorted(values.items()))
        rows.append((metric, ALL, float(sum(values.values()))))

    per_arch("hosts_occupied_before", result.hosts_occupied_before)
    per_arch("hosts_occupied", result.hosts_occupied)
    per_arch("hosts_freed", result.hosts_freed)
    per_arch("hosts_newly_occupied", result.hosts_newly_occupied)
    per_arch("tasks_moved", result.tasks_moved)
    for resource, frag in result.fragmentation_before.items():
        rows.append((f"fragmentation_before_abs.{resource}", ALL, frag.absolute))
        rows.append((f"fragmentation_before_pct.{resource}", ALL, frag.pct))
    for resource, frag in result.fragmentation.items():
        rows.append((f"fragmentation_abs.{resource}", ALL, frag.absolute))
        rows.append((f"fragmentation_pct.{resource}", ALL, frag.pct))
    rows.append(("tco_delta_pct", ALL, result.tco))
    rows.extend((f"tco_cost.{kind}", ALL, value) for kind, value in result.tco_by_type.items())
    rows.append(("wsl", ALL, result.wsl))
    rows.extend(
        ("colocation_factor", arch, value) for arch, value in result.colocation_factor.items()
    )
    for label, block in (
        ("interference_before", result.interference_before),
        ("interference", result.interference),
    ):
        if block is None:
            continue
        rows.append((f"{label}.excess", ALL, block.excess))
        rows.append((f"{label}.tasks_at_risk", ALL, float(block.tasks_at_risk)))
        rows.append((f"{label}.hosts_over", ALL, float(block.hosts_over)))
        rows.extend(
            (f"{label}.excess.{dim}", ALL, value) for dim, value in block.per_dimension.items()
        )
    return pd.DataFrame.from_records(rows, columns=list(ROW_COLUMNS))


def save_report(result: MetricsReport, json_path: Path, csv_path: Path | None = None) -> Path:
    """Write the report document and, optionally, its flat rows as CSV."""
    write_json(json_path, result)
    if csv_path is not None:
        target = Path(csv_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        report_rows(result).to_csv(target, index=False, float_format="%.9g")
    return Path(json_path)
