"""Nearest-rank percentiles and per-task percentile limits."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from loguru import logger

from colopack.config import settings
from colopack.exceptions import EmptySeriesError, InvalidPercentileError
from colopack.models.common import RESOURCE_FIELDS, ResourceVector
from colopack.models.fleet import Fleet
from colopack.models.telemetry import PercentileDocument, PercentileLimits
from colopack.telemetry.io import check_trace_frame


def check_percentile(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int | np.integer) or not 1 <= p <= 100:
        raise InvalidPercentileError(f"percentile must be an integer in [1, 100], got {p!r}")
    return int(p)


def nearest_rank(n: int, p: int) -> int:
    """1-based nearest rank ``ceil(p / 100 * n)`` in exact integer arithmetic."""
    return max(1, -(-p * n // 100))


def percentile(values: Sequence[float] | np.ndarray, p: int) -> float:
    """
    Nearest-rank percentile.

    Args:
        values: Non-empty series
        p: Percentile in [1, 100]; 100 returns the maximum

    Returns:
        float: The element at rank ``ceil(p / 100 * n)`` of the sorted series

    Raises:
        InvalidPercentileError: p outside [1, 100]
        EmptySeriesError: No values
    """
    p = check_percentile(p)
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise EmptySeriesError("percentile of an empty series")
    return float(ordered[nearest_rank(ordered.size, p) - 1])


def percentile_columns(matrix: np.ndarray, p: int) -> np.ndarray:
    """Nearest-rank percentile of every column independently."""
    ordered = np.sort(matrix, axis=0)
    return ordered[nearest_rank(ordered.shape[0], p) - 1]


def _task_limits(task_id: str, matrix: np.ndarray, p: int) -> PercentileLimits:
    return PercentileLimits(
        task_id=task_id,
        percentile=p,
        limits=ResourceVector.from_sequence(percentile_columns(matrix, p).tolist()),
        sample_count=int(matrix.shape[0]),
    )


def compute_limits(
    trace: pd.DataFrame,
    p: int | None = None,
    window_seconds: int | None = None,
    threads: int | None = None,
) -> tuple[dict[str, PercentileLimits], list[str]]:
    """
    Per-task, per-dimension percentile limits over the trailing window.

    The window ends at the trace's latest timestamp and keeps samples with
    ``timestamp > end - window``, so a fully covered 7-day window holds
    10,080 minute samples.

    Args:
        trace: Minute-aggregated trace frame
        p: Percentile; ``settings.percentile`` when omitted
        window_seconds: Window length; ``settings.window_seconds`` when omitted
        threads: Worker cap; ``settings.threads`` when omitted

    Returns:
        Limits keyed by task id in sorted order, and warnings naming the tasks
        that have no sample inside the window
    """
    p = check_percentile(settings.percentile if p is None else p)
    window = settings.window_seconds if window_seconds is None else window_seconds
    check_trace_frame(trace)
    if trace.empty:
        return {}, []

    task_ids = sorted(trace["task_id"].astype(str).unique())
    end = float(trace["timestamp"].max())
    recent = trace[trace["timestamp"].to_numpy(dtype=float) > end - window]
    series = {
        str(task_id): group.loc[:, list(RESOURCE_FIELDS)].to_numpy(dtype=float)
        for task_id, group in recent.groupby("task_id", sort=True)
    }

    workers = max(1, min(threads or settings.threads, len(series) or 1))
    ordered = sorted(series)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda t: _task_limits(t, series[t], p), ordered))
    limits = {result.task_id: result for result in results}

    warnings = [
        f"task '{task_id}' has no samples in the trailing {window}s window; omitted"
        for task_id in task_ids
        if task_id not in limits
    ]
    for warning in warnings:
        logger.warning(warning)
    logger.info("Percentile limits computed", tasks=len(limits), p=p, omitted=len(warnings))
    return limits, warnings


def limits_document(
    limits: dict[str, PercentileLimits], warnings: list[str], p: int, window_seconds: int
) -> PercentileDocument:
    return PercentileDocument(
        percentile=p,
        window_seconds=window_seconds,
        limits=dict(sorted(limits.items())),
        warnings=list(warnings),
    )


def apply_limits(fleet: Fleet, limits: dict[str, PercentileLimits]) -> Fleet:
    """
    Record percentile limits on the fleet's task profiles.

    Tasks without an entry keep their previous ``p99`` value.
    """
    tasks = [
        task.model_copy(update={"p99": limits[task.id].limits}) if task.id in limits else task
        for task in fleet.tasks
    ]
    return fleet.with_tasks(tasks)


def keep_requested(fleet: Fleet, task_ids: list[str]) -> Fleet:
    """
    Use requested limits as the percentile limits of tasks that have none.

    Tasks that already carry percentile limits are left alone.
    """
    unsampled = set(task_ids)
    tasks = [
        task.model_copy(update={"p99": task.requested})
        if task.id in unsampled and task.p99 is None
        else task
        for task in fleet.tasks
    ]
    return fleet.with_tasks(tasks)
