"""
Stage orchestration shared by the CLI subcommands.

Each ``*_stage`` function takes and returns in-memory objects; ``write_*``
functions persist a stage's outputs under the file names the subcommands
use, so a ``pipeline`` run writes exactly what the stage-by-stage commands
would.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from colopack.clustering import apply_clusters, cluster_fleet, cluster_report
from colopack.config import settings
from colopack.exceptions import EmptySeriesError, SolverConfigError
from colopack.fleet import save_fleet
from colopack.metrics import report, save_report
from colopack.models.clustering import ClusterReport
from colopack.models.common import LimitMode
from colopack.models.fleet import Fleet
from colopack.models.metrics import MetricsReport
from colopack.models.sensitivity import CandidateProfile, SensitivityTable
from colopack.models.solver import SolveResult, SolverConfig
from colopack.models.telemetry import PercentileDocument
from colopack.sensitivity import build_table, builtin_profiles, cluster_profiles, save_table
from colopack.solver import solve
from colopack.telemetry import (
    aggregate_frame,
    apply_limits,
    compute_limits,
    keep_requested,
    limits_document,
)
from colopack.telemetry.io import save_limits
from colopack.utils.documents import write_json

# Output file names, one per stage
FLEET_FILE = "fleet.json"
TRACE_FILE = "trace.csv"
LIMITS_FILE = "limits.json"
CLUSTERS_FILE = "clusters.json"
TABLE_FILE = "table.json"
SOLVE_FILE = "solve.json"
MOVES_FILE = "moves.json"
REPORT_FILE = "report.json"
REPORT_ROWS_FILE = "report.csv"
STATUS_FILE = "status.json"

WEIGHT_NAMES = ("w_hosts", "w_cost", "w_frag", "w_sens")
CLUSTER_REPORT_K_MAX = 8


def parse_weights(text: str) -> dict[str, float]:
    """
    Parse ``w_hosts,w_cost,w_frag,w_sens``.

    Raises:
        SolverConfigError: Not four non-negative numbers
    """
    parts = [p.strip() for p in text.split(",")]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise SolverConfigError(f"weights must be four numbers, got '{text}'") from None
    if len(values) != len(WEIGHT_NAMES) or any(v < 0 or not np.isfinite(v) for v in values):
        raise SolverConfigError(
            f"weights must be four non-negative numbers "
            f"w_hosts,w_cost,w_frag,w_sens, got '{text}'"
        )
    return dict(zip(WEIGHT_NAMES, values, strict=True))


def solver_config(
    mode: LimitMode,
    base: SolverConfig | None = None,
    weights: str | None = None,
    max_moves: int | None = None,
    seed: int | None = None,
) -> SolverConfig:
    """
    Build a run configuration: the mode's preset, then a config file, then flags.

    A config file written for another mode keeps its non-weight fields but takes
    the new mode's weight preset; flags always win.
    """
    values = base.model_dump() if base is not None else {}
    values["limit_mode"] = mode
    overrides: dict[str, object] = {}
    if base is None or base.limit_mode != mode:
        overrides.update(settings.weights_for(mode).model_dump())
    if weights is not None:
        overrides.update(parse_weights(weights))
    if max_moves is not None:
        overrides["max_moves"] = max_moves
    if seed is not None:
        overrides["seed"] = seed
    if base is None:
        return SolverConfig.preset(mode, **overrides)
    return SolverConfig.model_validate({**values, **overrides})


# Stages


def percentile_stage(
    fleet: Fleet,
    trace: pd.DataFrame,
    p: int | None = None,
    window_seconds: int | None = None,
) -> tuple[Fleet, PercentileDocument]:
    """
    Aggregate a trace to minutes and record percentile limits on the fleet.

    Tasks of the trace that are not in the fleet are ignored. A task without
    samples keeps the limits it had, or its requested limits when it never had
    any, and is named in the warnings.
    """
    p = settings.percentile if p is None else p
    window = settings.window_seconds if window_seconds is None else window_seconds
    minutes = aggregate_frame(trace)
    known = set(fleet.task_ids())
    limits, warnings = compute_limits(minutes, p=p, window_seconds=window)
    limits = {task_id: value for task_id, value in limits.items() if task_id in known}
    unsampled = sorted(known - set(minutes["task_id"].astype(str)))
    for task_id in unsampled:
        kept = "previous" if fleet.task(task_id).p99 is not None else "requested"
        warnings.append(f"task '{task_id}' has no samples in the trace; keeps its {kept} limits")
    updated = keep_requested(apply_limits(fleet, limits), unsampled)
    return updated, limits_document(limits, warnings, p, window)


def cluster_stage(
    fleet: Fleet,
    k: int | None = None,
    seed: int | None = None,
    by_type: bool = True,
    candidates: list[CandidateProfile] | None = None,
) -> tuple[Fleet, ClusterReport]:
    """Cluster tasks and attach each cluster's merged sensitivity profile."""
    clustering = cluster_fleet(fleet, k=k, seed=seed, by_type=by_type)
    profiles = cluster_profiles(candidates if candidates is not None else builtin_profiles())
    clustered = apply_clusters(fleet, clustering, profiles)
    return clustered, cluster_report(clustered, clustering, k_max=CLUSTER_REPORT_K_MAX)


def table_stage(fleet: Fleet) -> SensitivityTable:
    return build_table(fleet.tasks, fleet.architectures)


def solve_stage(
    fleet: Fleet, config: SolverConfig, table: SensitivityTable | None
) -> tuple[SolveResult, MetricsReport]:
    result = solve(fleet, config, table)
    return result, report(fleet, result.initial, result.final, config, table)


# Writers


def write_percentile(out: Path, fleet: Fleet, document: PercentileDocument) -> None:
    save_limits(document, out / LIMITS_FILE)
    save_fleet(fleet, out / FLEET_FILE)


def write_cluster(out: Path, fleet: Fleet, summary: ClusterReport) -> None:
    write_json(out / CLUSTERS_FILE, summary)
    save_fleet(fleet, out / FLEET_FILE)


def write_solve(out: Path, fleet: Fleet, result: SolveResult) -> None:
    """Write the result, its replayable move log and the fleet at its final placement."""
    write_json(out / SOLVE_FILE, result)
    moves = [m.model_dump(mode="json") for m in (*result.repair_moves, *result.moves_applied)]
    write_json(out / MOVES_FILE, moves)
    save_fleet(fleet.with_assignment(result.final), out / FLEET_FILE)


def write_report(out: Path, metrics: MetricsReport) -> None:
    save_report(metrics, out / REPORT_FILE, out / REPORT_ROWS_FILE)


# Whole runs


@dataclass
class PipelineRun:
    """Outputs of one percentile, cluster, table, solve and report pass."""

    fleet: Fleet
    limits: PercentileDocument
    clusters: ClusterReport
    table: SensitivityTable
    result: SolveResult
    report: MetricsReport
    warnings: list[str] = field(default_factory=list)


def run_once(
    fleet: Fleet,
    trace: pd.DataFrame,
    config: SolverConfig,
    p: int | None = None,
    k: int | None = None,
    seed: int | None = None,
    by_type: bool = True,
    candidates: list[CandidateProfile] | None = None,
    out: Path | None = None,
) -> PipelineRun:
    """
    Chain every stage once; write each stage's outputs when ``out`` is given.

    Returns:
        PipelineRun: The fleet (at its final placement) and every stage output
    """
    with_limits, limits = percentile_stage(fleet, trace, p=p)
    if out is not None:
        write_percentile(out, with_limits, limits)
    clustered, clusters = cluster_stage(
        with_limits, k=k, seed=seed, by_type=by_type, candidates=candidates
    )
    if out is not None:
        write_cluster(out, clustered, clusters)
    table = table_stage(clustered)
    if out is not None:
        save_table(table, out / TABLE_FILE)
    result, metrics = solve_stage(clustered, config, table)
    if out is not None:
        write_solve(out, clustered, result)
        write_report(out, metrics)
    return PipelineRun(
        fleet=clustered.with_assignment(result.final),
        limits=limits,
        clusters=clusters,
        table=table,
        result=result,
        report=metrics,
        warnings=list(limits.warnings),
    )


def split_trace(trace: pd.DataFrame, segments: int) -> list[pd.DataFrame]:
    """
    Split a trace into consecutive, equally long time segments.

    Raises:
        EmptySeriesError: The trace is empty or a segment would hold no samples
    """
    if segments < 1:
        raise SolverConfigError(f"repeat must be at least 1, got {segments}")
    if trace.empty:
        raise EmptySeriesError("cannot split an empty trace")
    timestamps = trace["timestamp"].to_numpy(dtype=float)
    edges = np.linspace(timestamps.min(), timestamps.max(), segments + 1)
    index = np.clip(np.searchsorted(edges, timestamps, side="right") - 1, 0, segments - 1)
    parts = [trace[index == i].reset_index(drop=True) for i in range(segments)]
    for i, part in enumerate(parts):
        if part.empty:
            raise EmptySeriesError(f"trace segment {i} of {segments} holds no samples")
    return parts


def iteration_dir(out: Path, iteration: int, repeat: int) -> Path:
    return out if repeat == 1 else out / f"iter-{iteration:02d}"


def run_pipeline(
    fleet: Fleet,
    trace: pd.DataFrame,
    config: SolverConfig,
    repeat: int = 1,
    p: int | None = None,
    k: int | None = None,
    seed: int | None = None,
    by_type: bool = True,
    candidates: list[CandidateProfile] | None = None,
    out: Path | None = None,
) -> list[PipelineRun]:
    """
    Run every stage over ``repeat`` consecutive trace segments.

    Each iteration starts from the previous iteration's final placement, which
    models periodic re-packing. With ``repeat=1`` the whole trace is used and
    outputs go directly into ``out``; otherwise into ``out/iter-NN``.
    """
    segments = [trace] if repeat == 1 else split_trace(trace, repeat)
    runs: list[PipelineRun] = []
    current = fleet
    for iteration, segment in enumerate(segments):
        target = None if out is None else iteration_dir(out, iteration, repeat)
        run = run_once(
            current,
            segment,
            config,
            p=p,
            k=k,
            seed=seed,
            by_type=by_type,
            candidates=candidates,
            out=target,
        )
        logger.success(
            "Pipeline iteration finished",
            iteration=iteration,
            hosts_before=run.report.total_hosts_before,
            hosts_after=run.report.total_hosts_after,
        )
        runs.append(run)
        current = run.fleet
    return runs


COMPARE_MODES: tuple[LimitMode, ...] = tuple(LimitMode)


def compare(
    fleet: Fleet,
    trace: pd.DataFrame,
    modes: tuple[LimitMode, ...] = COMPARE_MODES,
    max_moves: int | None = None,
    seed: int | None = None,
    p: int | None = None,
    k: int | None = None,
    by_type: bool = True,
    candidates: list[CandidateProfile] | None = None,
) -> dict[LimitMode, MetricsReport]:
    """
    Solve one fleet under several limit modes from the same starting placement.

    Percentiles, clusters and the sensitivity table are computed once; every
    report includes interference.
    """
    with_limits, _ = percentile_stage(fleet, trace, p=p)
    clustered, _ = cluster_stage(
        with_limits, k=k, seed=seed, by_type=by_type, candidates=candidates
    )
    table = table_stage(clustered)
    reports: dict[LimitMode, MetricsReport] = {}
    for mode in modes:
        config = solver_config(mode, max_moves=max_moves, seed=seed)
        _, reports[mode] = solve_stage(clustered, config, table)
    return reports
