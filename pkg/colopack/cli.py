"""
Command-line interface for colopack.

Subcommands mirror the pipeline stages:

    gen         synthetic fleet.json and trace.csv
    percentile  per-task percentile limits (limits.json, fleet.json)
    cluster     workload clusters and sensitivity profiles (clusters.json, fleet.json)
    sens-table  normalized sensitivity table (table.json)
    solve       packer run (solve.json, moves.json, fleet.json)
    report      metrics of a packer run (report.json, report.csv)
    pipeline    every stage in sequence, optionally over repeated trace segments
    compare     every limit mode on one fleet, as a table

Every subcommand writes ``status.json`` next to its outputs. Failures print a
single ``error=<code> message=<text>`` line to stderr and exit non-zero.
"""

import sys
from collections.abc import Callable
from pathlib import Path
from typing import Annotated

import typer
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from colopack import pipeline
from colopack.config import settings
from colopack.exceptions import ColopackError, FleetParseError
from colopack.fleet import load_fleet
from colopack.metrics import report as metrics_report
from colopack.models.common import LimitMode
from colopack.models.metrics import MetricsReport
from colopack.models.sensitivity import CandidateProfile, SensitivityTable
from colopack.models.solver import SolveResult, SolverConfig
from colopack.models.synth import GeneratorSpec
from colopack.sensitivity import load_profiles, load_table, save_table
from colopack.solver import first_fit_decreasing, replay_result
from colopack.synth import generate, write_synthetic
from colopack.telemetry import apply_limits, load_limits, load_trace
from colopack.utils.documents import read_model, write_json
from colopack.utils.error_formatter import (
    describe_validation_error,
    format_error_document,
    format_error_line,
    format_ok_document,
)

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)

app = typer.Typer(
    name="colopack",
    help="Need- and interference-aware workload colocation.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()

COMPARE_COLUMNS = (
    "mode",
    "hosts",
    "freed",
    "cpu frag %",
    "mem frag %",
    "tco %",
    "wsl",
    "interference",
    "at risk",
)

# Shared options
FleetOption = Annotated[Path, typer.Option("--fleet", help="Fleet JSON file")]
TraceOption = Annotated[Path, typer.Option("--trace", help="Trace CSV file")]
OutOption = Annotated[Path, typer.Option("--out", help="Output directory")]
SeedOption = Annotated[int | None, typer.Option("--seed", help="Seed for every randomized stage")]
ModeOption = Annotated[LimitMode, typer.Option("--mode", help="Limit mode")]
PercentileOption = Annotated[int | None, typer.Option("--p", help="Percentile (default 99)")]
KOption = Annotated[int | None, typer.Option("--k", help="Clusters per group (default 3)")]
MaxMovesOption = Annotated[
    int | None, typer.Option("--max-moves", help="Move budget (default 400)")
]
WeightsOption = Annotated[
    str | None, typer.Option("--weights", help="w_hosts,w_cost,w_frag,w_sens")
]
ConfigOption = Annotated[
    Path | None, typer.Option("--config", help="Run configuration JSON")
]
ProfilesOption = Annotated[
    Path | None, typer.Option("--profiles", help="Candidate sensitivity profiles JSON")
]
JointOption = Annotated[
    bool, typer.Option("--joint", help="Cluster all tasks together instead of per umbrella type")
]


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=level.upper(), colorize=True)


@app.callback()
def main(
    log_level: Annotated[
        str | None, typer.Option("--log-level", help="Log level (default from settings)")
    ] = None,
) -> None:
    """Configure logging for every subcommand."""
    configure_logging(log_level or settings.log_level)


def run_command(command: str, out: Path | None, body: Callable[[], None]) -> None:
    """
    Run a subcommand body and translate failures into the error line and exit status.

    The status document is written to ``out`` when an output directory is known.
    """
    try:
        try:
            body()
        except ValidationError as e:
            raise FleetParseError(describe_validation_error(e)) from e
    except ColopackError as exc:
        logger.debug("Command failed", command=command, code=exc.code, **exc.context)
        typer.echo(format_error_line(exc), err=True)
        if out is not None:
            write_json(out / pipeline.STATUS_FILE, format_error_document(command, exc))
        raise typer.Exit(code=exc.exit_status) from None
    if out is not None:
        write_json(out / pipeline.STATUS_FILE, format_ok_document(command))
    logger.success("Command finished", command=command)


def _candidates(path: Path | None) -> list[CandidateProfile] | None:
    return load_profiles(path) if path is not None else None


def _config(
    mode: LimitMode,
    config_path: Path | None,
    weights: str | None,
    max_moves: int | None,
    seed: int | None,
) -> SolverConfig:
    base = read_model(config_path, SolverConfig) if config_path is not None else None
    return pipeline.solver_config(mode, base, weights=weights, max_moves=max_moves, seed=seed)


def _hosts_table(title: str, metrics: MetricsReport) -> Table:
    table = Table(title=title)
    table.add_column("arch")
    table.add_column("occupied before", justify="right")
    table.add_column("occupied after", justify="right")
    table.add_column("freed", justify="right")
    table.add_column("tasks moved", justify="right")
    table.add_column("colocation", justify="right")
    for arch in sorted(metrics.hosts_occupied):
        factor = metrics.colocation_factor.get(arch)
        table.add_row(
            arch,
            str(metrics.hosts_occupied_before.get(arch, 0)),
            str(metrics.hosts_occupied[arch]),
            str(metrics.hosts_freed.get(arch, 0)),
            str(metrics.tasks_moved.get(arch, 0)),
            "-" if factor is None else f"{factor:.2f}",
        )
    table.add_row(
        "total",
        str(metrics.total_hosts_before),
        str(metrics.total_hosts_after),
        str(metrics.total_hosts_freed),
        str(metrics.total_tasks_moved),
        "",
    )
    return table


@app.command()
def gen(
    out: OutOption,
    seed: SeedOption = None,
    tasks: Annotated[int | None, typer.Option("--tasks", help="Number of tasks")] = None,
    short: Annotated[bool, typer.Option("--short", help="One-day trace")] = False,
) -> None:
    """Generate a synthetic fleet and its usage trace."""

    def body() -> None:
        overrides: dict[str, object] = {"seed": settings.seed if seed is None else seed}
        if tasks is not None:
            overrides["n_tasks"] = tasks
        if short:
            overrides["days"] = 1
        spec = GeneratorSpec.model_validate(overrides)
        fleet_path, trace_path = write_synthetic(generate(spec), out)
        console.print(f"fleet: {fleet_path}\ntrace: {trace_path}")

    run_command("gen", out, body)


@app.command()
def percentile(
    fleet: FleetOption,
    trace: TraceOption,
    out: OutOption,
    p: PercentileOption = None,
    window_days: Annotated[
        int | None, typer.Option("--window-days", help="Trailing window in days")
    ] = None,
) -> None:
    """Compute per-task percentile limits and record them on the fleet."""

    def body() -> None:
        window = None if window_days is None else window_days * 86400
        updated, document = pipeline.percentile_stage(
            load_fleet(fleet), load_trace(trace), p=p, window_seconds=window
        )
        pipeline.write_percentile(out, updated, document)
        console.print(f"{len(document.limits)} tasks, p{document.percentile}")
        for warning in document.warnings:
            console.print(f"[yellow]warning[/yellow] {warning}")

    run_command("percentile", out, body)


@app.command()
def cluster(
    fleet: FleetOption,
    out: OutOption,
    limits: Annotated[
        Path | None, typer.Option("--limits", help="Percentile limits to apply first")
    ] = None,
    k: KOption = None,
    seed: SeedOption = None,
    profiles: ProfilesOption = None,
    joint: JointOption = False,
) -> None:
    """Cluster tasks on percentile usage and attach sensitivity profiles."""

    def body() -> None:
        current = load_fleet(fleet)
        if limits is not None:
            current = apply_limits(current, load_limits(limits).limits)
        clustered, summary = pipeline.cluster_stage(
            current, k=k, seed=seed, by_type=not joint, candidates=_candidates(profiles)
        )
        pipeline.write_cluster(out, clustered, summary)
        table = Table(title="clusters")
        for column in ("group", "cluster", "size", "cpu", "memory", "netbw"):
            table.add_column(column)
        for group, summaries in summary.groups.items():
            for s in summaries:
                table.add_row(group, s.name, str(s.size), *(f"{v:.2f}" for v in s.centroid))
        console.print(table)

    run_command("cluster", out, body)


@app.command("sens-table")
def sens_table(fleet: FleetOption, out: OutOption) -> None:
    """Normalize every task's sensitivity profile onto every architecture."""

    def body() -> None:
        table = pipeline.table_stage(load_fleet(fleet))
        save_table(table, out / pipeline.TABLE_FILE)
        console.print(f"{len(table)} (task, arch) entries")

    run_command("sens-table", out, body)


@app.command("solve")
def solve_command(
    fleet: FleetOption,
    out: OutOption,
    table: Annotated[Path | None, typer.Option("--table", help="Sensitivity table JSON")] = None,
    mode: ModeOption = LimitMode.P99,
    weights: WeightsOption = None,
    max_moves: MaxMovesOption = None,
    seed: SeedOption = None,
    config: ConfigOption = None,
    cold_start: Annotated[
        bool, typer.Option("--cold-start", help="Start from first fit decreasing")
    ] = False,
) -> None:
    """Improve the fleet's placement with the packer."""

    def body() -> None:
        current = load_fleet(fleet)
        if cold_start:
            current = current.with_assignment(first_fit_decreasing(current, mode))
        run_config = _config(mode, config, weights, max_moves, seed)
        sens = load_table(table) if table is not None else None
        result, metrics = pipeline.solve_stage(current, run_config, sens)
        pipeline.write_solve(out, current, result)
        console.print(_hosts_table(f"solve ({mode.value})", metrics))
        console.print(
            f"moves {len(result.moves_applied)}, objective "
            f"{result.initial_objective:.4f} -> {result.final_objective:.4f}"
        )

    run_command("solve", out, body)


@app.command("report")
def report_command(
    fleet: FleetOption,
    solve: Annotated[Path, typer.Option("--solve", help="Solve result JSON")],
    out: OutOption,
    table: Annotated[Path | None, typer.Option("--table", help="Sensitivity table JSON")] = None,
) -> None:
    """Compute the metrics of a packer run after replaying its move log."""

    def body() -> None:
        current = load_fleet(fleet)
        result = read_model(solve, SolveResult)
        if replay_result(current, result) != result.final:
            raise FleetParseError(f"{solve}: move log does not lead to the final placement")
        sens: SensitivityTable | None = load_table(table) if table is not None else None
        metrics = metrics_report(
            current,
            result.initial,
            result.final,
            SolverConfig(limit_mode=result.limit_mode),
            sens,
        )
        pipeline.write_report(out, metrics)
        console.print(_hosts_table(f"report ({result.limit_mode.value})", metrics))

    run_command("report", out, body)


@app.command("pipeline")
def pipeline_command(
    fleet: FleetOption,
    trace: TraceOption,
    out: OutOption,
    mode: ModeOption = LimitMode.P99,
    weights: WeightsOption = None,
    max_moves: MaxMovesOption = None,
    p: PercentileOption = None,
    k: KOption = None,
    seed: SeedOption = None,
    profiles: ProfilesOption = None,
    config: ConfigOption = None,
    joint: JointOption = False,
    repeat: Annotated[
        int, typer.Option("--repeat", help="Re-run over this many consecutive trace segments")
    ] = 1,
) -> None:
    """Run percentile, cluster, sens-table, solve and report in sequence."""

    def body() -> None:
        runs = pipeline.run_pipeline(
            load_fleet(fleet),
            load_trace(trace),
            _config(mode, config, weights, max_moves, seed),
            repeat=repeat,
            p=p,
            k=k,
            seed=seed,
            by_type=not joint,
            candidates=_candidates(profiles),
            out=out,
        )
        for iteration, run in enumerate(runs):
            console.print(_hosts_table(f"iteration {iteration} ({mode.value})", run.report))

    run_command("pipeline", out, body)


@app.command("compare")
def compare_command(
    fleet: FleetOption,
    trace: TraceOption,
    out: Annotated[Path | None, typer.Option("--out", help="Output directory")] = None,
    max_moves: MaxMovesOption = None,
    p: PercentileOption = None,
    k: KOption = None,
    seed: SeedOption = None,
    profiles: ProfilesOption = None,
    joint: JointOption = False,
) -> None:
    """Solve the fleet under every limit mode and print the trade-off table."""

    def body() -> None:
        reports = pipeline.compare(
            load_fleet(fleet),
            load_trace(trace),
            max_moves=max_moves,
            seed=seed,
            p=p,
            k=k,
            by_type=not joint,
            candidates=_candidates(profiles),
        )
        table = Table(title="limit modes")
        for column in COMPARE_COLUMNS:
            table.add_column(column, justify="right")
        for mode, metrics in reports.items():
            interference = metrics.interference
            table.add_row(
                mode.value,
                str(metrics.total_hosts_after),
                str(metrics.total_hosts_freed),
                f"{metrics.fragmentation['cpu_cores'].pct:.1f}",
                f"{metrics.fragmentation['memory_gb'].pct:.1f}",
                f"{metrics.tco:.1f}",
                f"{metrics.wsl:.2f}",
                "-" if interference is None else f"{interference.excess:.2f}",
                "-" if interference is None else str(interference.tasks_at_risk),
            )
        console.print(table)
        if out is not None:
            write_json(
                out / "compare.json",
                {mode.value: metrics.model_dump(mode="json") for mode, metrics in reports.items()},
            )

    run_command("compare", out, body)


if __name__ == "__main__":
    app()
