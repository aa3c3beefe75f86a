"""Pytest configuration and fixtures for testing.

This module configures the test environment and provides reusable fixtures for
all tests in the colopack project. It handles:
- Test environment variables setup (before colopack is imported)
- Logging configuration for every test
- Builders for architectures, tasks and fleets
- Small synthetic fleets shared across tests
- The CLI runner

Builders return plain callables so tests can state the instance they need
inline, which keeps hand-computed expectations next to the data.
"""

import os
from collections.abc import Callable

import pytest
from typer.testing import CliRunner

# Set test environment variables before importing colopack
os.environ["COLOPACK_LOG_LEVEL"] = "ERROR"
os.environ["COLOPACK_THREADS"] = "2"

from colopack.cli import configure_logging  # noqa: E402
from colopack.config import settings  # noqa: E402
from colopack.fleet import builtin_architectures  # noqa: E402
from colopack.models import (  # noqa: E402
    ArchSpec,
    Fleet,
    Host,
    ResourceVector,
    SensitivityProfile,
    SensitivityScores,
    SensitivityTable,
    ServerType,
    TaskProfile,
)
from colopack.models.synth import GeneratorSpec  # noqa: E402
from colopack.synth import SyntheticFleet, generate  # noqa: E402

SMALL_ARCH = "Small"

ArchBuilder = Callable[..., ArchSpec]
TaskBuilder = Callable[..., TaskProfile]
FleetBuilder = Callable[..., Fleet]


@pytest.fixture(autouse=True)
def configure_test_logging():
    """Route loguru to the current test's stderr at the configured level.

    The CLI callback re-installs the sink on every invocation, and the runner
    closes its stream afterwards; reinstalling per test keeps later library
    log calls off closed streams.
    """
    configure_logging(settings.log_level)
    yield


@pytest.fixture
def make_arch() -> ArchBuilder:
    """Provide a builder for architecture specs.

    Defaults describe a 4-core, 8 GiB Type I host with cost weight 1.0.

    Example:
        ```python
        def test_something(make_arch):
            big = make_arch("Big", cores=48, memory=32)
        ```
    """

    def build(
        name: str = SMALL_ARCH,
        cores: float = 4.0,
        memory: float = 8.0,
        membw: float = 10.0,
        netbw: float = 10.0,
        score: float = 1.0,
        server_type: ServerType = ServerType.TYPE_I,
        cost_weight: float | None = None,
    ) -> ArchSpec:
        return ArchSpec(
            name=name,
            server_type=server_type,
            capacity=ResourceVector(
                cpu_cores=cores, memory_gb=memory, membw_gbps=membw, netbw_gbps=netbw
            ),
            score=score,
            cost_weight=cost_weight,
        )

    return build


@pytest.fixture
def make_task() -> TaskBuilder:
    """Provide a builder for task profiles.

    ``p99`` is a (cpu, memory) pair; ``sensitivity`` is a (base arch, cpu,
    membw, netbw) tuple.
    """

    def build(
        task_id: str,
        cpu: float,
        memory: float,
        p99: tuple[float, float] | None = None,
        sensitivity: tuple[str, float, float, float] | None = None,
        job_id: str = "job-0",
        cluster: str | None = None,
    ) -> TaskProfile:
        limits = None
        if p99 is not None:
            limits = ResourceVector(cpu_cores=p99[0], memory_gb=p99[1])
        profile = None
        if sensitivity is not None:
            base, cpu_s, membw_s, netbw_s = sensitivity
            profile = SensitivityProfile(base_arch=base, cpu=cpu_s, membw=membw_s, netbw=netbw_s)
        return TaskProfile(
            id=task_id,
            job_id=job_id,
            requested=ResourceVector(cpu_cores=cpu, memory_gb=memory),
            p99=limits,
            cluster=cluster,
            base_sensitivity=profile,
        )

    return build


@pytest.fixture
def make_fleet(make_arch) -> FleetBuilder:
    """Provide a builder for fleets.

    Args (of the returned callable):
        hosts: Host id to architecture name
        tasks: Task profiles
        assignment: Task id to host id
        archs: Architectures; a single ``Small`` architecture when omitted
    """

    def build(
        hosts: dict[str, str],
        tasks: list[TaskProfile] | None = None,
        assignment: dict[str, str] | None = None,
        archs: list[ArchSpec] | None = None,
    ) -> Fleet:
        return Fleet(
            architectures=archs if archs is not None else [make_arch()],
            hosts=[Host(id=host_id, arch=arch) for host_id, arch in hosts.items()],
            tasks=tasks or [],
            assignment=assignment or {},
        )

    return build


@pytest.fixture
def two_host_fleet(make_fleet, make_task) -> Fleet:
    """Two identical 4-core, 8 GiB hosts, one (2, 4) task on each.

    Both tasks fit on one host, so a host-minimizing packer frees one host.
    """
    return make_fleet(
        {"h1": SMALL_ARCH, "h2": SMALL_ARCH},
        [make_task("t1", 2, 4), make_task("t2", 2, 4)],
        {"t1": "h1", "t2": "h2"},
    )


@pytest.fixture
def sensitivity_table() -> Callable[[dict[str, tuple[float, float, float]]], SensitivityTable]:
    """Provide a builder for single-architecture sensitivity tables.

    Maps task id to (cpu, membw, netbw) scores on the ``Small`` architecture.
    """

    def build(
        scores: dict[str, tuple[float, float, float]], arch: str = SMALL_ARCH
    ) -> SensitivityTable:
        return SensitivityTable(
            entries={
                task_id: {arch: SensitivityScores(cpu=cpu, membw=membw, netbw=netbw)}
                for task_id, (cpu, membw, netbw) in scores.items()
            }
        )

    return build


@pytest.fixture(scope="session")
def builtin_archs() -> dict[str, ArchSpec]:
    """The six reference architectures keyed by name."""
    return {arch.name: arch for arch in builtin_architectures()}


@pytest.fixture(scope="session")
def small_spec() -> GeneratorSpec:
    """A one-day generator spec: 30 tasks over ten hosts of each architecture."""
    return GeneratorSpec.short(
        seed=7,
        n_tasks=30,
        hosts_per_arch={name: 10 for name in (a.name for a in builtin_architectures())},
    )


@pytest.fixture(scope="session")
def small_synthetic(small_spec) -> SyntheticFleet:
    """The generated fleet of ``small_spec``; its trace is produced on demand."""
    return generate(small_spec)


@pytest.fixture
def runner() -> CliRunner:
    """Provide a Typer CLI runner."""
    return CliRunner()
