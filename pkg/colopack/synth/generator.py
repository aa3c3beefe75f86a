"""
Synthetic fleets and usage traces.

Each task is sized against a random "home" architecture: its requested
limits are a random fraction of that architecture's capacity. Its target p99
usage is a per-dimension fraction of the request, drawn from the workload
profile the task belongs to. The per-minute usage is a daily sinusoid with
bounded multiplicative noise, scaled so its peak equals the target.
"""

from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from colopack.exceptions import GeneratorError
from colopack.fleet.architectures import builtin_architectures
from colopack.fleet.loader import save_fleet
from colopack.models.common import RESOURCE_FIELDS, ResourceVector
from colopack.models.fleet import ArchSpec, Assignment, Fleet, Host, TaskProfile
from colopack.models.synth import GeneratorSpec
from colopack.models.telemetry import TRACE_COLUMNS
from colopack.solver.limits import CAPACITY_TOLERANCE
from colopack.telemetry.io import save_trace_chunks

DAY_SECONDS = 86_400
MINUTE_SECONDS = 60
TARGET_CLIP = (0.02, 1.0)
# Memory swings less over the day than cpu and network
MEMORY_AMPLITUDE_SCALE = 0.25
TASKS_PER_CHUNK = 200


def host_id_for(arch: str, index: int) -> str:
    return f"{arch.lower()}-{index:04d}"


def task_id_for(index: int) -> str:
    return f"task-{index:05d}"


@dataclass(frozen=True)
class SyntheticFleet:
    """
    A generated fleet plus what is needed to produce its trace.

    Attributes:
        spec: Generator parameters
        fleet: Fleet with requested limits and a first-fit placement
        targets: Target p99 usage per task
        profiles: Workload profile name per task
        phases: Diurnal phase per task, radians
    """

    spec: GeneratorSpec
    fleet: Fleet
    targets: dict[str, ResourceVector]
    profiles: dict[str, str]
    phases: dict[str, float] = field(default_factory=dict)

    def minute_signal(self, task_id: str) -> np.ndarray:
        """
        Per-minute usage of one task, shape (minutes, 4) in resource-field order.

        Deterministic given the spec seed and the task id.
        """
        spec = self.spec
        minutes = spec.days * DAY_SECONDS // MINUTE_SECONDS
        seconds = np.arange(minutes, dtype=float) * MINUTE_SECONDS
        rng = np.random.default_rng([spec.seed, _task_number(task_id), 1])

        target = np.array(self.targets[task_id].as_tuple())
        amplitude = spec.diurnal_amplitude * np.array([1.0, MEMORY_AMPLITUDE_SCALE, 1.0, 1.0])
        base = target / ((1.0 + amplitude) * (1.0 + spec.noise))
        wave = np.sin(2.0 * np.pi * seconds / DAY_SECONDS + self.phases[task_id])
        noise = 1.0 + spec.noise * rng.uniform(-1.0, 1.0, size=(minutes, 4))
        return base * (1.0 + np.outer(wave, amplitude)) * noise

    def trace_chunks(self, task_ids: list[str] | None = None) -> Iterator[pd.DataFrame]:
        """Per-minute trace frames, tasks in id order, a few hundred tasks per frame."""
        ids = sorted(self.targets) if task_ids is None else sorted(task_ids)
        timestamps = self.spec.start + MINUTE_SECONDS * np.arange(
            self.spec.days * DAY_SECONDS // MINUTE_SECONDS, dtype=np.int64
        )
        for offset in range(0, len(ids), TASKS_PER_CHUNK):
            chunk = ids[offset : offset + TASKS_PER_CHUNK]
            yield _frame(chunk, timestamps, [self.minute_signal(t) for t in chunk])

    def trace(self, task_ids: list[str] | None = None) -> pd.DataFrame:
        """The whole per-minute trace as one frame."""
        chunks = list(self.trace_chunks(task_ids))
        if not chunks:
            return pd.DataFrame({c: pd.Series(dtype=float) for c in TRACE_COLUMNS}).astype(
                {"task_id": str}
            )
        return pd.concat(chunks, ignore_index=True)

    def second_trace(self, task_ids: list[str] | None = None) -> pd.DataFrame:
        """
        Per-second trace of selected tasks.

        Every second repeats its minute's usage with a relative jitter bounded
        by ``spec.second_jitter``, so minute means of this trace stay close to
        the per-minute signal.
        """
        spec = self.spec
        ids = sorted(self.targets) if task_ids is None else sorted(task_ids)
        n_seconds = spec.days * DAY_SECONDS
        timestamps = spec.start + np.arange(n_seconds, dtype=np.int64)
        signals = []
        for task_id in ids:
            rng = np.random.default_rng([spec.seed, _task_number(task_id), 2])
            per_minute = np.repeat(self.minute_signal(task_id), MINUTE_SECONDS, axis=0)
            jitter = 1.0 + spec.second_jitter * rng.uniform(-1.0, 1.0, size=per_minute.shape)
            signals.append(per_minute * jitter)
        return _frame(ids, timestamps, signals)


def _task_number(task_id: str) -> int:
    return int(task_id.rsplit("-", 1)[-1])


def _frame(task_ids: list[str], timestamps: np.ndarray, signals: list[np.ndarray]) -> pd.DataFrame:
    if not task_ids:
        return pd.DataFrame(columns=list(TRACE_COLUMNS))
    values = np.vstack(signals)
    frame = pd.DataFrame(values, columns=list(RESOURCE_FIELDS))
    frame.insert(0, "timestamp", np.tile(timestamps, len(task_ids)))
    frame.insert(0, "task_id", np.repeat(task_ids, len(timestamps)))
    return frame


def _architectures(spec: GeneratorSpec) -> list[ArchSpec]:
    known = {arch.name: arch for arch in builtin_architectures()}
    unknown = sorted(set(spec.hosts_per_arch) - set(known))
    if unknown:
        raise GeneratorError(f"unknown architectures in generator spec: {', '.join(unknown)}")
    return [known[name] for name in sorted(spec.hosts_per_arch)]


def _profile_weights(spec: GeneratorSpec) -> np.ndarray:
    """Profile weights with the last (heaviest) profile pinned to the tail fraction."""
    weights = np.array([p.weight for p in spec.profiles], dtype=float)
    if len(weights) == 1:
        return np.ones(1)
    head = weights[:-1] / weights[:-1].sum() * (1.0 - spec.tail_fraction)
    return np.append(head, spec.tail_fraction)


def first_fit(
    hosts: list[Host], archs: dict[str, ArchSpec], tasks: list[TaskProfile]
) -> Assignment:
    """
    Place tasks in id order on the first host, in id order, with room for their request.

    Raises:
        GeneratorError: A task's request fits on no host
    """
    capacity = np.array(
        [archs[h.arch].capacity.as_tuple()[:2] for h in hosts], dtype=float
    ).reshape(len(hosts), 2)
    load = np.zeros_like(capacity)
    assignment: Assignment = {}
    for task in tasks:
        need = np.array(task.requested.as_tuple()[:2])
        room = (load + need <= capacity + CAPACITY_TOLERANCE).all(axis=1)
        if not room.any():
            raise GeneratorError(
                f"fleet capacity is insufficient: task '{task.id}' fits on no host",
                task_id=task.id,
            )
        slot = int(np.argmax(room))
        load[slot] += need
        assignment[task.id] = hosts[slot].id
    return assignment


def generate(spec: GeneratorSpec | None = None) -> SyntheticFleet:
    """
    Generate a fleet, its first-fit placement and its usage targets.

    Args:
        spec: Generator parameters; defaults when omitted

    Returns:
        SyntheticFleet: Fleet and per-task targets; the trace is produced on demand

    Raises:
        GeneratorError: Unknown architecture, or the requests do not fit the fleet
    """
    spec = spec or GeneratorSpec()
    rng = np.random.default_rng(spec.seed)
    archs = _architectures(spec)
    by_name = {arch.name: arch for arch in archs}
    hosts = sorted(
        (
            Host(id=host_id_for(arch.name, i), arch=arch.name)
            for arch in archs
            for i in range(spec.hosts_per_arch[arch.name])
        ),
        key=lambda h: h.id,
    )
    sizing = [arch for arch in archs if spec.hosts_per_arch[arch.name] > 0]

    n = spec.n_tasks
    home = rng.integers(len(sizing), size=n)
    home_capacity = np.array([sizing[i].capacity.as_tuple() for i in home]).reshape(n, 4)
    low, high = spec.request_fraction
    requested = np.round(home_capacity * rng.uniform(low, high, size=(n, 4)), 3)

    chosen = rng.choice(len(spec.profiles), size=n, p=_profile_weights(spec))
    fractions = np.empty((n, 4))
    for index, profile in enumerate(spec.profiles):
        members = np.flatnonzero(chosen == index)
        for column, (mean, std) in ((0, profile.cpu), (1, profile.mem), (3, profile.netbw)):
            fractions[members, column] = rng.normal(mean, std, size=members.size)
    fractions[:, 2] = fractions[:, 0]
    fractions = np.clip(fractions, *TARGET_CLIP)
    targets = requested * fractions
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n)

    tasks = [
        TaskProfile(
            id=task_id_for(i),
            job_id=f"job-{i // spec.tasks_per_job:04d}",
            requested=ResourceVector.from_sequence(requested[i].tolist()),
        )
        for i in range(n)
    ]
    assignment = first_fit(hosts, by_name, tasks)
    fleet = Fleet(architectures=archs, hosts=hosts, tasks=tasks, assignment=assignment)
    logger.info(
        "Synthetic fleet generated",
        seed=spec.seed,
        tasks=n,
        hosts=len(hosts),
        occupied=len(set(assignment.values())),
    )
    return SyntheticFleet(
        spec=spec,
        fleet=fleet,
        targets={
            t.id: ResourceVector.from_sequence(targets[i].tolist()) for i, t in enumerate(tasks)
        },
        profiles={t.id: spec.profiles[chosen[i]].name for i, t in enumerate(tasks)},
        phases={t.id: float(phases[i]) for i, t in enumerate(tasks)},
    )


def write_synthetic(synthetic: SyntheticFleet, out_dir: Path) -> tuple[Path, Path]:
    """
    Write ``fleet.json`` and ``trace.csv`` into a directory.

    Returns:
        The fleet and trace paths
    """
    directory = Path(out_dir)
    fleet_path = save_fleet(synthetic.fleet, directory / "fleet.json")
    trace_path = save_trace_chunks(synthetic.trace_chunks(), directory / "trace.csv")
    logger.debug("Synthetic files written", fleet=str(fleet_path), trace=str(trace_path))
    return fleet_path, trace_path
