"""Effective task limits per limit mode and the host capacity predicate."""

from collections.abc import Sequence

from colopack.exceptions import MissingPercentileError
from colopack.models.common import LimitMode, ResourceVector
from colopack.models.fleet import Assignment, Fleet, TaskProfile

# Absolute slack on capacity comparisons; absorbs rounding of incremental sums
CAPACITY_TOLERANCE = 1e-9


def effective_limits(task: TaskProfile, mode: LimitMode) -> ResourceVector:
    """
    The limits a task is packed with under a limit mode.

    Only cpu and memory are hard constraints; membw/netbw are carried from the
    request unchanged.

    Raises:
        MissingPercentileError: A percentile-based mode and no percentile limits
    """
    if not mode.needs_p99:
        return task.requested
    if task.p99 is None:
        raise MissingPercentileError(task.id, mode.value)
    requested, p99 = task.requested, task.p99
    return ResourceVector(
        cpu_cores=p99.cpu_cores if mode.uses_p99_cpu else requested.cpu_cores,
        memory_gb=p99.memory_gb if mode.uses_p99_mem else requested.memory_gb,
        membw_gbps=requested.membw_gbps,
        netbw_gbps=requested.netbw_gbps,
    )


def feasible(
    fleet: Fleet,
    assignment: Assignment,
    host_id: str,
    incoming: Sequence[TaskProfile] = (),
    mode: LimitMode = LimitMode.ORIGINAL,
) -> bool:
    """
    Whether a host holds its tasks plus ``incoming`` within cpu and memory capacity.

    The comparison is inclusive: a host filled exactly to capacity is feasible.
    """
    residents = {t.id: t for t in fleet.tasks_on(host_id, assignment)}
    for task in incoming:
        residents.setdefault(task.id, task)
    capacity = fleet.arch_of(host_id).capacity
    cpu = sum(effective_limits(t, mode).cpu_cores for t in residents.values())
    memory = sum(effective_limits(t, mode).memory_gb for t in residents.values())
    return (
        cpu <= capacity.cpu_cores + CAPACITY_TOLERANCE
        and memory <= capacity.memory_gb + CAPACITY_TOLERANCE
    )
