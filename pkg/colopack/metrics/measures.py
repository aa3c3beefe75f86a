"""
Placement metrics: fragmentation, weighted-score loss, TCO, colocation and interference.

Sums use ``math.fsum`` so every metric is independent of the order hosts and
tasks are enumerated in.
"""

import math
from collections import Counter, defaultdict

from colopack.exceptions import ZeroBaselineCostError
from colopack.models.common import HARD_RESOURCES, SENSITIVITY_DIMENSIONS, LimitMode, Resource
from colopack.models.fleet import Assignment, Fleet
from colopack.models.metrics import Fragmentation, Interference
from colopack.models.sensitivity import SensitivityTable
from colopack.solver.limits import effective_limits


def _members(assignment: Assignment) -> dict[str, list[str]]:
    """Host id to the sorted ids of its tasks, for occupied hosts only."""
    members: dict[str, list[str]] = defaultdict(list)
    for task_id in sorted(assignment):
        members[assignment[task_id]].append(task_id)
    return dict(members)


def _occupied_by_arch(fleet: Fleet, hosts: set[str]) -> Counter[str]:
    return Counter(fleet.host(h).arch for h in hosts)


def fragmentation(
    fleet: Fleet,
    assignment: Assignment,
    mode: LimitMode,
    resource: Resource,
) -> Fragmentation:
    """
    Stranded capacity of a hard resource over occupied hosts.

    Args:
        fleet: Fleet the assignment places tasks on
        assignment: Placement to measure
        mode: Limit mode deciding each task's effective limits
        resource: ``cpu_cores`` or ``memory_gb``

    Returns:
        Fragmentation: Absolute stranded capacity, its percentage of occupied
        capacity, and the occupied capacity; all zero when no host is occupied

    Example:
        >>> fragmentation(fleet, {"t1": "h1", "t2": "h1"}, LimitMode.ORIGINAL, Resource.CPU)
        Fragmentation(absolute=18.0, pct=37.5, occupied_capacity=48.0)
    """
    stranded: list[float] = []
    capacities: list[float] = []
    for host_id, task_ids in _members(assignment).items():
        capacity = fleet.arch_of(host_id).capacity.get(resource)
        used = math.fsum(effective_limits(fleet.task(t), mode).get(resource) for t in task_ids)
        stranded.append(capacity - used)
        capacities.append(capacity)
    absolute = math.fsum(stranded)
    occupied = math.fsum(capacities)
    pct = 100.0 * absolute / occupied if occupied > 0 else 0.0
    return Fragmentation(absolute=absolute, pct=pct, occupied_capacity=occupied)


def fragmentation_all(
    fleet: Fleet, assignment: Assignment, mode: LimitMode
) -> dict[str, Fragmentation]:
    return {r.value: fragmentation(fleet, assignment, mode, r) for r in HARD_RESOURCES}


def occupied_per_arch(fleet: Fleet, assignment: Assignment) -> dict[str, int]:
    """Occupied hosts per architecture, every architecture listed."""
    counts = _occupied_by_arch(fleet, set(assignment.values()))
    return {name: counts.get(name, 0) for name in fleet.arch_names()}


def freed_per_arch(fleet: Fleet, before: Assignment, after: Assignment) -> dict[str, int]:
    """Hosts per architecture occupied in ``before`` and free in ``after``."""
    counts = _occupied_by_arch(fleet, set(before.values()) - set(after.values()))
    return {name: counts.get(name, 0) for name in fleet.arch_names()}


def newly_occupied_per_arch(
    fleet: Fleet, before: Assignment, after: Assignment
) -> dict[str, int]:
    counts = _occupied_by_arch(fleet, set(after.values()) - set(before.values()))
    return {name: counts.get(name, 0) for name in fleet.arch_names()}


def tasks_moved(fleet: Fleet, before: Assignment, after: Assignment) -> dict[str, int]:
    """Tasks whose host id changed, keyed by the architecture of the host they left."""
    counts = Counter(
        fleet.host(before[t]).arch for t in before if t in after and after[t] != before[t]
    )
    return {name: counts.get(name, 0) for name in fleet.arch_names()}


def wsl(fleet: Fleet, before: Assignment, after: Assignment) -> float:
    """
    Weighted-score loss of moving from ``before`` to ``after``.

    Sum over architectures of score times hosts occupied after, minus score
    times hosts freed.

    Example:
        >>> wsl(fleet, before, after)  # 2 Broadwell18 occupied, 1 Skylake16 freed
        -0.52
    """
    occupied = occupied_per_arch(fleet, after)
    freed = freed_per_arch(fleet, before, after)
    return math.fsum(
        fleet.arch(name).score * (occupied[name] - freed[name]) for name in fleet.arch_names()
    )


def cost(fleet: Fleet, assignment: Assignment) -> float:
    """Summed cost weight of the occupied hosts."""
    return math.fsum(fleet.arch_of(h).cost_weight for h in set(assignment.values()))


def tco_delta(fleet: Fleet, before: Assignment, after: Assignment) -> float:
    """
    Percent reduction in cost-weighted occupied hosts; negative when ``after`` costs more.

    Raises:
        ZeroBaselineCostError: No host is occupied in ``before``
    """
    baseline = cost(fleet, before)
    if baseline <= 0:
        raise ZeroBaselineCostError("baseline placement occupies no hosts")
    return 100.0 * (baseline - cost(fleet, after)) / baseline


def tco_by_type(fleet: Fleet, assignment: Assignment) -> dict[str, float]:
    """Cost of occupied hosts per umbrella server type."""
    costs: dict[str, list[float]] = {a.server_type.value: [] for a in fleet.architectures}
    for host_id in set(assignment.values()):
        arch = fleet.arch_of(host_id)
        costs[arch.server_type.value].append(arch.cost_weight)
    return {kind: math.fsum(values) for kind, values in sorted(costs.items())}


def colocation_factor(fleet: Fleet, assignment: Assignment) -> dict[str, float]:
    """
    Tasks per occupied host, per architecture.

    Architectures without occupied hosts are omitted.
    """
    tasks = Counter(fleet.host(h).arch for h in assignment.values())
    hosts = _occupied_by_arch(fleet, set(assignment.values()))
    return {name: tasks[name] / hosts[name] for name in sorted(hosts)}


def interference(
    fleet: Fleet, assignment: Assignment, table: SensitivityTable
) -> Interference:
    """
    Sensitivity excess over 1.0 and the tasks exposed to it.

    For each occupied host and dimension the scores of its tasks are summed;
    the excess over 1.0 adds to the total and to that dimension's breakdown.
    A task is at risk when its host exceeds 1.0 in any dimension.

    Raises:
        MissingSensitivityError: The table lacks a (task, arch) pair
    """
    per_dimension: dict[str, list[float]] = {d.value: [] for d in SENSITIVITY_DIMENSIONS}
    at_risk = 0
    hosts_over = 0
    for host_id, task_ids in _members(assignment).items():
        arch = fleet.host(host_id).arch
        scores = [table.get(t, arch) for t in task_ids]
        over = False
        for dimension in SENSITIVITY_DIMENSIONS:
            load = math.fsum(s.get(dimension) for s in scores)
            if load > 1.0:
                per_dimension[dimension.value].append(load - 1.0)
                over = True
        if over:
            hosts_over += 1
            at_risk += len(task_ids)
    breakdown = {name: math.fsum(values) for name, values in per_dimension.items()}
    return Interference(
        excess=math.fsum(v for values in per_dimension.values() for v in values),
        tasks_at_risk=at_risk,
        per_dimension=breakdown,
        hosts_over=hosts_over,
    )
