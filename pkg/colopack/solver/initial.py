"""Cold-start placement for fleets without a usable assignment."""

import numpy as np
from loguru import logger

from colopack.exceptions import InfeasibleTaskError
from colopack.models.common import LimitMode
from colopack.models.fleet import Assignment, Fleet
from colopack.solver.limits import CAPACITY_TOLERANCE, effective_limits


def first_fit_decreasing(fleet: Fleet, mode: LimitMode = LimitMode.ORIGINAL) -> Assignment:
    """
    Place every task by first-fit decreasing.

    Tasks go largest first (limits normalized by fleet capacity), each into the
    first already-opened host with room; when none has room the next host is
    opened, cheapest cost weight first.

    Args:
        fleet: Fleet whose tasks and hosts to use; its assignment is ignored
        mode: Limit mode deciding the packed limits

    Returns:
        Assignment: Task id to host id

    Raises:
        InfeasibleTaskError: A task fits on no remaining host
    """
    host_ids = fleet.host_ids()
    archs = [fleet.arch_of(h) for h in host_ids]
    capacity = np.array(
        [(a.capacity.cpu_cores, a.capacity.memory_gb) for a in archs], dtype=float
    ).reshape(len(archs), 2)
    total = capacity.sum(axis=0)
    total = np.where(total > 0, total, 1.0)
    closed = sorted(range(len(host_ids)), key=lambda i: (archs[i].cost_weight, host_ids[i]))

    tasks = fleet.tasks
    limits = {t.id: np.array(effective_limits(t, mode).as_tuple()[:2]) for t in tasks}
    order = sorted(tasks, key=lambda t: (-float((limits[t.id] / total).sum()), t.id))

    opened: list[int] = []
    load = np.zeros_like(capacity)
    assignment: Assignment = {}
    for task in order:
        need = limits[task.id]
        slot = next(
            (h for h in opened if (load[h] + need <= capacity[h] + CAPACITY_TOLERANCE).all()),
            None,
        )
        if slot is None:
            slot = next(
                (h for h in closed if (need <= capacity[h] + CAPACITY_TOLERANCE).all()), None
            )
            if slot is None:
                raise InfeasibleTaskError(
                    f"task '{task.id}' fits on no free host", task_id=task.id
                )
            closed.remove(slot)
            opened.append(slot)
        load[slot] += need
        assignment[task.id] = host_ids[slot]
    logger.debug("First-fit placement built", tasks=len(assignment), hosts=len(opened))
    return dict(sorted(assignment.items()))
