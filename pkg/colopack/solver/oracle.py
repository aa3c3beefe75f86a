"""Exhaustive optimum for tiny instances, used to check the packer."""

from itertools import product

import numpy as np

from colopack.config import settings
from colopack.exceptions import InfeasibleTaskError, InstanceTooLargeError
from colopack.models.fleet import Assignment, Fleet
from colopack.models.sensitivity import SensitivityTable
from colopack.models.solver import SolverConfig
from colopack.solver.state import PackingState


def brute_force_optimal(
    fleet: Fleet,
    config: SolverConfig,
    table: SensitivityTable | None = None,
) -> Assignment:
    """
    Enumerate every placement and return the feasible one of least objective.

    Placements are enumerated as host-index vectors (hosts and tasks in id
    order) in lexicographic order; the first minimum wins ties.

    Raises:
        InstanceTooLargeError: More tasks or hosts than the oracle guard allows
        InfeasibleTaskError: No feasible placement exists
    """
    host_ids, task_ids = fleet.host_ids(), fleet.task_ids()
    if (
        len(task_ids) > settings.brute_force_max_tasks
        or len(host_ids) > settings.brute_force_max_hosts
    ):
        raise InstanceTooLargeError(
            f"{len(task_ids)} tasks on {len(host_ids)} hosts exceeds the oracle guard "
            f"({settings.brute_force_max_tasks} tasks, {settings.brute_force_max_hosts} hosts)"
        )
    if not task_ids:
        return {}

    state = PackingState.from_config(fleet, fleet.assignment, config, table)
    everything = np.arange(len(host_ids))
    tasks = np.arange(len(task_ids))
    best: tuple[int, ...] | None = None
    best_value = np.inf
    for vector in product(range(len(host_ids)), repeat=len(task_ids)):
        hosts = np.array(vector, dtype=np.int64)
        load = np.zeros((len(host_ids), 2))
        np.add.at(load, hosts, state.limits)
        if not state.fits(everything, load).all():
            continue
        sens_load = None
        if state.sens is not None:
            sens_load = np.zeros((len(host_ids), 3))
            np.add.at(sens_load, hosts, state.sens[tasks, state.host_arch[hosts]])
        count = np.bincount(hosts, minlength=len(host_ids))
        value = float(state.host_terms(everything, load, sens_load, count).sum())
        if value < best_value - 1e-12:
            best, best_value = vector, value
    if best is None:
        raise InfeasibleTaskError("no feasible placement exists")
    return {task_id: host_ids[h] for task_id, h in zip(task_ids, best, strict=True)}
