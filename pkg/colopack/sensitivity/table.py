"""The (task, architecture) sensitivity lookup table and host loads."""

from pathlib import Path

from loguru import logger

from colopack.exceptions import DanglingReferenceError, MissingProfileError
from colopack.models.fleet import ArchSpec, Assignment, Fleet, TaskProfile
from colopack.models.sensitivity import SensitivityScores, SensitivityTable
from colopack.sensitivity.normalize import normalize
from colopack.utils.documents import read_model, write_json


def build_table(tasks: list[TaskProfile], archs: list[ArchSpec]) -> SensitivityTable:
    """
    Normalize every task's base profile onto every architecture.

    Args:
        tasks: Tasks with a base sensitivity profile attached
        archs: Architectures of the fleet

    Returns:
        SensitivityTable: One entry per (task, arch) pair

    Raises:
        MissingProfileError: A task has no profile
        DanglingReferenceError: A profile's base architecture is unknown
    """
    by_name = {arch.name: arch for arch in archs}
    entries: dict[str, dict[str, SensitivityScores]] = {}
    for task in sorted(tasks, key=lambda t: t.id):
        profile = task.base_sensitivity
        if profile is None:
            raise MissingProfileError(f"task '{task.id}' has no sensitivity profile", task=task.id)
        base = by_name.get(profile.base_arch)
        if base is None:
            raise DanglingReferenceError("profile->arch", task.id, profile.base_arch)
        entries[task.id] = {
            name: normalize(profile, by_name[name], base) for name in sorted(by_name)
        }
    logger.debug("Sensitivity table built", tasks=len(entries), archs=len(by_name))
    return SensitivityTable(entries=entries)


def host_sensitivity_load(
    fleet: Fleet, assignment: Assignment, host_id: str, table: SensitivityTable
) -> SensitivityScores:
    """
    Per-dimension sum of the scores of the tasks on a host.

    Raises:
        MissingSensitivityError: A task on the host is absent from the table
    """
    arch = fleet.host(host_id).arch
    load = SensitivityScores()
    for task in fleet.tasks_on(host_id, assignment):
        load = load + table.get(task.id, arch)
    return load


def sensitivity_loads(
    fleet: Fleet, assignment: Assignment, table: SensitivityTable
) -> dict[str, SensitivityScores]:
    """Sensitivity load of every occupied host, keyed by host id."""
    members: dict[str, list[str]] = {}
    for task_id in sorted(assignment):
        members.setdefault(assignment[task_id], []).append(task_id)
    loads = {}
    for host_id in sorted(members):
        arch = fleet.host(host_id).arch
        cpu = membw = netbw = 0.0
        for task_id in members[host_id]:
            scores = table.get(task_id, arch)
            cpu += scores.cpu
            membw += scores.membw
            netbw += scores.netbw
        loads[host_id] = SensitivityScores(cpu=cpu, membw=membw, netbw=netbw)
    return loads


def save_table(table: SensitivityTable, path: Path) -> Path:
    return write_json(path, table)


def load_table(path: Path) -> SensitivityTable:
    return read_model(path, SensitivityTable)
