"""Fleet models: architectures, hosts, task profiles and the assignment."""

from collections import Counter
from typing import Annotated, Any

from pydantic import BaseModel, Field, PrivateAttr, model_validator

from colopack.config import settings
from colopack.exceptions import (
    DanglingReferenceError,
    DuplicateIdError,
    FleetParseError,
    InvalidCapacityError,
)
from colopack.models.common import FrozenModel, ResourceVector, ServerType
from colopack.models.sensitivity import SensitivityProfile

# task_id -> host_id; total over the fleet's tasks
Assignment = dict[str, str]

Identifier = Annotated[str, Field(min_length=1)]


class ArchSpec(FrozenModel):
    """
    A server architecture.

    Attributes:
        name: Architecture name (e.g. "Skylake16")
        server_type: Umbrella type the architecture belongs to
        capacity: Per-host resource capacity
        score: Relative per-core performance (Broadwell18 is 1.0)
        cost_weight: Relative TCO unit of one host; defaults per umbrella type
    """

    name: Identifier
    server_type: ServerType
    capacity: ResourceVector
    score: Annotated[float, Field(gt=0, allow_inf_nan=False)]
    cost_weight: Annotated[float, Field(gt=0, allow_inf_nan=False)]

    @model_validator(mode="before")
    @classmethod
    def default_cost_weight(cls, data: Any) -> Any:
        """Fill cost_weight from the umbrella-type default when absent."""
        if isinstance(data, dict) and data.get("cost_weight") is None:
            data = dict(data)
            data["cost_weight"] = settings.cost_weight_for(ServerType(data.get("server_type")))
        return data

    @property
    def membw_per_core(self) -> float:
        return self.capacity.membw_gbps / self.capacity.cpu_cores

    @property
    def netbw_per_core(self) -> float:
        return self.capacity.netbw_gbps / self.capacity.cpu_cores


class Host(FrozenModel):
    """A single machine of one architecture."""

    id: Identifier
    arch: Identifier


class TaskProfile(FrozenModel):
    """
    A long-running task with its declared and observed resource needs.

    Attributes:
        id: Task id
        job_id: Job the task belongs to
        requested: Declared resource limits
        p99: Percentile usage limits, once computed
        cluster: Workload cluster label, once clustered
        base_sensitivity: Sensitivity measured on a base architecture, once attached
    """

    id: Identifier
    job_id: Identifier
    requested: ResourceVector
    p99: ResourceVector | None = None
    cluster: str | None = None
    base_sensitivity: SensitivityProfile | None = None


class Fleet(BaseModel):
    """
    The whole inventory plus the current task placement.

    Validation rejects duplicate ids, dangling references, non-positive
    architecture capacities and tasks without a host.
    """

    architectures: list[ArchSpec]
    hosts: list[Host]
    tasks: list[TaskProfile]
    assignment: Assignment = Field(default_factory=dict)

    _archs: dict[str, ArchSpec] = PrivateAttr(default_factory=dict)
    _hosts: dict[str, Host] = PrivateAttr(default_factory=dict)
    _tasks: dict[str, TaskProfile] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: Any) -> None:
        self.check_integrity()

    def check_integrity(self) -> None:
        for collection, ids in (
            ("architectures", [a.name for a in self.architectures]),
            ("hosts", [h.id for h in self.hosts]),
            ("tasks", [t.id for t in self.tasks]),
        ):
            duplicates = sorted(i for i, n in Counter(ids).items() if n > 1)
            if duplicates:
                raise DuplicateIdError(collection, duplicates[0])

        for arch in self.architectures:
            if not arch.capacity.is_strictly_positive():
                raise InvalidCapacityError(
                    f"architecture '{arch.name}' has a non-positive capacity component",
                    arch=arch.name,
                )

        self._archs = {a.name: a for a in self.architectures}
        self._hosts = {h.id: h for h in self.hosts}
        self._tasks = {t.id: t for t in self.tasks}

        for host in self.hosts:
            if host.arch not in self._archs:
                raise DanglingReferenceError("host->arch", host.id, host.arch)
        for task in self.tasks:
            base = task.base_sensitivity
            if base is not None and base.base_arch not in self._archs:
                raise DanglingReferenceError("task->arch", task.id, base.base_arch)
        for task_id in sorted(self.assignment):
            if task_id not in self._tasks:
                raise DanglingReferenceError("assignment->task", task_id, task_id)
            if self.assignment[task_id] not in self._hosts:
                raise DanglingReferenceError("task->host", task_id, self.assignment[task_id])
        unplaced = sorted(set(self._tasks) - set(self.assignment))
        if unplaced:
            raise FleetParseError(f"task '{unplaced[0]}' is not assigned to a host")

    def arch(self, name: str) -> ArchSpec:
        try:
            return self._archs[name]
        except KeyError:
            raise DanglingReferenceError("lookup->arch", "fleet", name) from None

    def host(self, host_id: str) -> Host:
        try:
            return self._hosts[host_id]
        except KeyError:
            raise DanglingReferenceError("lookup->host", "fleet", host_id) from None

    def task(self, task_id: str) -> TaskProfile:
        try:
            return self._tasks[task_id]
        except KeyError:
            raise DanglingReferenceError("lookup->task", "fleet", task_id) from None

    def arch_of(self, host_id: str) -> ArchSpec:
        return self.arch(self.host(host_id).arch)

    def host_ids(self) -> list[str]:
        return sorted(self._hosts)

    def task_ids(self) -> list[str]:
        return sorted(self._tasks)

    def arch_names(self) -> list[str]:
        return sorted(self._archs)

    def tasks_on(self, host_id: str, assignment: Assignment | None = None) -> list[TaskProfile]:
        """Tasks placed on a host, sorted by id."""
        placement = self.assignment if assignment is None else assignment
        return [self._tasks[t] for t in sorted(placement) if placement[t] == host_id]

    def occupied_hosts(self, assignment: Assignment | None = None) -> set[str]:
        placement = self.assignment if assignment is None else assignment
        return set(placement.values())

    def with_assignment(self, assignment: Assignment) -> "Fleet":
        """Copy of the fleet with a different placement, re-validated."""
        return Fleet(
            architectures=self.architectures,
            hosts=self.hosts,
            tasks=self.tasks,
            assignment=dict(assignment),
        )

    def with_tasks(self, tasks: list[TaskProfile]) -> "Fleet":
        """Copy of the fleet with updated task profiles, re-validated."""
        return Fleet(
            architectures=self.architectures,
            hosts=self.hosts,
            tasks=tasks,
            assignment=dict(self.assignment),
        )
