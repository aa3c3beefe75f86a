"""
Array-backed placement state shared by the packer, the objective and the oracle.

Hosts and tasks are indexed in id order. Per-host loads, sensitivity loads,
task counts and objective terms are kept incrementally so a candidate move is
scored by recomputing only the hosts it touches.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from colopack.exceptions import SolverConfigError
from colopack.models.common import LimitMode
from colopack.models.fleet import Assignment, Fleet
from colopack.models.sensitivity import SensitivityTable
from colopack.models.solver import GoalWeights, SolverConfig
from colopack.solver.limits import CAPACITY_TOLERANCE, effective_limits

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


@dataclass(frozen=True)
class Snapshot:
    """Copy of the mutable arrays of a PackingState."""

    host_of: IntArray
    load: FloatArray
    sens_load: FloatArray | None
    count: IntArray
    terms: FloatArray


class PackingState:
    """
    Incremental view of one assignment under one solver configuration.

    Attributes:
        host_ids: Host ids in index order
        task_ids: Task ids in index order
        capacity: (H, 2) cpu and memory capacity per host
        cost_weight: (H,) cost weight per host
        limits: (T, 2) effective cpu and memory limits per task
        size: (T,) limits normalized by total fleet capacity, summed over cpu and memory
        sens: (T, A, 3) scores per task and architecture, None without a sensitivity term
        host_of: (T,) host index of each task
        load: (H, 2) summed limits per host
        sens_load: (H, 3) summed scores per host, None without a sensitivity term
        count: (H,) tasks per host
        terms: (H,) objective contribution per host
    """

    def __init__(
        self,
        fleet: Fleet,
        assignment: Assignment,
        mode: LimitMode,
        weights: GoalWeights,
        table: SensitivityTable | None = None,
    ):
        self.weights = weights
        self.mode = mode
        self.host_ids = fleet.host_ids()
        self.task_ids = fleet.task_ids()
        self.host_index = {host_id: i for i, host_id in enumerate(self.host_ids)}
        self.task_index = {task_id: i for i, task_id in enumerate(self.task_ids)}

        arch_names = fleet.arch_names()
        arch_index = {name: i for i, name in enumerate(arch_names)}
        archs = [fleet.arch_of(host_id) for host_id in self.host_ids]
        self.host_arch = np.array([arch_index[a.name] for a in archs], dtype=np.int64)
        self.capacity = np.array(
            [(a.capacity.cpu_cores, a.capacity.memory_gb) for a in archs], dtype=float
        ).reshape(len(archs), 2)
        self.cost_weight = np.array([a.cost_weight for a in archs], dtype=float)

        fleet_capacity = self.capacity.sum(axis=0)
        self.fleet_capacity = np.where(fleet_capacity > 0, fleet_capacity, 1.0)

        tasks = [fleet.task(task_id) for task_id in self.task_ids]
        self.limits = np.array(
            [effective_limits(t, mode).as_tuple()[:2] for t in tasks], dtype=float
        ).reshape(len(tasks), 2)
        self.size = (self.limits / self.fleet_capacity).sum(axis=1)

        self.uses_sens = weights.w_sens > 0
        self.sens: FloatArray | None = None
        if self.uses_sens:
            if table is None:
                raise SolverConfigError("a sensitivity table is required when w_sens > 0")
            self.sens = np.array(
                [
                    [table.get(task_id, name).as_tuple() for name in arch_names]
                    for task_id in self.task_ids
                ],
                dtype=float,
            ).reshape(len(tasks), len(arch_names), 3)

        self.host_of = np.array(
            [self.host_index[assignment[task_id]] for task_id in self.task_ids], dtype=np.int64
        )
        self._rebuild()

    def _rebuild(self) -> None:
        n_hosts = len(self.host_ids)
        self.load = np.zeros((n_hosts, 2))
        np.add.at(self.load, self.host_of, self.limits)
        self.count = np.bincount(self.host_of, minlength=n_hosts).astype(np.int64)
        self.sens_load = None
        if self.sens is not None:
            self.sens_load = np.zeros((n_hosts, 3))
            np.add.at(self.sens_load, self.host_of, self.task_sens(np.arange(len(self.task_ids))))
        everything = np.arange(n_hosts)
        self.terms = self.host_terms(everything, self.load, self.sens_load, self.count)

    @classmethod
    def from_config(
        cls,
        fleet: Fleet,
        assignment: Assignment,
        config: SolverConfig,
        table: SensitivityTable | None = None,
    ) -> "PackingState":
        return cls(fleet, assignment, config.limit_mode, config.weights, table)

    # Scoring

    def host_terms(
        self,
        hosts: IntArray,
        load: FloatArray,
        sens_load: FloatArray | None,
        count: IntArray,
    ) -> FloatArray:
        """
        Objective contribution of hosts given hypothetical loads and counts.

        An empty host contributes nothing. An occupied host pays its host and
        cost weights, its normalized stranded cpu and memory, and its
        sensitivity excess over 1.0 in each dimension.
        """
        w = self.weights
        stranded = ((self.capacity[hosts] - load) / self.fleet_capacity).sum(axis=-1)
        term = w.w_hosts + w.w_cost * self.cost_weight[hosts] + w.w_frag * stranded
        if self.uses_sens and sens_load is not None:
            term = term + w.w_sens * np.maximum(sens_load - 1.0, 0.0).sum(axis=-1)
        return np.where(count > 0, term, 0.0)

    def task_sens(self, tasks: IntArray, hosts: IntArray | None = None) -> FloatArray:
        """Scores of tasks on the architecture of ``hosts`` (their own hosts by default)."""
        assert self.sens is not None
        where = self.host_of[tasks] if hosts is None else hosts
        return self.sens[tasks, self.host_arch[where]]

    def objective(self) -> float:
        return float(self.terms.sum())

    def fits(self, hosts: IntArray, load: FloatArray) -> NDArray[np.bool_]:
        return (load <= self.capacity[hosts] + CAPACITY_TOLERANCE).all(axis=-1)

    def overloaded(self) -> IntArray:
        """Hosts whose load exceeds capacity, in id order."""
        everything = np.arange(len(self.host_ids))
        return np.flatnonzero(~self.fits(everything, self.load))

    def source_delta(self, task: int) -> float:
        """Objective change of removing a task from its host."""
        host = int(self.host_of[task])
        hosts = np.array([host])
        sens_load = None
        if self.sens_load is not None:
            sens_load = self.sens_load[hosts] - self.task_sens(np.array([task]))
        load = self.load[hosts] - self.limits[task]
        after = self.host_terms(hosts, load, sens_load, self.count[hosts] - 1)
        return float(after[0] - self.terms[host])

    def source_deltas(self) -> FloatArray:
        """Objective change of removing each task from its host, for all tasks."""
        tasks = np.arange(len(self.task_ids))
        hosts = self.host_of
        sens_load = None
        if self.sens_load is not None:
            sens_load = self.sens_load[hosts] - self.task_sens(tasks)
        load = self.load[hosts] - self.limits
        after = self.host_terms(hosts, load, sens_load, self.count[hosts] - 1)
        return after - self.terms[hosts]

    def relocation_deltas(
        self, task: int, targets: IntArray | None = None
    ) -> tuple[IntArray, FloatArray, NDArray[np.bool_]]:
        """
        Score relocating a task to each target host.

        Returns:
            The targets, the objective change of each relocation, and whether
            each target has room; the task's own host never fits.
        """
        hosts = np.arange(len(self.host_ids)) if targets is None else targets
        new_load = self.load[hosts] + self.limits[task]
        fits = self.fits(hosts, new_load) & (hosts != self.host_of[task])
        sens_load = None
        if self.sens_load is not None:
            assert self.sens is not None
            sens_load = self.sens_load[hosts] + self.sens[task, self.host_arch[hosts]]
        gained = self.host_terms(hosts, new_load, sens_load, self.count[hosts] + 1)
        gained = gained - self.terms[hosts]
        return hosts, self.source_delta(task) + gained, fits

    def relocation_matrix(
        self, tasks: IntArray, targets: IntArray
    ) -> tuple[FloatArray, NDArray[np.bool_]]:
        """
        Score relocating each of ``tasks`` to each of ``targets`` at once.

        Returns:
            (tasks, targets) objective changes and room, as ``relocation_deltas``
        """
        columns = targets[None, :]
        new_load = self.load[targets][None, :, :] + self.limits[tasks][:, None, :]
        fits = self.fits(columns, new_load) & (self.host_of[tasks][:, None] != columns)
        sens_load = None
        if self.sens_load is not None:
            assert self.sens is not None
            sens_load = (
                self.sens_load[targets][None, :, :]
                + self.sens[tasks[:, None], self.host_arch[targets][None, :]]
            )
        count = np.broadcast_to(self.count[targets] + 1, fits.shape)
        gained = self.host_terms(columns, new_load, sens_load, count) - self.terms[targets]
        return self.source_deltas()[tasks][:, None] + gained, fits

    def swap_deltas(
        self, task: int, partners: IntArray
    ) -> tuple[FloatArray, NDArray[np.bool_]]:
        """
        Score exchanging the hosts of ``task`` and each partner task.

        Returns:
            Objective change of each exchange and whether both hosts keep room;
            partners on the task's own host never fit.
        """
        home = int(self.host_of[task])
        away = self.host_of[partners]
        homes = np.full(len(partners), home, dtype=np.int64)
        home_load = self.load[home] - self.limits[task] + self.limits[partners]
        away_load = self.load[away] - self.limits[partners] + self.limits[task]
        fits = self.fits(homes, home_load) & self.fits(away, away_load) & (away != home)
        home_sens = away_sens = None
        if self.sens_load is not None:
            assert self.sens is not None
            home_arch, away_arch = self.host_arch[home], self.host_arch[away]
            home_sens = self.sens_load[home] - self.sens[task, home_arch]
            home_sens = home_sens + self.sens[partners, home_arch]
            away_sens = self.sens_load[away] - self.sens[partners, away_arch]
            away_sens = away_sens + self.sens[task, away_arch]
        delta = (
            self.host_terms(homes, home_load, home_sens, self.count[homes])
            - self.terms[home]
            + self.host_terms(away, away_load, away_sens, self.count[away])
            - self.terms[away]
        )
        return delta, fits

    # Mutation

    def _refresh(self, hosts: list[int]) -> None:
        index = np.array(hosts, dtype=np.int64)
        empty = index[self.count[index] == 0]
        self.load[empty] = 0.0
        if self.sens_load is not None:
            self.sens_load[empty] = 0.0
        self.terms[index] = self.host_terms(
            index, self.load[index], None if self.sens_load is None else self.sens_load[index],
            self.count[index],
        )

    def relocate(self, task: int, target: int) -> int:
        """
        Move a task to a target host.

        Returns:
            The host the task left
        """
        source = int(self.host_of[task])
        self.load[source] -= self.limits[task]
        self.load[target] += self.limits[task]
        if self.sens_load is not None:
            assert self.sens is not None
            self.sens_load[source] -= self.sens[task, self.host_arch[source]]
            self.sens_load[target] += self.sens[task, self.host_arch[target]]
        self.count[source] -= 1
        self.count[target] += 1
        self.host_of[task] = target
        self._refresh([source, target])
        return source

    def swap(self, task_a: int, task_b: int) -> None:
        host_a, host_b = int(self.host_of[task_a]), int(self.host_of[task_b])
        self.relocate(task_a, host_b)
        self.relocate(task_b, host_a)

    def snapshot(self) -> Snapshot:
        return Snapshot(
            host_of=self.host_of.copy(),
            load=self.load.copy(),
            sens_load=None if self.sens_load is None else self.sens_load.copy(),
            count=self.count.copy(),
            terms=self.terms.copy(),
        )

    def restore(self, snapshot: Snapshot) -> None:
        self.host_of = snapshot.host_of.copy()
        self.load = snapshot.load.copy()
        self.sens_load = None if snapshot.sens_load is None else snapshot.sens_load.copy()
        self.count = snapshot.count.copy()
        self.terms = snapshot.terms.copy()

    # Views

    def tasks_on(self, host: int) -> IntArray:
        """Task indexes on a host, in id order."""
        return np.flatnonzero(self.host_of == host)

    def assignment(self) -> Assignment:
        return {
            task_id: self.host_ids[int(host)]
            for task_id, host in zip(self.task_ids, self.host_of, strict=True)
        }

    def target_rank(self) -> IntArray:
        """
        Position of every host in the canonical target order.

        Occupied hosts come first by descending cost weight, then free hosts;
        ties go by host id.
        """
        n_hosts = len(self.host_ids)
        free = (self.count == 0).astype(np.int64)
        order = np.lexsort((np.arange(n_hosts), -self.cost_weight, free))
        rank = np.empty(n_hosts, dtype=np.int64)
        rank[order] = np.arange(n_hosts)
        return rank
