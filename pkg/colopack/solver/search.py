"""
Greedy local search over task moves.

The packer starts from the fleet's current placement and applies improving
moves until none is left or the move budget is spent. Each step tries, in
order:

    relocate  move one task to the first improving host
    evacuate  empty one host by relocating each of its tasks to its best host
    repack    pack a host and a few partners into the partners, by enumeration
              for small groups and first fit decreasing otherwise
    swap      exchange two tasks to relieve a sensitivity hot spot

Candidates are enumerated in a fixed order so a run is deterministic.

Failed work is remembered between steps. A task is rescored for relocation
only when its host changed or one of its moves into a changed host became
improving; the swap scan rescores only partners on changed hosts. A repack
group is retried only after one of its hosts changed, and a host whose
evacuation failed only after it changed or a later step left room behind on
an occupied host (or opened a new one).
"""

from collections import Counter
from itertools import product

import numpy as np
from loguru import logger

from colopack.exceptions import InfeasibleTaskError, SolverConfigError
from colopack.models.common import LimitMode
from colopack.models.fleet import Assignment, Fleet
from colopack.models.sensitivity import SensitivityTable
from colopack.models.solver import (
    Move,
    RelocateMove,
    SolveResult,
    SolverConfig,
    SolveStats,
    SwapMove,
)
from colopack.solver.limits import CAPACITY_TOLERANCE
from colopack.solver.state import IntArray, PackingState

PHASES = ("relocate", "evacuate", "repack", "swap")
# Cap on placements a repack group may enumerate
EXACT_PLACEMENTS = 4096


class LocalSearch:
    """
    One packer run over a fleet.

    Args:
        fleet: Fleet whose assignment is the starting placement
        config: Limit mode, goal weights and move budget
        table: Sensitivity table, required when ``w_sens > 0``
    """

    def __init__(
        self,
        fleet: Fleet,
        config: SolverConfig,
        table: SensitivityTable | None = None,
    ):
        self.fleet = fleet
        self.config = config
        self.eps = config.improvement_eps
        self.state = PackingState.from_config(fleet, fleet.assignment, config, table)

        n_hosts, n_tasks = len(self.state.host_ids), len(self.state.task_ids)
        self.clock = 0
        self.touched_at = np.zeros(n_hosts, dtype=np.int64)
        # True while a task may still have an improving relocation
        self.relocate_pending = np.ones(n_tasks, dtype=bool)
        self.swap_clean = np.full(n_tasks, -1, dtype=np.int64)
        self.evacuate_failed = np.full(n_hosts, -1, dtype=np.int64)
        self.room_left_at = 0
        self.repack_failed: dict[tuple[int, ...], int] = {}

        self.repair_moves: list[Move] = []
        self.moves: list[Move] = []
        self.trace: list[float] = []
        self.accepted: Counter[str] = Counter()
        self.evaluations = 0

    @property
    def budget(self) -> int:
        return self.config.max_moves - len(self.moves)

    # Bookkeeping

    def _relocate_move(self, task: int, source: int, target: int) -> RelocateMove:
        s = self.state
        return RelocateMove(
            task_id=s.task_ids[task], from_host=s.host_ids[source], to_host=s.host_ids[target]
        )

    def _commit(self, phase: str, hosts: list[int], moves: list[Move]) -> None:
        self.clock += 1
        touched = np.unique(np.array(hosts, dtype=np.int64))
        self.touched_at[touched] = self.clock
        if self._leaves_room(moves):
            self.room_left_at = self.clock
        self._flag_relocations(touched)
        self.moves.extend(moves)
        self.trace.append(self.state.objective())
        self.accepted[phase] += 1
        logger.debug(
            "Move accepted",
            phase=phase,
            moves=len(moves),
            objective=round(self.trace[-1], 6),
        )

    def _leaves_room(self, moves: list[Move]) -> bool:
        """Whether applied moves left an occupied host with a task fewer or opened a free host."""
        s = self.state
        net: Counter[int] = Counter()
        left: set[int] = set()
        for move in moves:
            if isinstance(move, RelocateMove):
                pairs = [(move.from_host, move.to_host)]
            else:
                pairs = [(move.host_a, move.host_b), (move.host_b, move.host_a)]
            for source_id, target_id in pairs:
                source, target = s.host_index[source_id], s.host_index[target_id]
                left.add(source)
                net[source] -= 1
                net[target] += 1
        if any(s.count[h] > 0 for h in left):
            return True
        return any(s.count[h] > 0 and s.count[h] == change for h, change in net.items())

    def _flag_relocations(self, touched: IntArray) -> None:
        """Flag tasks on changed hosts, and settled tasks with a new improving move into one."""
        s = self.state
        self.relocate_pending[np.isin(s.host_of, touched)] = True
        settled = np.flatnonzero(~self.relocate_pending)
        if settled.size == 0:
            return
        deltas, fits = s.relocation_matrix(settled, touched)
        self.evaluations += deltas.size
        improving = (fits & (deltas < -self.eps)).any(axis=1)
        self.relocate_pending[settled[improving]] = True

    def _best(
        self, hosts: IntArray, deltas: np.ndarray, fits: np.ndarray, rank: IntArray
    ) -> int:
        """Lowest-delta feasible host; ties go to the canonical target order."""
        candidates = np.flatnonzero(fits)
        order = np.lexsort((rank[hosts[candidates]], deltas[candidates]))
        return int(hosts[candidates[order[0]]])

    def _source_order(self, hosts: IntArray) -> IntArray:
        """Hosts by task count, then descending cost weight, then id."""
        s = self.state
        return hosts[np.lexsort((hosts, -s.cost_weight[hosts], s.count[hosts]))]

    # Preconditions

    def check_placeable(self) -> None:
        """
        Raises:
            InfeasibleTaskError: A task exceeds the capacity of every host
        """
        s = self.state
        shapes = np.unique(s.capacity, axis=0) if len(s.host_ids) else np.zeros((0, 2))
        for task, limit in enumerate(s.limits):
            if not (limit <= shapes + CAPACITY_TOLERANCE).all(axis=1).any():
                task_id = s.task_ids[task]
                raise InfeasibleTaskError(
                    f"task '{task_id}' fits on no host under {self.config.limit_mode.value} limits",
                    task_id=task_id,
                )

    def repair(self) -> None:
        """
        Relocate tasks off hosts that are overloaded under the chosen limits.

        Largest tasks leave first, each to its best feasible host.

        Raises:
            InfeasibleTaskError: A host cannot be brought within capacity
        """
        s = self.state
        for host in s.overloaded():
            host_index = np.array([host])
            residents = s.tasks_on(int(host))
            for task in residents[np.lexsort((residents, -s.size[residents]))]:
                if s.fits(host_index, s.load[host_index]).all():
                    break
                hosts, deltas, fits = s.relocation_deltas(int(task))
                if not fits.any():
                    continue
                target = self._best(hosts, deltas, fits, s.target_rank())
                source = s.relocate(int(task), target)
                self.repair_moves.append(self._relocate_move(int(task), source, target))
            if not s.fits(host_index, s.load[host_index]).all():
                host_id = s.host_ids[int(host)]
                raise InfeasibleTaskError(
                    f"host '{host_id}' cannot be brought within capacity under "
                    f"{self.config.limit_mode.value} limits",
                    host_id=host_id,
                )
        if self.repair_moves:
            logger.info("Placement repaired", moves=len(self.repair_moves))

    # Phases

    def _relocate_phase(self) -> bool:
        s = self.state
        lower = -self.config.w_frag * s.size
        # a task whose removal cannot pay for the best possible target never improves
        hopeless = s.source_deltas() + lower >= -self.eps
        self.relocate_pending[hopeless] = False
        rank: IntArray | None = None
        for task in np.flatnonzero(self.relocate_pending):
            hosts, deltas, fits = s.relocation_deltas(int(task))
            self.evaluations += len(hosts)
            improving = fits & (deltas < -self.eps)
            if improving.any():
                rank = s.target_rank() if rank is None else rank
                options = hosts[improving]
                target = int(options[np.argmin(rank[options])])
                source = s.relocate(int(task), target)
                move = self._relocate_move(int(task), source, target)
                self._commit("relocate", [source, target], [move])
                return True
            self.relocate_pending[task] = False
        return False

    def _evacuate_phase(self) -> bool:
        s = self.state
        w_frag = self.config.w_frag
        crowded = np.flatnonzero(s.count >= 2)
        failed = self.evacuate_failed[crowded]
        stale = (failed < 0) | (self.touched_at[crowded] > failed) | (self.room_left_at > failed)
        for host in self._source_order(crowded[stale]):
            residents = s.tasks_on(int(host))
            if len(residents) > self.budget:
                continue
            residents = residents[np.lexsort((residents, -s.size[residents]))]
            remaining = w_frag * float(s.size[residents].sum())
            if -s.terms[host] - remaining >= -self.eps:
                continue

            before = s.objective()
            snapshot = s.snapshot()
            rank = s.target_rank()
            moves: list[Move] = []
            touched = [int(host)]
            running = 0.0
            emptied = True
            for task in residents:
                hosts, deltas, fits = s.relocation_deltas(int(task))
                self.evaluations += len(hosts)
                if not fits.any():
                    emptied = False
                    break
                target = self._best(hosts, deltas, fits, rank)
                running += float(deltas[target])
                remaining -= w_frag * float(s.size[task])
                s.relocate(int(task), target)
                moves.append(self._relocate_move(int(task), int(host), target))
                touched.append(target)
                # the rest of the evacuation can at best free this host
                if s.count[host] > 0 and running - s.terms[host] - remaining >= -self.eps:
                    emptied = False
                    break
            if emptied and s.objective() < before - self.eps:
                self._commit("evacuate", touched, moves)
                return True
            s.restore(snapshot)
            self.evacuate_failed[host] = self.clock
        return False

    def _first_fit(self, group: IntArray, bins: IntArray) -> IntArray | None:
        """Bin index of each task, first fit in group order, or None when one does not fit."""
        s = self.state
        load = np.zeros((len(bins), 2))
        slots = np.empty(len(group), dtype=np.int64)
        for position, task in enumerate(group):
            room = s.fits(bins, load + s.limits[task])
            if not room.any():
                return None
            slots[position] = int(np.argmax(room))
            load[slots[position]] += s.limits[task]
        return slots

    def _exact_fit(self, group: IntArray, bins: IntArray) -> IntArray | None:
        """
        Cheapest feasible bin index of each task, by enumerating every placement.

        Placements are bin-index vectors in lexicographic order; the first
        minimum wins. None for groups above ``repack_exact_tasks`` or
        ``EXACT_PLACEMENTS``, and when nothing fits.
        """
        s = self.state
        n_bins, n_tasks = len(bins), len(group)
        if n_tasks > self.config.repack_exact_tasks or n_bins**n_tasks > EXACT_PLACEMENTS:
            return None
        total = s.limits[group].sum(axis=0)
        if (total > s.capacity[bins].sum(axis=0) + CAPACITY_TOLERANCE).any():
            return None
        vectors = np.array(list(product(range(n_bins), repeat=n_tasks)), dtype=np.int64)
        onehot = (vectors[:, :, None] == np.arange(n_bins)).astype(float)
        load = np.einsum("cnb,nd->cbd", onehot, s.limits[group])
        feasible = s.fits(bins, load).all(axis=1)
        self.evaluations += len(vectors)
        if not feasible.any():
            return None
        sens_load = None
        if s.sens is not None:
            per_bin = s.sens[group[:, None], s.host_arch[bins][None, :]]
            sens_load = np.einsum("cnb,nbd->cbd", onehot, per_bin)
        count = onehot.sum(axis=1).astype(np.int64)
        value = s.host_terms(bins, load, sens_load, count).sum(axis=-1)
        return vectors[int(np.argmin(np.where(feasible, value, np.inf)))]

    def _pack_group(self, source: int, partners: list[int]) -> dict[int, int] | None:
        """
        Pack the tasks of a source and its partners into the partners.

        Groups of at most ``repack_exact_tasks`` are packed by enumeration;
        larger ones, and small ones with too many placements, first fit
        decreasing.

        Returns:
            Task to new host for every task that changes host, or None when the
            group does not fit or the result does not improve the objective
        """
        s = self.state
        group = np.concatenate([s.tasks_on(h) for h in [source, *partners]])
        group = group[np.lexsort((group, -s.size[group]))]
        bins = np.array(partners, dtype=np.int64)
        slots = self._exact_fit(group, bins)
        if slots is None:
            slots = self._first_fit(group, bins)
        if slots is None:
            return None
        load = np.zeros((len(bins), 2))
        np.add.at(load, slots, s.limits[group])
        count = np.bincount(slots, minlength=len(bins))
        sens_load = None
        if s.sens is not None:
            sens_load = np.zeros((len(bins), 3))
            np.add.at(sens_load, slots, s.sens[group, s.host_arch[bins[slots]]])
        self.evaluations += 1
        after = float(s.host_terms(bins, load, sens_load, count).sum())
        before = float(s.terms[bins].sum() + s.terms[source])
        if after - before >= -self.eps:
            return None
        return {
            int(t): int(bins[slot])
            for t, slot in zip(group, slots, strict=True)
            if bins[slot] != s.host_of[t]
        }

    def _apply_plan(self, plan: dict[int, int]) -> tuple[list[int], list[Move]] | None:
        """
        Carry out a repack plan as a sequence of feasible relocations and swaps.

        Returns:
            Touched hosts and the applied moves, or None (state restored) when
            no feasible ordering is found within the budget
        """
        s = self.state
        snapshot = s.snapshot()
        pending = dict(sorted(plan.items()))
        moves: list[Move] = []
        touched: set[int] = set()
        while pending:
            ready = next(
                (
                    t
                    for t, target in pending.items()
                    if s.fits(np.array([target]), s.load[[target]] + s.limits[t]).all()
                ),
                None,
            )
            if ready is not None:
                target = pending.pop(ready)
                source = s.relocate(ready, target)
                moves.append(self._relocate_move(ready, source, target))
                touched.update((source, target))
                continue
            pair = self._pending_swap(pending)
            if pair is None:
                s.restore(snapshot)
                return None
            a, b = pair
            host_a, host_b = int(s.host_of[a]), int(s.host_of[b])
            s.swap(a, b)
            del pending[a], pending[b]
            moves.append(
                SwapMove(
                    task_a=s.task_ids[a],
                    task_b=s.task_ids[b],
                    host_a=s.host_ids[host_a],
                    host_b=s.host_ids[host_b],
                )
            )
            touched.update((host_a, host_b))
        if len(moves) > self.budget:
            s.restore(snapshot)
            return None
        return sorted(touched), moves

    def _pending_swap(self, pending: dict[int, int]) -> tuple[int, int] | None:
        """Two pending tasks bound for each other's hosts whose exchange is feasible."""
        s = self.state
        for a, target_a in pending.items():
            for b, target_b in pending.items():
                if b <= a or target_a != s.host_of[b] or target_b != s.host_of[a]:
                    continue
                _, fits = s.swap_deltas(a, np.array([b]))
                if fits[0]:
                    return a, b
        return None

    def _repack_phase(self) -> bool:
        s = self.state
        width = self.config.repack_width
        occupied = np.flatnonzero(s.count > 0)
        if width == 0 or len(occupied) < 2:
            return False
        free = ((s.capacity - s.load) / s.capacity).sum(axis=1)
        everything = np.arange(len(s.host_ids))
        roomiest = occupied[np.lexsort((occupied, -free[occupied]))]
        cheapest = everything[np.lexsort((everything, -free, s.cost_weight))]
        for source in self._source_order(occupied):
            tried: set[tuple[int, ...]] = set()
            for pool in (roomiest, cheapest):
                partners = [int(h) for h in pool[: width + 1] if h != source][:width]
                if not partners or tuple(partners) in tried:
                    continue
                tried.add(tuple(partners))
                group = (int(source), *partners)
                if self.repack_failed.get(group, -1) >= self.touched_at[list(group)].max():
                    continue
                before = s.objective()
                plan = self._pack_group(int(source), partners)
                if not plan:
                    self.repack_failed[group] = self.clock
                    continue
                snapshot = s.snapshot()
                applied = self._apply_plan(plan)
                if applied is None:
                    self.repack_failed[group] = self.clock
                    continue
                if s.objective() >= before - self.eps:
                    s.restore(snapshot)
                    self.repack_failed[group] = self.clock
                    continue
                touched, moves = applied
                self._commit("repack", touched, moves)
                return True
        return False

    def _swap_phase(self) -> bool:
        s = self.state
        if s.sens_load is None:
            return False
        hot = np.flatnonzero((s.sens_load > 1.0).any(axis=1) & (s.count > 0))
        everyone = np.arange(len(s.task_ids))
        for task in np.flatnonzero(np.isin(s.host_of, hot)):
            since = self.swap_clean[task]
            partners = everyone
            if since >= 0 and self.touched_at[s.host_of[task]] <= since:
                partners = np.flatnonzero(self.touched_at[s.host_of] > since)
                if partners.size == 0:
                    continue
            deltas, fits = s.swap_deltas(int(task), partners)
            self.evaluations += len(partners)
            improving = np.flatnonzero(fits & (deltas < -self.eps))
            if improving.size:
                other = int(partners[improving[0]])
                host_a, host_b = int(s.host_of[task]), int(s.host_of[other])
                s.swap(int(task), other)
                move = SwapMove(
                    task_a=s.task_ids[task],
                    task_b=s.task_ids[other],
                    host_a=s.host_ids[host_a],
                    host_b=s.host_ids[host_b],
                )
                self._commit("swap", [host_a, host_b], [move])
                return True
            self.swap_clean[task] = self.clock
        return False

    # Driver

    def run(self) -> SolveResult:
        """
        Repair the starting placement if needed, then improve it.

        Returns:
            SolveResult: Moves, objective trace and host accounting
        """
        initial = dict(self.fleet.assignment)
        self.check_placeable()
        self.repair()
        initial_objective = self.state.objective()
        logger.info(
            "Packer started",
            mode=self.config.limit_mode.value,
            tasks=len(self.state.task_ids),
            hosts=len(self.state.host_ids),
            max_moves=self.config.max_moves,
            objective=round(initial_objective, 6),
        )
        phases = (
            self._relocate_phase,
            self._evacuate_phase,
            self._repack_phase,
            self._swap_phase,
        )
        while self.budget > 0 and any(phase() for phase in phases):
            pass

        final = self.state.assignment()
        result = SolveResult(
            limit_mode=self.config.limit_mode,
            initial=initial,
            final=final,
            repair_moves=self.repair_moves,
            moves_applied=self.moves,
            initial_objective=initial_objective,
            objective_trace=self.trace,
            stats=self._stats(initial, final),
        )
        logger.info(
            "Packer finished",
            moves=len(self.moves),
            steps=len(self.trace),
            objective=round(result.final_objective, 6),
            hosts_freed=sum(result.stats.freed.values()),
        )
        return result

    def _stats(self, initial: Assignment, final: Assignment) -> SolveStats:
        fleet = self.fleet
        before, after = set(initial.values()), set(final.values())

        def per_arch(hosts: set[str]) -> dict[str, int]:
            counts = Counter(fleet.host(h).arch for h in hosts)
            return {arch: counts.get(arch, 0) for arch in fleet.arch_names()}

        return SolveStats(
            occupied_before=per_arch(before),
            occupied_after=per_arch(after),
            freed=per_arch(before - after),
            newly_occupied=per_arch(after - before),
            accepted_by_phase={phase: self.accepted.get(phase, 0) for phase in PHASES},
            evaluations=self.evaluations,
        )


def solve(
    fleet: Fleet,
    config: SolverConfig | None = None,
    table: SensitivityTable | None = None,
) -> SolveResult:
    """
    Improve a fleet's placement by greedy local search.

    Args:
        fleet: Fleet whose current assignment is the starting point
        config: Solver configuration; the P99 preset when omitted
        table: Sensitivity table, required for P99Sens or any ``w_sens > 0``

    Returns:
        SolveResult: Replaying ``repair_moves`` then ``moves_applied`` on
        ``initial`` yields ``final``

    Raises:
        SolverConfigError: Sensitivity weighting without a table
        MissingPercentileError: A percentile mode and a task without percentiles
        InfeasibleTaskError: A task fits on no host
    """
    config = config or SolverConfig.preset(LimitMode.P99)
    if table is None and (config.limit_mode == LimitMode.P99_SENS or config.w_sens > 0):
        raise SolverConfigError(
            f"limit mode {config.limit_mode.value} requires a sensitivity table"
        )
    return LocalSearch(fleet, config, table).run()
