"""Replay a move log against a starting assignment."""

from collections.abc import Iterable

from colopack.exceptions import DanglingReferenceError, FleetParseError, InfeasibleTaskError
from colopack.models.common import LimitMode
from colopack.models.fleet import Assignment, Fleet
from colopack.models.solver import Move, RelocateMove, SolveResult
from colopack.solver.limits import feasible


def _check_on(assignment: Assignment, task_id: str, host_id: str, position: int) -> None:
    if task_id not in assignment:
        raise DanglingReferenceError("move->task", f"move {position}", task_id)
    if assignment[task_id] != host_id:
        raise FleetParseError(
            f"move {position}: task '{task_id}' is on '{assignment[task_id]}', not '{host_id}'"
        )


def replay(
    fleet: Fleet,
    initial: Assignment,
    moves: Iterable[Move],
    mode: LimitMode | None = None,
) -> Assignment:
    """
    Apply moves in order and return the resulting assignment.

    Args:
        fleet: Fleet the moves refer to
        initial: Starting assignment
        moves: Relocate and swap moves, in application order
        mode: When given, every touched host must stay feasible under this limit mode

    Returns:
        Assignment: Placement after the last move

    Raises:
        DanglingReferenceError: A move names an unknown task or host
        FleetParseError: A move's source host disagrees with the placement
        InfeasibleTaskError: A move overloads a host under ``mode``
    """
    placement = dict(initial)
    known_hosts = set(fleet.host_ids())
    for position, move in enumerate(moves):
        if isinstance(move, RelocateMove):
            _check_on(placement, move.task_id, move.from_host, position)
            if move.to_host not in known_hosts:
                raise DanglingReferenceError("move->host", move.task_id, move.to_host)
            placement[move.task_id] = move.to_host
            touched = [move.to_host]
        else:
            _check_on(placement, move.task_a, move.host_a, position)
            _check_on(placement, move.task_b, move.host_b, position)
            placement[move.task_a], placement[move.task_b] = move.host_b, move.host_a
            touched = [move.host_a, move.host_b]
        if mode is not None:
            for host_id in touched:
                if not feasible(fleet, placement, host_id, mode=mode):
                    raise InfeasibleTaskError(
                        f"move {position} overloads host '{host_id}' under {mode.value} limits",
                        host_id=host_id,
                    )
    return placement


def replay_result(fleet: Fleet, result: SolveResult) -> Assignment:
    """Replay a result's repair and search moves from its initial assignment."""
    return replay(
        fleet,
        result.initial,
        [*result.repair_moves, *result.moves_applied],
        mode=result.limit_mode,
    )
