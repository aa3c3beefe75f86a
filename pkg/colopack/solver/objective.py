"""The packer's weighted objective, evaluated on a whole assignment."""

from colopack.models.common import LimitMode
from colopack.models.fleet import Assignment, Fleet
from colopack.models.sensitivity import SensitivityTable
from colopack.models.solver import SolverConfig
from colopack.solver.state import PackingState


def objective(
    fleet: Fleet,
    assignment: Assignment | None = None,
    config: SolverConfig | None = None,
    table: SensitivityTable | None = None,
) -> float:
    """
    Weighted objective of an assignment.

    ``w_hosts`` times the occupied hosts, plus ``w_cost`` times their summed
    cost weights, plus ``w_frag`` times stranded cpu and memory on occupied
    hosts (each normalized by the fleet total of that resource), plus
    ``w_sens`` times the sensitivity excess over 1.0.

    Args:
        fleet: Fleet the assignment places tasks on
        assignment: Placement to score; the fleet's own when omitted
        config: Limit mode and weights; the P99 preset when omitted
        table: Sensitivity table, required when ``w_sens > 0``

    Returns:
        float: Objective value; 0.0 for an empty fleet

    Raises:
        SolverConfigError: ``w_sens > 0`` without a table
        MissingSensitivityError: The table lacks a (task, arch) pair

    Example:
        >>> objective(fleet, config=SolverConfig(w_hosts=1, w_cost=0, w_frag=1))
        1.0
    """
    config = config or SolverConfig.preset(LimitMode.P99)
    placement = fleet.assignment if assignment is None else assignment
    return PackingState.from_config(fleet, placement, config, table).objective()
