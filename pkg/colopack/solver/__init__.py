"""Packer: limit modes, the weighted objective, greedy local search and its oracle."""

from colopack.solver.initial import first_fit_decreasing
from colopack.solver.limits import CAPACITY_TOLERANCE, effective_limits, feasible
from colopack.solver.objective import objective
from colopack.solver.oracle import brute_force_optimal
from colopack.solver.replay import replay, replay_result
from colopack.solver.search import PHASES, LocalSearch, solve
from colopack.solver.state import PackingState

__all__ = [
    "CAPACITY_TOLERANCE",
    "PHASES",
    "LocalSearch",
    "PackingState",
    "brute_force_optimal",
    "effective_limits",
    "feasible",
    "first_fit_decreasing",
    "objective",
    "replay",
    "replay_result",
    "solve",
]
