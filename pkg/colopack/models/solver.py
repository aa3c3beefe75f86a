"""Packer models: goal weights, solver configuration, moves and results."""

from typing import Annotated, Literal

from pydantic import Field, model_validator

from colopack.config import settings
from colopack.exceptions import SolverConfigError
from colopack.models.common import FrozenModel, LimitMode, NonNegative
from colopack.models.fleet import Assignment


class GoalWeights(FrozenModel):
    """Weights of the four objective terms."""

    w_hosts: NonNegative = 1.0
    w_cost: NonNegative = 1.0
    w_frag: NonNegative = 0.1
    w_sens: NonNegative = 0.0


class SolverConfig(FrozenModel):
    """
    One packer configuration.

    Attributes:
        limit_mode: Which limits are hard constraints
        w_hosts: Weight of the occupied-host count
        w_cost: Weight of the occupied cost-weight sum
        w_frag: Weight of normalized stranded capacity
        w_sens: Weight of sensitivity excess over 1.0
        max_moves: Budget of applied moves
        seed: Seed recorded with the run; the search itself is deterministic
        repack_width: Partner hosts a repack move may pack into
        repack_exact_tasks: Largest repack group packed by enumeration instead of first fit
        improvement_eps: Minimum objective decrease for a move to be applied
    """

    limit_mode: LimitMode = LimitMode.P99
    w_hosts: NonNegative = 1.0
    w_cost: NonNegative = 1.0
    w_frag: NonNegative = 0.1
    w_sens: NonNegative = 0.0
    max_moves: Annotated[int, Field(ge=0)] = 400
    seed: int = 0
    repack_width: Annotated[int, Field(ge=0)] = 2
    repack_exact_tasks: Annotated[int, Field(ge=0)] = 8
    improvement_eps: Annotated[float, Field(gt=0)] = 1e-9

    @model_validator(mode="after")
    def check_weights(self) -> "SolverConfig":
        if not any((self.w_hosts, self.w_cost, self.w_frag, self.w_sens)):
            raise SolverConfigError("at least one goal weight must be positive")
        return self

    @property
    def weights(self) -> GoalWeights:
        return GoalWeights(
            w_hosts=self.w_hosts, w_cost=self.w_cost, w_frag=self.w_frag, w_sens=self.w_sens
        )

    @classmethod
    def preset(cls, mode: LimitMode, **overrides: object) -> "SolverConfig":
        """
        Build the default configuration of a limit mode from settings.

        Args:
            mode: Limit mode the packer runs under
            **overrides: Field values replacing the preset

        Returns:
            SolverConfig: The preset with overrides applied
        """
        weights = settings.weights_for(mode)
        values: dict[str, object] = {
            "limit_mode": mode,
            **weights.model_dump(),
            "max_moves": settings.max_moves,
            "seed": settings.seed,
            "repack_width": settings.repack_width,
            "repack_exact_tasks": settings.repack_exact_tasks,
            "improvement_eps": settings.improvement_eps,
        }
        values.update(overrides)
        return cls.model_validate(values)


class RelocateMove(FrozenModel):
    """Move one task to another host."""

    kind: Literal["relocate"] = "relocate"
    task_id: str
    from_host: str
    to_host: str


class SwapMove(FrozenModel):
    """Exchange the hosts of two tasks."""

    kind: Literal["swap"] = "swap"
    task_a: str
    task_b: str
    host_a: str
    host_b: str


Move = Annotated[RelocateMove | SwapMove, Field(discriminator="kind")]


class SolveStats(FrozenModel):
    """Per-architecture host accounting of one solve."""

    occupied_before: dict[str, int] = Field(default_factory=dict)
    occupied_after: dict[str, int] = Field(default_factory=dict)
    freed: dict[str, int] = Field(default_factory=dict)
    newly_occupied: dict[str, int] = Field(default_factory=dict)
    accepted_by_phase: dict[str, int] = Field(default_factory=dict)
    evaluations: int = 0


class SolveResult(FrozenModel):
    """
    Outcome of a packer run.

    ``repair_moves`` restore feasibility of the initial placement under the
    chosen limit mode; ``moves_applied`` then lead from the repaired placement
    to ``final`` and each of them keeps the placement feasible.
    """

    limit_mode: LimitMode
    initial: Assignment
    final: Assignment
    repair_moves: list[Move] = Field(default_factory=list)
    moves_applied: list[Move] = Field(default_factory=list)
    initial_objective: float
    objective_trace: list[float] = Field(default_factory=list)
    stats: SolveStats = Field(default_factory=SolveStats)

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else self.initial_objective
