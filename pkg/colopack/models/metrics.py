"""Metrics models: fragmentation, interference and the consolidated report."""

from pydantic import Field

from colopack.models.common import FrozenModel, LimitMode


class Fragmentation(FrozenModel):
    """Stranded capacity of one hard resource over occupied hosts."""

    absolute: float
    pct: float
    occupied_capacity: float


class Interference(FrozenModel):
    """Sensitivity excess over 1.0, summed over hosts and dimensions."""

    excess: float = 0.0
    tasks_at_risk: int = 0
    per_dimension: dict[str, float] = Field(default_factory=dict)
    hosts_over: int = 0


class MetricsReport(FrozenModel):
    """
    Every reported quantity of one packer run, comparing ``after`` with ``before``.

    Attributes:
        limit_mode: Limit mode fragmentation is evaluated under
        hosts_occupied_before: Occupied hosts per architecture before the run
        hosts_occupied: Occupied hosts per architecture after the run
        hosts_freed: Hosts per architecture occupied before and free after
        hosts_newly_occupied: Hosts per architecture free before and occupied after
        tasks_moved: Tasks whose host changed, keyed by the architecture they left
        fragmentation_before: Stranded capacity per hard resource before the run
        fragmentation: Stranded capacity per hard resource after the run
        tco: Percent reduction of cost-weighted occupied hosts
        tco_by_type: Cost of occupied hosts per umbrella type, after the run
        wsl: Weighted-score loss
        colocation_factor: Tasks per occupied host, per architecture
        interference_before: Interference of the placement before the run
        interference: Interference of the placement after the run
    """

    limit_mode: LimitMode
    hosts_occupied_before: dict[str, int] = Field(default_factory=dict)
    hosts_occupied: dict[str, int] = Field(default_factory=dict)
    hosts_freed: dict[str, int] = Field(default_factory=dict)
    hosts_newly_occupied: dict[str, int] = Field(default_factory=dict)
    tasks_moved: dict[str, int] = Field(default_factory=dict)
    fragmentation_before: dict[str, Fragmentation] = Field(default_factory=dict)
    fragmentation: dict[str, Fragmentation] = Field(default_factory=dict)
    tco: float = 0.0
    tco_by_type: dict[str, float] = Field(default_factory=dict)
    wsl: float = 0.0
    colocation_factor: dict[str, float] = Field(default_factory=dict)
    interference_before: Interference | None = None
    interference: Interference | None = None

    @property
    def total_hosts_before(self) -> int:
        return sum(self.hosts_occupied_before.values())

    @property
    def total_hosts_after(self) -> int:
        return sum(self.hosts_occupied.values())

    @property
    def total_hosts_freed(self) -> int:
        return sum(self.hosts_freed.values())

    @property
    def total_tasks_moved(self) -> int:
        return sum(self.tasks_moved.values())
