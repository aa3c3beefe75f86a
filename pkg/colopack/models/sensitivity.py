"""Sensitivity models: per-dimension scores, measured profiles and the task x arch table."""

from typing import Annotated

from pydantic import Field

from colopack.exceptions import MissingSensitivityError
from colopack.models.common import Dimension, FrozenModel, NonNegative


class SensitivityScores(FrozenModel):
    """
    Sensitivity scores of one task on one architecture.

    A score of 1.0 means the task would saturate that shared resource of the
    host if it ran alone; values above 1.0 are possible.
    """

    cpu: NonNegative = 0.0
    membw: NonNegative = 0.0
    netbw: NonNegative = 0.0

    def get(self, dimension: Dimension) -> float:
        return float(getattr(self, dimension.value))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.cpu, self.membw, self.netbw)

    def __add__(self, other: "SensitivityScores") -> "SensitivityScores":
        return SensitivityScores(
            cpu=self.cpu + other.cpu,
            membw=self.membw + other.membw,
            netbw=self.netbw + other.netbw,
        )


class SensitivityProfile(FrozenModel):
    """
    Scores measured on (or inferred for) one base architecture.

    Attributes:
        base_arch: Architecture the scores were measured on
        cpu: CPU score on the base architecture
        membw: Memory-bandwidth score on the base architecture
        netbw: Network-bandwidth score on the base architecture
    """

    base_arch: Annotated[str, Field(min_length=1)]
    cpu: NonNegative
    membw: NonNegative
    netbw: NonNegative

    @property
    def scores(self) -> SensitivityScores:
        return SensitivityScores(cpu=self.cpu, membw=self.membw, netbw=self.netbw)


class CandidateProfile(FrozenModel):
    """
    A representative service measured in isolation; one row of a profile file.

    Attributes:
        service: Service name (e.g. "Rank2")
        cluster_label: Workload cluster the service represents
        base_arch: Architecture the scores were measured on
        cpu: CPU score on the base architecture
        membw: Memory-bandwidth score on the base architecture
        netbw: Network-bandwidth score on the base architecture
        base_inferred: True when the measurement base is inferred rather than published
    """

    service: Annotated[str, Field(min_length=1)]
    cluster_label: Annotated[str, Field(min_length=1)]
    base_arch: Annotated[str, Field(min_length=1)]
    cpu: NonNegative
    membw: NonNegative
    netbw: NonNegative
    base_inferred: bool = True

    @property
    def profile(self) -> SensitivityProfile:
        return SensitivityProfile(
            base_arch=self.base_arch, cpu=self.cpu, membw=self.membw, netbw=self.netbw
        )


class SensitivityTable(FrozenModel):
    """
    Normalized scores for every (task, architecture) pair.

    Entries are stored as ``{task_id: {arch_name: scores}}`` so the table
    serializes to plain JSON.
    """

    entries: dict[str, dict[str, SensitivityScores]] = Field(default_factory=dict)

    def get(self, task_id: str, arch: str) -> SensitivityScores:
        """
        Get the scores of a task on an architecture.

        Raises:
            MissingSensitivityError: If the pair is absent
        """
        try:
            return self.entries[task_id][arch]
        except KeyError:
            raise MissingSensitivityError(task_id, arch) from None

    def task_ids(self) -> list[str]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return sum(len(row) for row in self.entries.values())
