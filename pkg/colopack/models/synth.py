"""Synthetic fleet specification."""

from typing import Annotated

from pydantic import Field, model_validator

from colopack.exceptions import GeneratorError
from colopack.models.common import FrozenModel

Fraction = Annotated[float, Field(ge=0, le=1, allow_inf_nan=False)]


class UtilizationProfile(FrozenModel):
    """
    Target p99 utilization of one workload cluster, as fractions of requested.

    Each pair is (mean, stddev) of the per-task target drawn from a normal
    distribution and clipped to [0.02, 1].
    """

    name: str
    weight: Annotated[float, Field(gt=0)]
    cpu: tuple[Fraction, Fraction]
    mem: tuple[Fraction, Fraction]
    netbw: tuple[Fraction, Fraction]


DEFAULT_PROFILES: tuple[UtilizationProfile, ...] = (
    UtilizationProfile(
        name="low", weight=0.62, cpu=(0.12, 0.04), mem=(0.24, 0.06), netbw=(0.10, 0.04)
    ),
    UtilizationProfile(
        name="medium", weight=0.31, cpu=(0.22, 0.05), mem=(0.30, 0.06), netbw=(0.22, 0.06)
    ),
    UtilizationProfile(
        name="high", weight=0.07, cpu=(0.55, 0.10), mem=(0.55, 0.10), netbw=(0.50, 0.10)
    ),
)


class GeneratorSpec(FrozenModel):
    """
    Parameters of a synthetic fleet and its usage trace.

    Attributes:
        seed: Seed of every random draw
        hosts_per_arch: Number of hosts of each architecture
        n_tasks: Number of tasks
        tasks_per_job: Tasks sharing one job id
        profiles: Utilization profiles; weights are normalized
        request_fraction: Range of requested limits as a fraction of the sizing host
        diurnal_amplitude: Relative amplitude of the daily sinusoid
        tail_fraction: Share of tasks drawn from the last, heaviest profile
        noise: Bound of the relative per-minute noise
        second_jitter: Bound of the relative per-second jitter
        days: Trace length in days
        start: First timestamp of the trace, aligned to a minute
    """

    seed: int = 0
    # More hosts than tasks, mostly large ones, so a spread-out placement exists
    hosts_per_arch: dict[str, Annotated[int, Field(ge=0)]] = Field(
        default_factory=lambda: {
            "Broadwell18": 100,
            "Broadwell20": 900,
            "Haswell10": 100,
            "Haswell12": 100,
            "Skylake14": 200,
            "Skylake16": 700,
        }
    )
    n_tasks: Annotated[int, Field(ge=0)] = 2000
    tasks_per_job: Annotated[int, Field(ge=1)] = 10
    profiles: tuple[UtilizationProfile, ...] = DEFAULT_PROFILES
    request_fraction: tuple[Fraction, Fraction] = (0.3, 0.6)
    diurnal_amplitude: Fraction = 0.3
    tail_fraction: Fraction = 0.07
    noise: Fraction = 0.02
    second_jitter: Fraction = 0.005
    days: Annotated[int, Field(ge=1)] = 7
    start: int = 1_699_920_000

    @model_validator(mode="after")
    def check_spec(self) -> "GeneratorSpec":
        if not self.hosts_per_arch or sum(self.hosts_per_arch.values()) < 1:
            raise GeneratorError("generator spec needs at least one host")
        if not self.profiles:
            raise GeneratorError("generator spec needs at least one utilization profile")
        low, high = self.request_fraction
        if not 0 < low <= high:
            raise GeneratorError(f"invalid request fraction range ({low}, {high})")
        if self.start % 60:
            raise GeneratorError("trace start must be aligned to a minute")
        return self

    @classmethod
    def short(cls, **overrides: object) -> "GeneratorSpec":
        """One-day preset for fast runs."""
        return cls.model_validate({"days": 1, **overrides})
