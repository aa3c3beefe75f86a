"""Common reusable models and enums.

These types form the shared vocabulary of every stage: resource vectors,
umbrella server types, limit modes and resource dimensions.
"""

from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field


class ServerType(str, Enum):
    """Umbrella server classes: small/cheap (Type I) and large/expensive (Type II)."""

    TYPE_I = "TypeI"
    TYPE_II = "TypeII"


class LimitMode(str, Enum):
    """Which limits the packer treats as a task's hard resource requirement.

    Values are the CLI names of the packer configurations.
    """

    ORIGINAL = "baseline"
    P99_CPU = "p99cpu"
    P99_MEM = "p99mem"
    P99 = "p99"
    P99_SENS = "p99sens"

    @property
    def uses_p99_cpu(self) -> bool:
        return self in (LimitMode.P99_CPU, LimitMode.P99, LimitMode.P99_SENS)

    @property
    def uses_p99_mem(self) -> bool:
        return self in (LimitMode.P99_MEM, LimitMode.P99, LimitMode.P99_SENS)

    @property
    def needs_p99(self) -> bool:
        return self.uses_p99_cpu or self.uses_p99_mem


class Resource(str, Enum):
    """Resource dimensions that are hard capacity constraints."""

    CPU = "cpu_cores"
    MEMORY = "memory_gb"


class Dimension(str, Enum):
    """Shared resource dimensions scored by sensitivity."""

    CPU = "cpu"
    MEMBW = "membw"
    NETBW = "netbw"


HARD_RESOURCES: tuple[Resource, ...] = (Resource.CPU, Resource.MEMORY)
SENSITIVITY_DIMENSIONS: tuple[Dimension, ...] = (Dimension.CPU, Dimension.MEMBW, Dimension.NETBW)

NonNegative = Annotated[float, Field(ge=0, allow_inf_nan=False)]


# Base model for value objects
class FrozenModel(BaseModel):
    """Immutable base model; enum fields keep their enum type in Python."""

    model_config = ConfigDict(frozen=True)


class ResourceVector(FrozenModel):
    """
    Quantities of the four tracked resources.

    Attributes:
        cpu_cores: Cores
        memory_gb: Memory capacity in GiB
        membw_gbps: Memory bandwidth in GB/s
        netbw_gbps: Network bandwidth in Gb/s
    """

    cpu_cores: NonNegative = 0.0
    memory_gb: NonNegative = 0.0
    membw_gbps: NonNegative = 0.0
    netbw_gbps: NonNegative = 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.cpu_cores, self.memory_gb, self.membw_gbps, self.netbw_gbps)

    def get(self, resource: Resource) -> float:
        """Get the quantity of a hard-constraint resource."""
        return float(getattr(self, resource.value))

    def is_strictly_positive(self) -> bool:
        return all(value > 0 for value in self.as_tuple())

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(
            cpu_cores=self.cpu_cores + other.cpu_cores,
            memory_gb=self.memory_gb + other.memory_gb,
            membw_gbps=self.membw_gbps + other.membw_gbps,
            netbw_gbps=self.netbw_gbps + other.netbw_gbps,
        )

    @classmethod
    def from_sequence(cls, values: "list[float] | tuple[float, ...]") -> "ResourceVector":
        cpu, mem, membw, netbw = (float(v) for v in values)
        return cls(cpu_cores=cpu, memory_gb=mem, membw_gbps=membw, netbw_gbps=netbw)


RESOURCE_FIELDS: tuple[str, ...] = ("cpu_cores", "memory_gb", "membw_gbps", "netbw_gbps")
