"""Built-in server architectures and their umbrella types."""

from colopack.models.common import ResourceVector, ServerType
from colopack.models.fleet import ArchSpec

# name: (cores, memory GiB, membw GB/s, netbw Gb/s, score, type)
_ARCHITECTURES: dict[str, tuple[float, float, float, float, float, ServerType]] = {
    "Haswell10": (48, 32, 75.6, 5, 1.63, ServerType.TYPE_I),
    "Haswell12": (48, 256, 120, 5, 1.79, ServerType.TYPE_II),
    "Skylake14": (36, 64, 76, 25, 1.29, ServerType.TYPE_I),
    "Skylake16": (80, 256, 170, 12.5, 2.52, ServerType.TYPE_II),
    "Broadwell18": (32, 32, 42, 25, 1.0, ServerType.TYPE_I),
    "Broadwell20": (56, 256, 153, 12.5, 1.98, ServerType.TYPE_II),
}

# Per-core throughput scores are relative to this architecture
ANCHOR_ARCHITECTURE = "Broadwell18"


def builtin_architectures() -> list[ArchSpec]:
    """
    Get the six reference architectures.

    Cost weights come from the umbrella-type defaults in settings.

    Returns:
        list[ArchSpec]: Architectures in reference order (Haswell10 first)
    """
    return [
        ArchSpec(
            name=name,
            server_type=server_type,
            capacity=ResourceVector(
                cpu_cores=cores, memory_gb=memory, membw_gbps=membw, netbw_gbps=netbw
            ),
            score=score,
        )
        for name, (cores, memory, membw, netbw, score, server_type) in _ARCHITECTURES.items()
    ]


def builtin_architecture(name: str) -> ArchSpec:
    """Get one reference architecture by name."""
    for arch in builtin_architectures():
        if arch.name == name:
            return arch
    raise KeyError(name)


def umbrella_types(archs: list[ArchSpec] | None = None) -> dict[ServerType, list[str]]:
    """
    Group architecture names by umbrella type.

    Args:
        archs: Architectures to group; the built-ins when omitted

    Returns:
        dict: Umbrella type to sorted architecture names
    """
    groups: dict[ServerType, list[str]] = {ServerType.TYPE_I: [], ServerType.TYPE_II: []}
    for arch in archs if archs is not None else builtin_architectures():
        groups[arch.server_type].append(arch.name)
    return {server_type: sorted(names) for server_type, names in groups.items()}
