"""Cross-architecture normalization of sensitivity scores.

A score measured on a base architecture is carried to a target architecture
by the score ratio for CPU and by the per-core bandwidth ratio
for memory and network bandwidth.
"""

from colopack.exceptions import NormalizationError
from colopack.models.fleet import ArchSpec
from colopack.models.sensitivity import SensitivityProfile, SensitivityScores


def check_arch(arch: ArchSpec) -> None:
    """
    Raises:
        NormalizationError: Zero score, cores or bandwidth
    """
    capacity = arch.capacity
    for label, value in (
        ("score", arch.score),
        ("cores", capacity.cpu_cores),
        ("membw", capacity.membw_gbps),
        ("netbw", capacity.netbw_gbps),
    ):
        if value <= 0:
            raise NormalizationError(
                f"architecture '{arch.name}' has non-positive {label}", arch=arch.name
            )


def normalize(
    profile: SensitivityProfile, target: ArchSpec, base: ArchSpec
) -> SensitivityScores:
    """
    Carry a profile from its base architecture to a target architecture.

    Args:
        profile: Scores measured on ``base``
        target: Architecture to express the scores on
        base: The profile's measurement architecture

    Returns:
        SensitivityScores: Scores on ``target``; identical to the profile when
        target is the base

    Raises:
        NormalizationError: Base mismatch, or an architecture with a zero
            score, core count or bandwidth
    """
    if base.name != profile.base_arch:
        raise NormalizationError(
            f"profile measured on '{profile.base_arch}' normalized from '{base.name}'"
        )
    check_arch(base)
    check_arch(target)
    if target.name == base.name:
        return profile.scores
    return SensitivityScores(
        cpu=profile.cpu * base.score / target.score,
        membw=profile.membw * base.membw_per_core / target.membw_per_core,
        netbw=profile.netbw * base.netbw_per_core / target.netbw_per_core,
    )


def rebase(profile: SensitivityProfile, target: ArchSpec, base: ArchSpec) -> SensitivityProfile:
    """Express a profile as if it had been measured on ``target``."""
    scores = normalize(profile, target, base)
    return SensitivityProfile(
        base_arch=target.name, cpu=scores.cpu, membw=scores.membw, netbw=scores.netbw
    )
