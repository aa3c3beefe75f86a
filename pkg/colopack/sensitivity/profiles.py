"""Candidate service profiles and their merge into per-cluster profiles."""

import json
from importlib.resources import files
from pathlib import Path
from typing import Any

from pydantic import TypeAdapter, ValidationError

from colopack.exceptions import DanglingReferenceError, FleetParseError, MissingProfileError
from colopack.fleet.architectures import builtin_architectures
from colopack.models.fleet import ArchSpec
from colopack.models.sensitivity import CandidateProfile, SensitivityProfile
from colopack.sensitivity.normalize import rebase
from colopack.utils.documents import read_json, write_json
from colopack.utils.error_formatter import describe_validation_error

_CANDIDATES = TypeAdapter(list[CandidateProfile])


def parse_profiles(data: Any, source: str = "profiles") -> list[CandidateProfile]:
    try:
        return _CANDIDATES.validate_python(data)
    except ValidationError as e:
        raise FleetParseError(f"{source}: {describe_validation_error(e)}", path=source) from e


def builtin_profiles() -> list[CandidateProfile]:
    """The six shipped candidate services (two per cluster)."""
    text = files("colopack.sensitivity").joinpath("data/candidates.json").read_text("utf-8")
    return parse_profiles(json.loads(text), source="builtin candidates")


def load_profiles(path: Path) -> list[CandidateProfile]:
    return parse_profiles(read_json(path), source=str(path))


def save_profiles(candidates: list[CandidateProfile], path: Path) -> Path:
    return write_json(path, [c.model_dump(mode="json") for c in candidates])


def cluster_profiles(
    candidates: list[CandidateProfile], archs: list[ArchSpec] | None = None
) -> dict[str, SensitivityProfile]:
    """
    Merge candidates of the same cluster into one conservative profile.

    Candidates of a cluster are expressed on the base architecture of the
    first candidate by service name, then combined by component-wise maximum.

    Args:
        candidates: Candidate services with cluster labels
        archs: Architectures the bases resolve against; the built-ins when omitted

    Returns:
        dict: Cluster label to merged profile

    Raises:
        MissingProfileError: No candidates
        DanglingReferenceError: A candidate's base architecture is unknown
    """
    if not candidates:
        raise MissingProfileError("no candidate profiles given")
    by_name = {a.name: a for a in (archs if archs is not None else builtin_architectures())}
    groups: dict[str, list[CandidateProfile]] = {}
    for candidate in sorted(candidates, key=lambda c: c.service):
        if candidate.base_arch not in by_name:
            raise DanglingReferenceError("profile->arch", candidate.service, candidate.base_arch)
        groups.setdefault(candidate.cluster_label, []).append(candidate)

    merged: dict[str, SensitivityProfile] = {}
    for label, members in sorted(groups.items()):
        common = by_name[members[0].base_arch]
        rebased = [rebase(m.profile, common, by_name[m.base_arch]) for m in members]
        merged[label] = SensitivityProfile(
            base_arch=common.name,
            cpu=max(p.cpu for p in rebased),
            membw=max(p.membw for p in rebased),
            netbw=max(p.netbw for p in rebased),
        )
    return merged
