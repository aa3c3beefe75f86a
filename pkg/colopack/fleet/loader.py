"""Fleet file I/O.

A fleet file is a JSON document with top-level keys ``architectures``,
``hosts``, ``tasks`` and ``assignment``.
"""

import math
from pathlib import Path
from typing import Any

from loguru import logger

from colopack.exceptions import FleetParseError, InvalidCapacityError
from colopack.models.fleet import Fleet
from colopack.utils.documents import read_json, validate_document, write_json

_VECTOR_FIELDS = ("cpu_cores", "memory_gb", "membw_gbps", "netbw_gbps")


def _check_vector(owner: str, field: str, vector: Any) -> None:
    if not isinstance(vector, dict):
        return
    for name in _VECTOR_FIELDS:
        value = vector.get(name)
        if isinstance(value, bool) or not isinstance(value, int | float):
            continue
        if not math.isfinite(value) or value < 0:
            raise InvalidCapacityError(
                f"{owner}: {field}.{name} must be finite and non-negative, got {value}",
                owner=owner,
            )


def check_quantities(data: Any) -> None:
    """
    Reject negative or non-finite resource quantities in a raw fleet document.

    Runs before schema validation so these surface as capacity errors rather
    than generic parse errors.

    Raises:
        InvalidCapacityError: On the first offending quantity
    """
    if not isinstance(data, dict):
        raise FleetParseError("fleet document must be a JSON object")
    for arch in data.get("architectures") or []:
        if not isinstance(arch, dict):
            continue
        owner = f"architecture '{arch.get('name')}'"
        _check_vector(owner, "capacity", arch.get("capacity"))
        score = arch.get("score")
        if isinstance(score, int | float) and not (math.isfinite(score) and score > 0):
            raise InvalidCapacityError(f"{owner}: score must be positive, got {score}")
    for task in data.get("tasks") or []:
        if not isinstance(task, dict):
            continue
        owner = f"task '{task.get('id')}'"
        _check_vector(owner, "requested", task.get("requested"))
        _check_vector(owner, "p99", task.get("p99"))


def parse_fleet(data: Any, source: str = "fleet") -> Fleet:
    """
    Validate a raw fleet document.

    Raises:
        FleetParseError: Malformed document
        InvalidCapacityError: Negative, non-finite or zero capacity
        DuplicateIdError: Repeated id in a collection
        DanglingReferenceError: Unresolvable reference
    """
    check_quantities(data)
    return validate_document(data, Fleet, source=source)


def load_fleet(path: Path) -> Fleet:
    """
    Load and cross-reference a fleet file.

    Args:
        path: Fleet JSON file

    Returns:
        Fleet: Validated fleet; its assignment is the solver's starting point
    """
    fleet = parse_fleet(read_json(path), source=str(path))
    logger.debug(
        "Fleet loaded",
        path=str(path),
        architectures=len(fleet.architectures),
        hosts=len(fleet.hosts),
        tasks=len(fleet.tasks),
    )
    return fleet


def fleet_document(fleet: Fleet) -> dict[str, Any]:
    """Plain-data form of a fleet with every collection sorted by id."""
    return {
        "architectures": [
            a.model_dump(mode="json") for a in sorted(fleet.architectures, key=lambda a: a.name)
        ],
        "hosts": [h.model_dump(mode="json") for h in sorted(fleet.hosts, key=lambda h: h.id)],
        "tasks": [
            t.model_dump(mode="json", exclude_none=True)
            for t in sorted(fleet.tasks, key=lambda t: t.id)
        ],
        "assignment": dict(sorted(fleet.assignment.items())),
    }


def save_fleet(fleet: Fleet, path: Path) -> Path:
    """
    Write a fleet file deterministically.

    Args:
        fleet: Fleet to write
        path: Destination file

    Returns:
        Path: The written path
    """
    return write_json(path, fleet_document(fleet))
