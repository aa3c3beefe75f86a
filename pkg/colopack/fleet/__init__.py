"""Fleet inventory: reference architectures and fleet file I/O."""

from colopack.fleet.architectures import (
    ANCHOR_ARCHITECTURE,
    builtin_architecture,
    builtin_architectures,
    umbrella_types,
)
from colopack.fleet.loader import fleet_document, load_fleet, parse_fleet, save_fleet

__all__ = [
    "ANCHOR_ARCHITECTURE",
    "builtin_architecture",
    "builtin_architectures",
    "fleet_document",
    "load_fleet",
    "parse_fleet",
    "save_fleet",
    "umbrella_types",
]
