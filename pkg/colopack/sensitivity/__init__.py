"""Sensitivity scores: normalization across architectures and the lookup table."""

from colopack.sensitivity.normalize import normalize, rebase
from colopack.sensitivity.profiles import (
    builtin_profiles,
    cluster_profiles,
    load_profiles,
    save_profiles,
)
from colopack.sensitivity.table import (
    build_table,
    host_sensitivity_load,
    load_table,
    save_table,
    sensitivity_loads,
)

__all__ = [
    "build_table",
    "builtin_profiles",
    "cluster_profiles",
    "host_sensitivity_load",
    "load_profiles",
    "load_table",
    "normalize",
    "rebase",
    "save_profiles",
    "save_table",
    "sensitivity_loads",
]
