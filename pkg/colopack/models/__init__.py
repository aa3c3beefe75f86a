"""Pydantic models for every pipeline stage.

Models are organized by domain area for easy maintenance.

Structure:
- common: Resource vectors, enums and the frozen base model
- fleet: Architectures, hosts, task profiles, the fleet and its assignment
- telemetry: Usage samples and percentile limits
- clustering: Feature rows, k-means models and cluster reports
- sensitivity: Sensitivity scores, profiles and the lookup table
- solver: Goal weights, solver configuration, moves and results
- metrics: Fragmentation, interference and the metrics report
- synth: Synthetic fleet specification
- errors: Status documents
"""

# Common models
from colopack.models.common import (
    Dimension,
    FrozenModel,
    LimitMode,
    Resource,
    ResourceVector,
    ServerType,
)

# Domain models
from colopack.models.clustering import (
    ClusterModel,
    ClusterReport,
    FeatureRow,
    FleetClustering,
    Standardization,
)
from colopack.models.errors import ErrorResponse, ErrorStatus
from colopack.models.fleet import ArchSpec, Assignment, Fleet, Host, TaskProfile
from colopack.models.metrics import Fragmentation, Interference, MetricsReport
from colopack.models.sensitivity import (
    CandidateProfile,
    SensitivityProfile,
    SensitivityScores,
    SensitivityTable,
)
from colopack.models.solver import (
    GoalWeights,
    Move,
    RelocateMove,
    SolveResult,
    SolverConfig,
    SolveStats,
    SwapMove,
)
from colopack.models.synth import GeneratorSpec, UtilizationProfile
from colopack.models.telemetry import PercentileDocument, PercentileLimits, UsageSample

__all__ = [
    "ArchSpec",
    "Assignment",
    "CandidateProfile",
    "ClusterModel",
    "ClusterReport",
    "Dimension",
    "ErrorResponse",
    "ErrorStatus",
    "FeatureRow",
    "Fleet",
    "FleetClustering",
    "Fragmentation",
    "FrozenModel",
    "GeneratorSpec",
    "GoalWeights",
    "Host",
    "Interference",
    "LimitMode",
    "MetricsReport",
    "Move",
    "PercentileDocument",
    "PercentileLimits",
    "RelocateMove",
    "Resource",
    "ResourceVector",
    "SensitivityProfile",
    "SensitivityScores",
    "SensitivityTable",
    "ServerType",
    "SolveResult",
    "SolveStats",
    "SolverConfig",
    "Standardization",
    "SwapMove",
    "TaskProfile",
    "UsageSample",
    "UtilizationProfile",
]
