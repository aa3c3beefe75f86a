"""Configuration management using Pydantic Settings.

Every tunable default of the pipeline lives here: percentile and window for
telemetry, k-means knobs, solver budget and tolerance, the umbrella-type cost
weights, and the worker cap shared by all parallel stages.

Configuration Sources (in priority order):
    1. Environment variables prefixed with ``COLOPACK_`` (highest priority)
    2. .env file in the working directory
    3. Default values defined in Settings class

Environment Variables:
    All settings can be configured via environment variables using the
    ``COLOPACK_`` prefix and the uppercased field name. For example:
    - COLOPACK_THREADS -> threads
    - COLOPACK_LOG_LEVEL -> log_level
    - COLOPACK_COST_WEIGHT_TYPE_II -> cost_weight_type_ii

Cost weights:
    The relative cost of a Type I versus a Type II server is not published
    data. The defaults (1.0 and 2.5) are a calibration knob; fleet files may
    override them per architecture.

Usage:
    ```python
    from colopack.config import settings

    workers = settings.threads
    preset = settings.weights_for(LimitMode.P99_SENS)
    ```
"""

from typing import TYPE_CHECKING

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

if TYPE_CHECKING:
    from colopack.models.common import LimitMode, ServerType
    from colopack.models.solver import GoalWeights


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    Attributes:
        threads (int): Upper bound on worker threads for any parallel stage.
        log_level (str): Logging level for the loguru sink.
        percentile (int): Default percentile for usage limits.
        window_days (int): Trailing window, in days, for percentile limits.
        minute_seconds (int): Width of an aggregation bucket in seconds.
        k (int): Default number of workload clusters.
        seed (int): Default seed propagated to every randomized stage.
        max_moves (int): Default packer move budget.
        cost_weight_type_i (float): Relative cost of a Type I server.
        cost_weight_type_ii (float): Relative cost of a Type II server.
        kmeans_max_iter (int): Lloyd iteration cap.
        kmeans_tol (float): Lloyd convergence tolerance, relative to the feature variance.
        kmeans_n_init (int): k-means++ starts per fit; the lowest WCSS wins.
        improvement_eps (float): Minimum objective decrease for a move to count.
        repack_width (int): Partner hosts considered by a repack move.
        repack_exact_tasks (int): Largest repack group packed by enumeration instead of first fit.
        brute_force_max_tasks (int): Task guard for the exhaustive oracle.
        brute_force_max_hosts (int): Host guard for the exhaustive oracle.
    """

    threads: int = Field(default=4, ge=1)
    log_level: str = "INFO"

    # Telemetry
    percentile: int = Field(default=99, ge=1, le=100)
    window_days: int = Field(default=7, ge=1)
    minute_seconds: int = 60

    # Clustering
    k: int = Field(default=3, ge=1)
    kmeans_max_iter: int = 300
    kmeans_tol: float = 1e-9
    kmeans_n_init: int = Field(default=4, ge=1)

    # Solver
    seed: int = 0
    max_moves: int = Field(default=400, ge=0)
    improvement_eps: float = 1e-9
    repack_width: int = Field(default=2, ge=0)
    repack_exact_tasks: int = Field(default=8, ge=0)
    brute_force_max_tasks: int = 8
    brute_force_max_hosts: int = 4

    # Umbrella-type cost weights (not published data)
    cost_weight_type_i: float = Field(default=1.0, gt=0)
    cost_weight_type_ii: float = Field(default=2.5, gt=0)

    # Goal weights shared by every preset; only w_sens differs per mode
    w_hosts: float = 1.0
    w_cost: float = 1.0
    w_frag: float = 0.1
    w_sens: float = 10.0

    model_config = SettingsConfigDict(
        env_prefix="COLOPACK_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def window_seconds(self) -> int:
        """Trailing percentile window in seconds."""
        return self.window_days * 86400

    def cost_weight_for(self, server_type: "ServerType") -> float:
        """
        Get the default cost weight of an umbrella server type.

        Args:
            server_type: Umbrella type of the architecture

        Returns:
            float: Relative TCO unit for that type
        """
        from colopack.models.common import ServerType

        if server_type == ServerType.TYPE_II:
            return self.cost_weight_type_ii
        return self.cost_weight_type_i

    def weights_for(self, mode: "LimitMode") -> "GoalWeights":
        """
        Get the goal-weight preset of a limit mode.

        Sensitivity only carries weight under P99Sens; every other mode shares
        the efficiency-only preset.

        Args:
            mode: Limit mode the solver runs under

        Returns:
            GoalWeights: Preset weights for the mode
        """
        from colopack.models.common import LimitMode
        from colopack.models.solver import GoalWeights

        w_sens = self.w_sens if mode == LimitMode.P99_SENS else 0.0
        return GoalWeights(
            w_hosts=self.w_hosts,
            w_cost=self.w_cost,
            w_frag=self.w_frag,
            w_sens=w_sens,
        )


# Global settings instance
settings = Settings()
