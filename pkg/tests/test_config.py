"""Tests for configuration module."""

import pytest
from pydantic_settings import SettingsConfigDict

from colopack.models.common import LimitMode, ServerType


def test_config_imports():
    """Test that config module can be imported."""
    from colopack.config import settings

    assert settings is not None


def test_environment_loaded():
    """Test that values set by conftest.py are picked up."""
    from colopack.config import settings

    assert settings.log_level == "ERROR"
    assert settings.threads == 2


def test_telemetry_defaults():
    """Test percentile and window defaults."""
    from colopack.config import settings

    assert settings.percentile == 99
    assert settings.window_days == 7
    assert settings.window_seconds == 7 * 86400
    assert settings.minute_seconds == 60


def test_solver_defaults():
    """Test packer budget and clustering defaults."""
    from colopack.config import settings

    assert settings.max_moves == 400
    assert settings.k == 3
    assert settings.kmeans_max_iter == 300
    assert settings.kmeans_tol == 1e-9
    assert settings.improvement_eps == 1e-9


def test_cost_weights():
    """Test umbrella-type cost weight lookup."""
    from colopack.config import settings

    assert settings.cost_weight_for(ServerType.TYPE_I) == 1.0
    assert settings.cost_weight_for(ServerType.TYPE_II) == 2.5


@pytest.mark.parametrize(
    "mode", [LimitMode.ORIGINAL, LimitMode.P99_CPU, LimitMode.P99_MEM, LimitMode.P99]
)
def test_efficiency_presets(mode):
    """Test that every mode but P99Sens ignores sensitivity."""
    from colopack.config import settings

    weights = settings.weights_for(mode)
    assert (weights.w_hosts, weights.w_cost, weights.w_frag, weights.w_sens) == (
        1.0,
        1.0,
        0.1,
        0.0,
    )


def test_sensitivity_preset():
    """Test the P99Sens preset."""
    from colopack.config import settings

    weights = settings.weights_for(LimitMode.P99_SENS)
    assert weights.w_sens == 10.0
    assert weights.w_hosts == 1.0


def test_environment_override(monkeypatch):
    """Test that environment variables override defaults."""
    from colopack.config import Settings

    class TestSettings(Settings):
        model_config = SettingsConfigDict(env_prefix="COLOPACK_", env_file=None, extra="ignore")

    monkeypatch.setenv("COLOPACK_MAX_MOVES", "7")
    monkeypatch.setenv("COLOPACK_COST_WEIGHT_TYPE_II", "4")

    overridden = TestSettings()
    assert overridden.max_moves == 7
    assert overridden.cost_weight_for(ServerType.TYPE_II) == 4.0


def test_config_validation(monkeypatch):
    """Test that out-of-range values are rejected."""
    from pydantic import ValidationError

    from colopack.config import Settings

    monkeypatch.setenv("COLOPACK_THREADS", "0")
    with pytest.raises(ValidationError):
        Settings(_env_file=None)  # type: ignore[call-arg]
