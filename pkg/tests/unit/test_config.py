"""Unit tests for settings and logging configuration"""

import logging

import pytest

from ffdensity.config.logging import setup_logging
from ffdensity.config.settings import Settings, get_settings, reset_settings
from ffdensity.constants import DEFAULT_MAX_ENUM, DEFAULT_SEED
from ffdensity.exceptions import UsageError


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Clear FFDENSITY_* variables and the settings cache around each test"""
    for name in Settings.model_fields:
        monkeypatch.delenv(f"FFDENSITY_{name.upper()}", raising=False)
    reset_settings()
    yield
    reset_settings()


class TestSettings:
    """Tests for get_settings"""

    def test_defaults(self):
        """Test the documented defaults"""
        settings = get_settings()
        assert settings.default_seed == DEFAULT_SEED
        assert settings.max_enum == DEFAULT_MAX_ENUM
        assert settings.log_level == "ERROR"

    def test_environment_override(self, monkeypatch):
        """Test FFDENSITY_MAX_ENUM overrides the enumeration cap"""
        monkeypatch.setenv("FFDENSITY_MAX_ENUM", "4096")
        monkeypatch.setenv("FFDENSITY_LOG_LEVEL", "debug")
        reset_settings()
        settings = get_settings()
        assert settings.max_enum == 4096
        assert settings.log_level == "DEBUG"

    def test_cached(self):
        """Test settings are read once until reset"""
        assert get_settings() is get_settings()

    @pytest.mark.parametrize("name,value", [("FFDENSITY_MAX_ENUM", "-1"), ("FFDENSITY_MAX_BOX", "lots"),
                                            ("FFDENSITY_LOG_LEVEL", "CHATTY")])
    def test_invalid_environment(self, monkeypatch, name, value):
        """Test bad environment values are usage errors"""
        monkeypatch.setenv(name, value)
        reset_settings()
        with pytest.raises(UsageError):
            get_settings()


class TestLogging:
    """Tests for setup_logging"""

    def test_handlers(self, tmp_path):
        """Test a rotating file handler and a stderr console handler"""
        root = setup_logging("INFO", str(tmp_path))
        try:
            kinds = sorted(type(h).__name__ for h in root.handlers)
            assert kinds == ["RotatingFileHandler", "StreamHandler"]
            console = next(h for h in root.handlers if type(h) is logging.StreamHandler)
            assert console.level == logging.INFO
            logging.getLogger("ffdensity.test").debug("file only")
            for h in root.handlers:
                h.flush()
            assert "file only" in (tmp_path / "ffdensity.log").read_text()
        finally:
            for h in root.handlers[:]:
                h.close()
                root.removeHandler(h)

    def test_repeat_replaces_handlers(self, tmp_path):
        """Test calling twice does not duplicate handlers"""
        setup_logging("WARNING", str(tmp_path))
        root = setup_logging("WARNING", str(tmp_path))
        try:
            assert len(root.handlers) == 2
        finally:
            for h in root.handlers[:]:
                h.close()
                root.removeHandler(h)
