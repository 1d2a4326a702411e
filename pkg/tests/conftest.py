import pytest

from src.config.settings import reset_settings


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Point log and output directories at tmp_path and drop cached settings around each test."""
    monkeypatch.setenv("LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("OUTPUT_ROOT", str(tmp_path / "runs"))
    monkeypatch.setenv("SWEEP_WORKERS", "0")
    monkeypatch.delenv("OFF_TRACK_LIMIT", raising=False)
    reset_settings()
    yield
    reset_settings()
