"""Settings configuration for the closed-loop learning harness."""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    environment: str = Field(default="development", description="Environment label for logging")
    log_level: str = Field(default="INFO", description="Root log level for CLI commands")
    log_dir: str = Field(default="logs", description="Directory for timestamped log files")

    # Output
    output_root: str = Field(default="runs", description="Default parent directory for trial artifacts")

    # Trials
    default_preset: str = Field(default="sim16", description="Preset used when a command does not name one")
    sweep_workers: int = Field(
        default=0,
        ge=0,
        description="Worker processes for sweeps (0 runs cells sequentially in-process)",
    )
    off_track_limit: Optional[int] = Field(
        default=None,
        gt=0,
        description="Override for consecutive off-track steps before a trial is aborted",
    )


# Singleton instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create settings singleton."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
