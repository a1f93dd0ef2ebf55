from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

TOOL_NAME = "hoconv-lab"
VERSION = "0.1.0"


class RuntimeSettings(BaseSettings):
    """Process-level knobs; none of them changes output bytes."""

    threads: int = Field(default=1, ge=1, description="Worker threads for seed sweeps (HOCONV_THREADS)")
    log_level: str = Field(default="INFO", description="Logging level (DEBUG, INFO, WARNING, ERROR)")
    out_dir: str = Field(default="runs", description="Default output directory")

    model_config = SettingsConfigDict(env_prefix="HOCONV_", extra="ignore")


class AppSettings(BaseSettings):
    """Main application settings."""

    logfire_environment: str = Field(
        default="dev",
        description="Logfire environment name"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


class Settings(BaseSettings):
    """Combined application settings."""

    runtime: RuntimeSettings = Field(default_factory=RuntimeSettings)
    app: AppSettings = Field(default_factory=AppSettings)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="",
        extra="ignore"
    )


# Create global settings instance
settings = Settings()
