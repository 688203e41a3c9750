from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ACTIMETRY_",
        extra="ignore",
    )

    APP_NAME: str = "Actimetry"
    ENVIRONMENT: str = Field("local", description="Environment name e.g. local, staging, production")
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Overrides the CLI default output directory (ACTIMETRY_OUTPUT_DIR)
    OUTPUT_DIR: Path = Path("actimetry-output")
    WORKERS: int = Field(1, ge=1, description="Recordings processed in parallel")

    # Guard for uploads to the HTTP service (5 s samples: 60 days ~ 1M rows)
    MAX_UPLOAD_ROWS: int = 2_000_000


@lru_cache
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
