# app/core/config.py
from functools import lru_cache
from typing import Literal
import os
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

EnvName = Literal["development", "production"]
ReportFormat = Literal["text", "json"]


def _env_file_for(app_env: EnvName) -> str:
    return ".env.development" if app_env == "development" else ".env.production"


class Settings(BaseSettings):
    # -------- Core --------
    APP_ENV: EnvName = "development"
    APP_NAME: str = "IOMPPWorkbench"
    DEBUG: bool = False

    # -------- Exploration --------
    NODE_LIMIT: int = Field(default=5_000_000, ge=1)
    SYMMETRY_REDUCTION: bool = False        # plain configurations only

    # -------- Verification --------
    DEFAULT_MAX_N: int = Field(default=3, ge=2)

    # -------- Random runs --------
    RANDOM_MAX_STEPS: int = Field(default=1_000_000, ge=0)
    DEFAULT_SEED: int = 0

    # -------- Files --------
    PROTOCOLS_DIR: str = "protocols"
    REPORT_FORMAT: ReportFormat = "text"

    model_config = SettingsConfigDict(
        env_file=None,
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache
def get_settings() -> Settings:
    """
    Load settings from .env.development or .env.production depending on
    APP_ENV, then override with real environment variables.
    """
    app_env: EnvName = os.getenv("APP_ENV", "development")
    env_file = _env_file_for(app_env)
    return Settings(_env_file=env_file, _env_file_encoding="utf-8")
