import logging
from functools import lru_cache
from typing import Literal

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

log = logging.getLogger(__name__)


class Settings(BaseSettings):
    environment: Literal["dev", "prod"] = "dev"

    # Accept either GLMOS_LOG_LEVEL or LOG_LEVEL (common in CI runners)
    log_level: str | None = Field(
        default=None,
        validation_alias=AliasChoices("GLMOS_LOG_LEVEL", "LOG_LEVEL"),
    )

    # Worker count for cross-validation folds (joblib semantics, -1 = all cores)
    n_jobs: int = Field(
        default=1,
        validation_alias=AliasChoices("GLMOS_N_JOBS", "N_JOBS"),
    )

    # |eta| above this at convergence is reported as quasi-separation
    max_abs_eta_warning: float = Field(
        default=30.0,
        gt=0,
        validation_alias=AliasChoices("GLMOS_MAX_ABS_ETA_WARNING", "MAX_ABS_ETA_WARNING"),
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="GLMOS_",  # all app vars should start with GLMOS_
        extra="ignore",
    )


@lru_cache
def get_settings() -> Settings:
    log.info("Loading configuration settings from the environment...")
    return Settings()
