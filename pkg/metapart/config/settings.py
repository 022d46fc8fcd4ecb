from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator

from metapart.core.errors import ConfigError


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "INFO"

    # Compute
    N_JOBS: int = Field(1, ge=1, description="pairwise distance workers")
    PROGRESS_EVERY: int = Field(500, ge=1, description="sweeps between progress lines")
    MAX_CHAIN_STEPS: int = Field(2_000_000_000, ge=1, description="n*s*(t0+m*thinning) budget")
    BANDWIDTH_PAIRS: int = Field(1000, ge=1, description="median heuristic subsample")

    # Reports
    SVG_HASH_SALT: str = "metapart"

    @field_validator('LOG_LEVEL')
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown LOG_LEVEL {v}")
        return v

    model_config = SettingsConfigDict(
        env_prefix='METAPART_', env_file='.env', env_file_encoding='utf-8', extra='ignore'
    )


try:
    settings = Settings()
except Exception as e:
    print(f"FATAL: Configuration loading failed. Check METAPART_* environment / .env. Error: {e}")
    raise ConfigError(str(e)) from e
