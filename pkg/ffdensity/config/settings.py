"""Environment-driven settings"""
import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from ffdensity.constants import (
    DEFAULT_MAX_BOX,
    DEFAULT_MAX_BRUTEFORCE,
    DEFAULT_MAX_ENUM,
    DEFAULT_MAX_EXACT_BITS,
    DEFAULT_SEED,
)
from ffdensity.exceptions import UsageError

ENV_PREFIX = "FFDENSITY_"


class Settings(BaseModel):
    """Caps, seed and logging sinks"""

    max_enum: int = Field(default=DEFAULT_MAX_ENUM, gt=0, description="Tuple-space cap for exhaustive runs")
    max_box: int = Field(default=DEFAULT_MAX_BOX, gt=0, description="Cap on q^l(D) for box enumeration")
    max_bruteforce: int = Field(default=DEFAULT_MAX_BRUTEFORCE, gt=0, description="Cap on local censuses")
    max_exact_bits: int = Field(default=DEFAULT_MAX_EXACT_BITS, gt=0, description="Cap on exact product size")
    default_seed: int = Field(default=DEFAULT_SEED, ge=0)
    log_level: str = Field(default="ERROR")
    log_dir: str = Field(default="logs")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"Unknown log level: {value}")
        return value


def _read_env() -> dict:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip() != "":
            values[name] = raw.strip()
    return values


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings from the environment (and a .env file if present)"""
    load_dotenv()
    try:
        return Settings(**_read_env())
    except ValidationError as e:
        raise UsageError(f"Invalid FFDENSITY_* environment setting: {e}") from e


def reset_settings() -> None:
    """Forget cached settings so the next call re-reads the environment"""
    get_settings.cache_clear()
