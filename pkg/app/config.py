# app/config.py
import os
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .core.errors import InputError

# Load environment variables
load_dotenv()


class EngineLimits(BaseModel):
    """Caps shared by every Gröbner computation of one run"""

    max_pairs: int = Field(default=50_000, gt=0)
    max_degree: int = Field(default=64, gt=0)
    cache_size: int = Field(default=256, gt=0)

    model_config = {"frozen": True}


class Settings(BaseModel):
    limits: EngineLimits = EngineLimits()
    max_iter: int = Field(default=8, ge=0)
    levels: int = Field(default=3, ge=0)
    spot_checks: int = Field(default=32, ge=0)
    seed: int = 0
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"

    model_config = {"frozen": True}


def _pick(value: Optional[int], name: str, default: int) -> int:
    return value if value is not None else _env_int(name, default)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(
            f"{name} must be an integer, got {raw!r}", stage="environment", name=name
        )


def get_settings(
    max_pairs: Optional[int] = None,
    max_degree: Optional[int] = None,
    max_iter: Optional[int] = None,
    levels: Optional[int] = None,
) -> Settings:
    """
    Resolve settings: explicit arguments (CLI flags) win over the environment,
    which wins over the defaults.
    """
    try:
        limits = EngineLimits(
            max_pairs=_pick(max_pairs, "PRISMFORGE_MAX_PAIRS", 50_000),
            max_degree=_pick(max_degree, "PRISMFORGE_MAX_DEGREE", 64),
            cache_size=_env_int("PRISMFORGE_CACHE_SIZE", 256),
        )
        return Settings(
            limits=limits,
            max_iter=_pick(max_iter, "PRISMFORGE_MAX_ITER", 8),
            levels=_pick(levels, "PRISMFORGE_LEVELS", 3),
            spot_checks=_env_int("PRISMFORGE_SPOT_CHECKS", 32),
            seed=_env_int("PRISMFORGE_SEED", 0),
            log_level=os.getenv("PRISMFORGE_LOG_LEVEL", "WARNING").upper(),
        )
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        raise InputError(f"invalid settings: {problems}", stage="settings")
