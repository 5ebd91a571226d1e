"""Configuration models and loader for zexp."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationInfo, field_validator

from zexp.zassenhaus import Side

logger = logging.getLogger(__name__)

CONFIG_ENV = "ZEXP_CONFIG"
DEFAULT_CONFIG_PATH = "config/zexp.yaml"


class VerifyBounds(BaseModel):
    xmp_max_m: int = Field(8, ge=1)
    induction_max_m: int = Field(7, ge=2)
    power_max_n: int = Field(8, ge=0)
    appendix_max_m: int = Field(5, ge=1, le=5)
    resum_degree: int = Field(6, ge=0)
    duality_degree: int = Field(6, ge=0)
    bch_degree: int = Field(6, ge=0)
    classical_n_max: int = Field(5, ge=2)
    classical_truncation: int = Field(5, ge=2)

    @field_validator("classical_truncation")
    @classmethod
    def validate_truncation(cls, value: int, info: ValidationInfo) -> int:
        n_max = info.data.get("classical_n_max")
        if n_max is not None and value < n_max:
            raise ValueError(f"classical_truncation ({value}) must be >= classical_n_max ({n_max})")
        return value


class BenchDefaults(BaseModel):
    dims: List[int] = Field(default_factory=lambda: [4])
    degrees: List[int] = Field(default_factory=lambda: [2, 4, 6, 8, 10, 12])
    seed: int = 20160915
    norm: float = Field(0.25, gt=0.0)
    side: Side = Side.RIGHT

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, value: List[int]) -> List[int]:
        if not value or any(dim < 1 for dim in value):
            raise ValueError("dims must be a non-empty list of positive integers")
        return value

    @field_validator("degrees")
    @classmethod
    def validate_degrees(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("degrees must contain at least one truncation degree")
        if any(later <= earlier for earlier, later in zip(value, value[1:])) or value[0] < 0:
            raise ValueError(f"degrees must be non-negative and strictly ascending: {value}")
        return value


class ZexpConfig(BaseModel):
    verify: VerifyBounds = Field(default_factory=VerifyBounds)
    bench: BenchDefaults = Field(default_factory=BenchDefaults)


DEFAULT_CONFIG = ZexpConfig()


def load_config(config_path: Optional[str] = None) -> ZexpConfig:
    """Load settings from YAML, falling back to built-in defaults if absent."""
    path = Path(config_path or os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_PATH))

    if not path.exists():
        if config_path:
            logger.warning("Config file '%s' not found. Using built-in defaults.", path)
        else:
            logger.debug("No config file at '%s'; using built-in defaults", path)
        return DEFAULT_CONFIG

    with path.open("r", encoding="utf-8") as handle:
        try:
            raw = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            logger.error("Failed to parse config file '%s': %s", path, exc)
            raise

    try:
        config = ZexpConfig.model_validate(raw)
    except Exception as exc:
        logger.error("Invalid zexp configuration in '%s': %s", path, exc)
        raise
    logger.info("Loaded configuration from %s", path)
    return config
