#!/usr/bin/env python3
"""
================================================================
⚙️ WORKBENCH CONFIG - Experiment configuration & logging setup
JSON experiment files validated by pydantic, FTL_ environment
overrides via python-dotenv, colored console logging
================================================================
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import colorlog
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from workbench_errors import ConfigError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
ENV_PREFIX = "FTL_"
DEFAULT_BUDGET_CELLS = 10_000_000

ExperimentKind = Literal["carpet", "param", "tangent", "universal", "verify-all"]


def setup_logging(level: str = "INFO") -> None:
    """Install one colored stderr handler on the root logger"""
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(
        '%(log_color)s' + LOG_FORMAT,
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red,bg_white',
        },
    ))
    root = logging.getLogger()
    for old in list(root.handlers):
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))


class OccurrenceConfig(BaseModel):
    """One planted (ℓ, N, k) occurrence"""
    ell: int = Field(ge=0)
    N: int = Field(ge=1)
    k: int = Field(ge=0)


class PlantConfig(BaseModel):
    w_prefix: List[int]
    occurrences: List[OccurrenceConfig]
    base_seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @field_validator('w_prefix')
    @classmethod
    def _letters_positive(cls, value: List[int]) -> List[int]:
        if not value or any(letter < 1 for letter in value):
            raise ValueError("w_prefix must be a nonempty list of letters >= 1")
        return value


class ExperimentConfig(BaseModel):
    """Validated experiment description shared by every subcommand"""
    kind: ExperimentKind = "verify-all"
    n: int = 4
    seed: int = Field(default=7, ge=0, lt=2 ** 64)
    depth: int = Field(default=3, ge=0)
    budget_cells: int = Field(default=DEFAULT_BUDGET_CELLS, gt=0)
    out_dir: str = "out"
    log_level: str = "INFO"
    plant: Optional[PlantConfig] = None
    plant_file: Optional[str] = None
    options: Dict[str, Any] = Field(default_factory=dict)

    @field_validator('n')
    @classmethod
    def _even_base(cls, value: int) -> int:
        if value < 4 or value % 2:
            raise ValueError("n must be an even integer >= 4")
        return value

    @field_validator('log_level')
    @classmethod
    def _known_level(cls, value: str) -> str:
        if value.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value}")
        return value.upper()

    @model_validator(mode='after')
    def _referenced_files_exist(self) -> 'ExperimentConfig':
        if self.plant_file is not None and not Path(self.plant_file).is_file():
            raise ValueError(f"plant_file {self.plant_file} does not exist")
        for key, value in self.options.items():
            if key.endswith("_file") and not Path(str(value)).is_file():
                raise ValueError(f"option {key}: file {value} does not exist")
        return self


def _strip_comments(data: Any) -> Any:
    """Drop `_comment`, `_note...` style keys at every level"""
    if isinstance(data, dict):
        return {k: _strip_comments(v) for k, v in data.items() if not str(k).startswith('_')}
    if isinstance(data, list):
        return [_strip_comments(v) for v in data]
    return data


def env_overrides() -> Dict[str, Any]:
    """Read FTL_* variables (after loading .env if present)"""
    load_dotenv()
    overrides: Dict[str, Any] = {}
    mapping = {
        "SEED": ("seed", int),
        "N": ("n", int),
        "BUDGET_CELLS": ("budget_cells", int),
        "OUT_DIR": ("out_dir", str),
        "LOG_LEVEL": ("log_level", str),
    }
    for suffix, (field, cast) in mapping.items():
        raw = os.environ.get(ENV_PREFIX + suffix)
        if raw is None or raw == "":
            continue
        try:
            overrides[field] = cast(raw)
        except ValueError as e:
            raise ConfigError(f"{ENV_PREFIX}{suffix}={raw!r} is not valid: {e}")
    return overrides


def read_json_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return _strip_comments(data)


def build_config(file_path: Optional[str] = None,
                 cli_values: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Merge config sources: file < environment < CLI flags.

    Raises ConfigError on any validation failure; nothing is written
    before this returns.
    """
    merged: Dict[str, Any] = {}
    if file_path:
        merged.update(read_json_file(file_path))
    merged.update(env_overrides())
    for key, value in (cli_values or {}).items():
        if value is not None:
            merged[key] = value
    try:
        config = ExperimentConfig(**merged)
    except ValidationError as e:
        logger.error(f"❌ Failed to load config: {e}")
        raise ConfigError(f"invalid configuration: {e.errors(include_url=False)}")

    if config.plant is None and config.plant_file:
        try:
            config.plant = PlantConfig(**read_json_file(config.plant_file))
        except ValidationError as e:
            raise ConfigError(f"invalid plant file {config.plant_file}: {e.errors(include_url=False)}")
    logger.debug(f"Config resolved: {config.model_dump()}")
    return config
