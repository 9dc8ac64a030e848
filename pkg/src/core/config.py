"""
Configuration module for the fourcycle counting engines.

This module handles loading and validating configuration from JSON files, flat
key=value files and environment variables.
"""

import os
import json
import logging
from fractions import Fraction
from typing import Dict, Any, Optional

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

ENGINES = ["naive", "warmup", "main", "oracle"]
MODES = ["general", "layered"]
REBUILD_POLICIES = ["auto", "fixed", "strict"]
BACKENDS = ["schoolbook", "blocked", "strassen"]
OMEGA_MODELS = ["best", "square", "table"]
WORKLOADS = ["uniform", "hub", "sliding-window"]


def parse_fraction(value: Any) -> Fraction:
    """
    Parse a decimal or p/q string into an exact Fraction.

    Args:
        value: String, int, float or Fraction

    Returns:
        Fraction: Exact value (floats go through their decimal repr)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


class EngineConfig(BaseModel):
    """Engine selection and scheduling configuration."""

    engine: str = Field("main", description="Engine: naive, warmup, main or oracle")
    mode: str = Field("general", description="Stream mode: general or layered")
    strict_deadlines: bool = Field(True, description="Raise DeadlineMissed instead of forcing late work")
    rebuild_policy: str = Field("auto", description="On edge-count drift: auto rebuild, fixed, or strict")
    bootstrap_min: int = Field(64, description="Below this edge count the main engine runs in naive mode")
    budget_multiplier: float = Field(4.0, description="Per-update budget as a multiple of the high threshold")
    transition_slack: int = Field(1, description="Transition deadline as a multiple of the start degree")

    @field_validator('engine')
    @classmethod
    def validate_engine(cls, v):
        """Validate engine name."""
        if v not in ENGINES:
            raise ValueError(f"Engine must be one of {ENGINES}")
        return v

    @field_validator('mode')
    @classmethod
    def validate_mode(cls, v):
        """Validate stream mode."""
        if v not in MODES:
            raise ValueError(f"Mode must be one of {MODES}")
        return v

    @field_validator('rebuild_policy')
    @classmethod
    def validate_rebuild_policy(cls, v):
        """Validate rebuild policy."""
        if v not in REBUILD_POLICIES:
            raise ValueError(f"Rebuild policy must be one of {REBUILD_POLICIES}")
        return v

    @field_validator('bootstrap_min', 'transition_slack')
    @classmethod
    def validate_positive(cls, v):
        """Validate positive integers."""
        if v < 1:
            raise ValueError("Value must be at least 1")
        return v

    @field_validator('budget_multiplier')
    @classmethod
    def validate_multiplier(cls, v):
        """Validate budget multiplier."""
        if v <= 0:
            raise ValueError("Budget multiplier must be positive")
        return v


class MatmulConfig(BaseModel):
    """Matrix product backend configuration."""

    backend: str = Field("blocked", description="Product backend: schoolbook, blocked or strassen")
    block_size: int = Field(64, description="Block edge for the blocked backend")
    strassen_cutoff: int = Field(32, description="Below this size Strassen falls back to blocked")

    @field_validator('backend')
    @classmethod
    def validate_backend(cls, v):
        """Validate backend name."""
        if v not in BACKENDS:
            raise ValueError(f"Backend must be one of {BACKENDS}")
        return v

    @field_validator('block_size', 'strassen_cutoff')
    @classmethod
    def validate_sizes(cls, v):
        """Validate block sizes."""
        if v < 1:
            raise ValueError("Block sizes must be at least 1")
        return v


class ParamsConfig(BaseModel):
    """Exponent parameters and matrix multiplication model."""

    epsilon: str = Field("1/24", description="Class threshold exponent shift")
    epsilon1: str = Field("1/24", description="Chunk size exponent shift")
    epsilon2: str = Field("5/24", description="Chunk sparsity exponent shift")
    delta: str = Field("1/8", description="Phase length exponent shift")
    omega_model: str = Field("best", description="Omega model: best, square or table")
    omega: str = Field("2.371339", description="Square exponent for square/table models")
    reference_edges: Optional[int] = Field(None, description="Fixed reference edge count (None: current m)")
    resolution: str = Field("1/24", description="Grid step for the parameter solver")
    strict_positive: bool = Field(True, description="Solver rejects epsilon = 0")

    @field_validator('epsilon', 'epsilon1', 'epsilon2', 'delta')
    @classmethod
    def validate_exponent(cls, v):
        """Validate exponent range."""
        value = parse_fraction(v)
        if value < 0 or value > Fraction(1, 3):
            raise ValueError("Exponents must lie in [0, 1/3]")
        return str(v)

    @field_validator('omega')
    @classmethod
    def validate_omega(cls, v):
        """Validate square exponent."""
        value = parse_fraction(v)
        if value < 2 or value > 3:
            raise ValueError("Omega must lie in [2, 3]")
        return str(v)

    @field_validator('resolution')
    @classmethod
    def validate_resolution(cls, v):
        """Validate solver resolution."""
        if parse_fraction(v) <= 0:
            raise ValueError("Resolution must be positive")
        return str(v)

    @field_validator('omega_model')
    @classmethod
    def validate_omega_model(cls, v):
        """Validate omega model name."""
        if v not in OMEGA_MODELS:
            raise ValueError(f"Omega model must be one of {OMEGA_MODELS}")
        return v


class WorkloadConfig(BaseModel):
    """Synthetic workload configuration."""

    kind: str = Field("uniform", description="Generator: uniform, hub or sliding-window")
    vertices: int = Field(30, description="Number of general-graph vertices")
    steps: int = Field(1000, description="Number of updates")
    delete_fraction: float = Field(0.3, description="Probability of a deletion step")
    seed: int = Field(0, description="Random seed")
    window: int = Field(16, description="Edge lifetime for the sliding-window generator")

    @field_validator('kind')
    @classmethod
    def validate_kind(cls, v):
        """Validate generator kind."""
        if v not in WORKLOADS:
            raise ValueError(f"Workload kind must be one of {WORKLOADS}")
        return v

    @field_validator('delete_fraction')
    @classmethod
    def validate_delete_fraction(cls, v):
        """Validate delete fraction."""
        if v < 0 or v >= 1:
            raise ValueError("Delete fraction must be in [0, 1)")
        return v


class OutputConfig(BaseModel):
    """Output locations."""

    output_dir: str = Field("output", description="Directory for generated files")
    metrics_path: Optional[str] = Field(None, description="Bench CSV path (None: <output_dir>/bench.csv)")


class SystemConfig(BaseModel):
    """System configuration."""

    engine: EngineConfig = Field(default_factory=EngineConfig)
    matmul: MatmulConfig = Field(default_factory=MatmulConfig)
    params: ParamsConfig = Field(default_factory=ParamsConfig)
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    debug: bool = Field(False, description="Enable debug mode")
    log_level: str = Field("INFO", description="Logging level")

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v


def _coerce(current: Any, value: str) -> Any:
    """Convert a string override to the type of the current value."""
    if isinstance(current, bool):
        return value.lower() in ["true", "1", "yes"]
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if current is None and value.lower() in ["none", ""]:
        return None
    return value


def _merge(config: Dict[str, Any], overrides: Dict[str, Any]) -> None:
    """Merge section dictionaries into config in place."""
    for section, section_config in overrides.items():
        if section in config and isinstance(section_config, dict):
            config[section].update(section_config)
        else:
            config[section] = section_config


def load_config(config_path: str = "configs/config.json") -> Dict[str, Any]:
    """
    Load configuration from JSON file and environment variables.

    Args:
        config_path: Path to configuration file

    Returns:
        dict: Validated configuration dictionary
    """
    # Default configuration
    config = SystemConfig().model_dump()

    # Load from file if exists
    if os.path.exists(config_path):
        try:
            with open(config_path, "r") as f:
                file_config = json.load(f)
            _merge(config, SystemConfig(**file_config).model_dump())
        except Exception as e:
            logger.error(f"Error loading configuration from {config_path}: {str(e)}")
            logger.warning("Using default configuration")

    # Override with environment variables
    # Example: FOURCYCLE_ENGINE_ENGINE=naive
    for section in config:
        if isinstance(config[section], dict):
            for key in config[section]:
                env_var = f"FOURCYCLE_{section.upper()}_{key.upper()}"
                if env_var in os.environ:
                    config[section][key] = _coerce(config[section][key], os.environ[env_var])

    return SystemConfig(**config).model_dump()


def load_flat_config(config_path: str) -> Dict[str, Dict[str, str]]:
    """
    Read a flat ``section.key = value`` file.

    Blank lines and ``#`` comments are ignored. Values stay strings; apply them with
    apply_overrides so they are coerced against the defaults.

    Args:
        config_path: Path to the flat configuration file

    Returns:
        dict: Section -> key -> raw value
    """
    overrides: Dict[str, Dict[str, str]] = {}
    with open(config_path, "r") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line or "." not in line.split("=", 1)[0]:
                raise ValueError(f"{config_path}:{line_number}: expected section.key = value")
            name, value = line.split("=", 1)
            section, key = name.strip().split(".", 1)
            overrides.setdefault(section, {})[key.strip()] = value.strip()
    return overrides


def apply_overrides(config: Dict[str, Any], overrides: Dict[str, Dict[str, Any]]) -> Dict[str, Any]:
    """
    Apply raw overrides to a configuration dictionary and re-validate.

    Args:
        config: Validated configuration dictionary
        overrides: Section -> key -> value (strings are coerced)

    Returns:
        dict: New validated configuration dictionary
    """
    merged = json.loads(json.dumps(config))
    for section, values in overrides.items():
        if section not in merged or not isinstance(merged[section], dict):
            raise ValueError(f"Unknown configuration section: {section}")
        for key, value in values.items():
            if key not in merged[section]:
                raise ValueError(f"Unknown configuration key: {section}.{key}")
            if isinstance(value, str):
                value = _coerce(merged[section][key], value)
            merged[section][key] = value
    return SystemConfig(**merged).model_dump()
