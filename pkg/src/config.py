"""
Configuration settings for the coordinate-descent solvers and benchmark harness.
"""

from pydantic import BaseModel, ConfigDict, Field
from typing import Any, Dict
from pathlib import Path
import logging
import toml
import os

logger = logging.getLogger(__name__)

# config.toml lives at the repository root, one level above src/
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.toml"


class SolverSettings(BaseModel):
    """Numerical knobs shared by every solver run."""

    # Implicit pair
    det_floor: float = Field(1e-6, ge=0.0, lt=1.0)

    # Oracle caches are rebuilt every cache_rebuild_factor * n increments
    cache_rebuild_factor: int = Field(10, ge=1)

    # Coordinates are drawn from the alias table in blocks of this size
    sample_block: int = Field(4096, ge=1)

    # Gradient norm is sampled every ceil(n / grad_stride_divisor) steps
    grad_stride_divisor: int = Field(4, ge=1)

    record_stride: int = Field(1, ge=1)
    fd_step: float = Field(1e-5, gt=0.0)

    # Kaczmarz plateau detection window is plateau_window_factor * m
    plateau_window_factor: int = Field(5, ge=1)
    plateau_rtol: float = Field(1e-10, gt=0.0)

    # SDD solver
    sdd_iteration_scale: float = Field(1.0, gt=0.0)
    sdd_max_rounds: int = Field(12, ge=1)
    tree_strategy: str = "min-resistance"

    # Benchmark output
    csv_digits: int = Field(17, ge=1, le=17)
    summary_tolerance: float = Field(1e-6, gt=0.0)

    log_level: str = "INFO"

    model_config = ConfigDict(extra="allow")

    @classmethod
    def load_from_toml(cls, path: str | os.PathLike = DEFAULT_CONFIG_PATH) -> "SolverSettings":
        """Load settings from a TOML file, falling back to defaults."""
        if not os.path.exists(path):
            logger.warning("Config file %s not found. Using defaults.", path)
            return cls()

        try:
            with open(path, "r") as f:
                data = toml.load(f)

            # Flatten the tables for pydantic
            flat: Dict[str, Any] = {}
            for section in ("solver", "sdd", "bench"):
                flat.update(data.get(section, {}))

            return cls(**flat)
        except (toml.TomlDecodeError, ValueError) as e:
            logger.error("Error loading config %s: %s", path, e)
            return cls()


# Global settings instance
SETTINGS = SolverSettings.load_from_toml()
