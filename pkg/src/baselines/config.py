"""
Configuration shared by the baseline methods.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import SETTINGS


class Method(str, Enum):
    GD = "gd"
    AGD = "agd"
    CDM = "cdm"
    CG = "cg"
    RK = "rk"


class BaselineConfig(BaseModel):
    method: Method
    L: Optional[float] = Field(None, gt=0.0)
    sigma: Optional[float] = Field(None, gt=0.0)
    alpha: float = Field(1.0, ge=0.0, le=1.0)
    max_iters: int = Field(1000, ge=0)
    tolerance: float = Field(1e-10, gt=0.0)
    f_star: Optional[float] = None
    seed: int = 0
    record_stride: int = Field(default_factory=lambda: SETTINGS.record_stride, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_constants(self) -> "BaselineConfig":
        if self.method in (Method.GD, Method.AGD) and self.L is None:
            raise ValueError(f"{self.method.value} needs L")
        if self.method == Method.AGD and self.sigma is None:
            raise ValueError("agd needs sigma")
        if self.L is not None and self.sigma is not None and self.sigma > self.L:
            raise ValueError(f"sigma={self.sigma} exceeds L={self.L}")
        return self
