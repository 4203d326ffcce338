"""
Convergence traces and their CSV form.

Columns: k, f_gap, grad_sq, coord, wall_ns. Missing values (no f*, gradient
not sampled, no coordinate for full-gradient methods) are written as empty
fields. Floats use 17 significant digits so a trace round-trips exactly.
"""

from dataclasses import dataclass, field
from pathlib import Path
import math
import os

import numpy as np
import pandas as pd

from config import SETTINGS
from core.errors import InvalidInputError

COLUMNS = ["k", "f_gap", "grad_sq", "coord", "wall_ns"]


@dataclass
class ConvergenceTrace:
    k: list[int] = field(default_factory=list)
    f_gap: list[float] = field(default_factory=list)
    grad_sq: list[float] = field(default_factory=list)
    coord: list[int | None] = field(default_factory=list)
    wall_ns: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.k)

    def record(
        self,
        k: int,
        f_gap: float = math.nan,
        grad_sq: float = math.nan,
        coord: int | None = None,
        wall_ns: int = 0,
    ) -> None:
        if self.k and k <= self.k[-1]:
            raise InvalidInputError(f"trace iterations must increase: {k} after {self.k[-1]}")
        self.k.append(int(k))
        self.f_gap.append(float(f_gap))
        self.grad_sq.append(float(grad_sq))
        self.coord.append(None if coord is None else int(coord))
        self.wall_ns.append(int(wall_ns))

    # -- queries ----------------------------------------------------------

    @property
    def gaps(self) -> np.ndarray:
        return np.asarray(self.f_gap, dtype=np.float64)

    @property
    def final_gap(self) -> float:
        return self.f_gap[-1] if self.f_gap else math.nan

    def iterations_to(self, tolerance: float) -> int | None:
        """First recorded k with f_gap <= tolerance * f_gap(0), or None."""
        gaps = self.gaps
        if gaps.size == 0 or not np.isfinite(gaps[0]):
            return None
        hits = np.flatnonzero(gaps <= tolerance * gaps[0])
        return self.k[int(hits[0])] if hits.size else None

    def gap_at(self, k: int) -> float:
        """Gap recorded at iteration k (NaN when k was not recorded)."""
        try:
            return self.f_gap[self.k.index(k)]
        except ValueError:
            return math.nan

    # -- CSV --------------------------------------------------------------

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "k": pd.array(self.k, dtype="int64"),
                "f_gap": pd.array(self.f_gap, dtype="float64"),
                "grad_sq": pd.array(self.grad_sq, dtype="float64"),
                "coord": pd.array(self.coord, dtype="Int64"),
                "wall_ns": pd.array(self.wall_ns, dtype="int64"),
            },
            columns=COLUMNS,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "ConvergenceTrace":
        missing = [c for c in COLUMNS if c not in frame.columns]
        if missing:
            raise InvalidInputError(f"trace is missing columns {missing}")
        trace = cls()
        coords = frame["coord"].astype("Int64")
        for k, gap, grad, coord, wall in zip(frame["k"], frame["f_gap"], frame["grad_sq"], coords, frame["wall_ns"]):
            trace.record(int(k), float(gap), float(grad), None if pd.isna(coord) else int(coord), int(wall))
        return trace

    def to_csv(self, path, digits: int | None = None) -> None:
        """Write atomically: a temporary sibling file is renamed into place."""
        digits = SETTINGS.csv_digits if digits is None else digits
        path = Path(path)
        tmp = path.with_name(f".{path.name}.tmp")
        self.to_frame().to_csv(tmp, index=False, float_format=f"%.{digits}g", na_rep="", lineterminator="\n")
        os.replace(tmp, path)

    @classmethod
    def from_csv(cls, path) -> "ConvergenceTrace":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Trace file not found: {path}")
        return cls.from_frame(pd.read_csv(path, dtype={"coord": "Int64"}))
