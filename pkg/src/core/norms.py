"""
Weighted Euclidean norms ||x||^2 = sum_i w_i x_i^2 and their duals.
"""

from dataclasses import dataclass

import numpy as np

from core.errors import DimensionMismatchError, InvalidInputError


@dataclass(frozen=True, eq=False)
class WeightedNorm:
    """Norm with positive weights; for coordinate descent w_i = L_i^(1 - alpha)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InvalidInputError("norm weights must be finite and strictly positive")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def _check(self, x: np.ndarray) -> None:
        if x.shape[0] != self.weights.shape[0]:
            raise DimensionMismatchError("x", self.weights.shape[0], x.shape[0])

    def norm_sq(self, x: np.ndarray) -> float:
        self._check(x)
        return float(np.dot(self.weights, x * x))

    def dual_norm_sq(self, g: np.ndarray) -> float:
        """sum_i g_i^2 / w_i, the squared dual norm of a gradient."""
        self._check(g)
        return float(np.dot(g * g, 1.0 / self.weights))

    def scale_to(self, direction: np.ndarray, radius: float) -> np.ndarray:
        """Rescale direction so its norm equals radius (zero stays zero)."""
        length = np.sqrt(self.norm_sq(direction))
        if length == 0.0:
            return np.zeros_like(direction)
        return direction * (radius / length)


def weighted_norm_sq(w: WeightedNorm, x: np.ndarray) -> float:
    return w.norm_sq(np.asarray(x, dtype=np.float64))
