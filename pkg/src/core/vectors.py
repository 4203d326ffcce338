"""
Dense vector validation helpers.

Dense vectors are plain float64 NumPy arrays; these helpers enforce the
finiteness and length contracts at API boundaries.
"""

import numpy as np

from core.errors import DimensionMismatchError, InvalidInputError


def as_vector(values, n: int | None = None, name: str = "vector", copy: bool = False) -> np.ndarray:
    """Return values as a finite 1-D float64 array, optionally checking its length."""
    arr = np.array(values, dtype=np.float64, copy=copy) if copy else np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatchError(name, n, arr.shape[0])
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    return arr


def zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.float64)
