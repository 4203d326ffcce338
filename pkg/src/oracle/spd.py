"""
Quadratic f(x) = x^T A x / 2 - b^T x for symmetric positive definite A.
"""

from typing import NamedTuple

import numpy as np

from core.dense import extreme_eigenvalues
from core.errors import InvalidInputError
from core.sparse import CsrMatrix
from core.vectors import as_vector
from oracle.base import CoordinateOracle, Register


class SpdParameters(NamedTuple):
    sigma: float  # lambda_min
    L: float  # lambda_max
    s1: float  # trace


def spd_parameters(A: CsrMatrix, rtol: float = 1e-12) -> SpdParameters:
    """Convexity, smoothness and total coordinate Lipschitz constant of the quadratic."""
    if not A.is_symmetric(rtol):
        raise InvalidInputError("spd_parameters requires a symmetric matrix")
    extremes = extreme_eigenvalues(A)
    return SpdParameters(extremes.lambda_min, extremes.lambda_max, float(A.diagonal().sum()))


class SpdQuadraticOracle(CoordinateOracle):
    """Caches A u and A w; a coordinate increment costs one (symmetric) row of A."""

    def __init__(self, A: CsrMatrix, b, check_symmetric: bool = True, rebuild_factor: int | None = None):
        if A.n_rows != A.n_cols:
            raise InvalidInputError(f"SPD oracle needs a square matrix, got {A.shape}")
        if check_symmetric and not A.is_symmetric(1e-12):
            raise InvalidInputError("SPD oracle needs a symmetric matrix (both triangles stored)")
        diag = A.diagonal()
        if np.any(diag <= 0.0):
            raise InvalidInputError("SPD oracle needs a strictly positive diagonal")

        self.A = A
        self.b = as_vector(b, A.n_rows, "b", copy=True)
        self._diag = diag
        self._au = np.zeros(A.n_rows)
        self._aw = np.zeros(A.n_rows)
        super().__init__(A.n_rows, rebuild_factor)

    def lipschitz_array(self) -> np.ndarray:
        return self._diag

    def _partial(self, i: int, c1: float, c2: float) -> float:
        return float(c1 * self._au[i] + c2 * self._aw[i] - self.b[i])

    def _apply_increment(self, register: Register, i: int, delta: float) -> None:
        # Row i equals column i
        cols, vals = self.A.row(i)
        cache = self._au if register == Register.U else self._aw
        cache[cols] += delta * vals

    def _rebuild_caches(self) -> None:
        self._au = self.A.matvec(self.u)
        self._aw = self.A.matvec(self.w)

    def value(self, x) -> float:
        x = as_vector(x, self._n, "x")
        return float(0.5 * np.dot(x, self.A.matvec(x)) - np.dot(self.b, x))

    def gradient(self, x) -> np.ndarray:
        return self.A.matvec(x) - self.b

    def value_at(self, c1: float, c2: float) -> float:
        x = self.combine(c1, c2)
        ax = c1 * self._au + c2 * self._aw
        return float(0.5 * np.dot(x, ax) - np.dot(self.b, x))

    def gradient_at(self, c1: float, c2: float) -> np.ndarray:
        return c1 * self._au + c2 * self._aw - self.b
