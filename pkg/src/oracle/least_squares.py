"""
Least-squares objectives.

DualLeastSquaresOracle minimizes f(y) = ||A^T y||^2 / 2 - <b, y> over the rows
of A; its minimizers map to solutions of A x = b through x = A^T y, which is
what the Kaczmarz solvers iterate on. LeastSquaresOracle is the primal column
form f(x) = ||A x - b||^2 / 2.
"""

import numpy as np

from core.errors import InvalidInputError
from core.sparse import CsrMatrix
from core.vectors import as_vector
from oracle.base import CoordinateOracle, Register


class DualLeastSquaresOracle(CoordinateOracle):
    """Coordinates are rows of A; caches x_u = A^T u, x_w = A^T w and <b,u>, <b,w>."""

    def __init__(self, A: CsrMatrix, b, rebuild_factor: int | None = None):
        self.A = A
        self.b = as_vector(b, A.n_rows, "b", copy=True)
        self._row_norms = A.row_norms_sq()
        if np.any(self._row_norms <= 0.0):
            zero = int(np.flatnonzero(self._row_norms <= 0.0)[0])
            raise InvalidInputError(f"row {zero} of A is zero")
        self._xu = np.zeros(A.n_cols)
        self._xw = np.zeros(A.n_cols)
        self._bu = 0.0
        self._bw = 0.0
        super().__init__(A.n_rows, rebuild_factor)

    def lipschitz_array(self) -> np.ndarray:
        return self._row_norms

    def _partial(self, i: int, c1: float, c2: float) -> float:
        cols, vals = self.A.row(i)
        x = c1 * self._xu[cols] + c2 * self._xw[cols]
        return float(np.dot(vals, x) - self.b[i])

    def _apply_increment(self, register: Register, i: int, delta: float) -> None:
        cols, vals = self.A.row(i)
        if register == Register.U:
            self._xu[cols] += delta * vals
            self._bu += delta * self.b[i]
        else:
            self._xw[cols] += delta * vals
            self._bw += delta * self.b[i]

    def _rebuild_caches(self) -> None:
        self._xu = self.A.rmatvec(self.u)
        self._xw = self.A.rmatvec(self.w)
        self._bu = float(np.dot(self.b, self.u))
        self._bw = float(np.dot(self.b, self.w))

    def value(self, y) -> float:
        x = self.A.rmatvec(y)
        return float(0.5 * np.dot(x, x) - np.dot(self.b, y))

    def gradient(self, y) -> np.ndarray:
        return self.A.matvec(self.A.rmatvec(y)) - self.b

    def value_at(self, c1: float, c2: float) -> float:
        x = c1 * self._xu + c2 * self._xw
        return float(0.5 * np.dot(x, x) - (c1 * self._bu + c2 * self._bw))

    def gradient_at(self, c1: float, c2: float) -> np.ndarray:
        return self.A.matvec(c1 * self._xu + c2 * self._xw) - self.b

    def primal(self, c1: float, c2: float) -> np.ndarray:
        """x = A^T (c1 u + c2 w), read from the caches."""
        return c1 * self._xu + c2 * self._xw


class LeastSquaresOracle(CoordinateOracle):
    """Coordinates are columns of A; caches A u and A w."""

    def __init__(self, A: CsrMatrix, b, rebuild_factor: int | None = None):
        self.A = A
        self.columns = A.transpose()
        self.b = as_vector(b, A.n_rows, "b", copy=True)
        self._col_norms = self.columns.row_norms_sq()
        if np.any(self._col_norms <= 0.0):
            zero = int(np.flatnonzero(self._col_norms <= 0.0)[0])
            raise InvalidInputError(f"column {zero} of A is zero")
        self._atb = A.rmatvec(self.b)
        self._ru = np.zeros(A.n_rows)
        self._rw = np.zeros(A.n_rows)
        super().__init__(A.n_cols, rebuild_factor)

    def lipschitz_array(self) -> np.ndarray:
        return self._col_norms

    def _partial(self, i: int, c1: float, c2: float) -> float:
        rows, vals = self.columns.row(i)
        r = c1 * self._ru[rows] + c2 * self._rw[rows]
        return float(np.dot(vals, r) - self._atb[i])

    def _apply_increment(self, register: Register, i: int, delta: float) -> None:
        rows, vals = self.columns.row(i)
        cache = self._ru if register == Register.U else self._rw
        cache[rows] += delta * vals

    def _rebuild_caches(self) -> None:
        self._ru = self.A.matvec(self.u)
        self._rw = self.A.matvec(self.w)

    def value(self, x) -> float:
        r = self.A.matvec(x) - self.b
        return float(0.5 * np.dot(r, r))

    def gradient(self, x) -> np.ndarray:
        return self.A.rmatvec(self.A.matvec(x) - self.b)

    def value_at(self, c1: float, c2: float) -> float:
        r = c1 * self._ru + c2 * self._rw - self.b
        return float(0.5 * np.dot(r, r))
