"""
Implicit representation of the two ACDM sequences.

(v_k, y_k)^T = B_k (u, w)^T, where u and w are the oracle's registers and B_k
is a 2x2 matrix. One ACDM step multiplies B by a 2x2 matrix and pushes two
single-coordinate register increments, so no O(n) vector work is needed.
"""

from typing import Tuple

import numpy as np

from core.errors import NumericalAbortError
from oracle.base import CoordinateOracle


class ImplicitPair:
    """The 2x2 change of basis B plus the oracle that owns the registers."""

    __slots__ = ("oracle", "b00", "b01", "b10", "b11")

    def __init__(self, oracle: CoordinateOracle):
        self.oracle = oracle
        self.reset()

    def reset(self) -> None:
        self.b00, self.b01, self.b10, self.b11 = 1.0, 0.0, 0.0, 1.0

    @property
    def u(self) -> np.ndarray:
        return self.oracle.u

    @property
    def w(self) -> np.ndarray:
        return self.oracle.w

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.b00, self.b01], [self.b10, self.b11]])

    def det(self) -> float:
        return self.b00 * self.b11 - self.b01 * self.b10

    def advance(self, beta: float, alpha_next: float) -> None:
        """B <- A B with A = [[beta, 1 - beta], [alpha' beta, 1 - alpha' beta]]."""
        a10 = alpha_next * beta
        a11 = 1.0 - a10
        a01 = 1.0 - beta
        b00 = beta * self.b00 + a01 * self.b10
        b01 = beta * self.b01 + a01 * self.b11
        b10 = a10 * self.b00 + a11 * self.b10
        b11 = a10 * self.b01 + a11 * self.b11
        self.b00, self.b01, self.b10, self.b11 = b00, b01, b10, b11

    def solve(self, s_v: float, s_y: float) -> Tuple[float, float]:
        """B^{-1} (s_v, s_y)."""
        det = self.det()
        if det == 0.0:
            raise NumericalAbortError("implicit pair became singular")
        return (self.b11 * s_v - self.b01 * s_y) / det, (self.b00 * s_y - self.b10 * s_v) / det

    def combination(self, cv: float, cy: float) -> Tuple[float, float]:
        """Register coefficients of cv * v + cy * y."""
        return cv * self.b00 + cy * self.b10, cv * self.b01 + cy * self.b11

    def x_coefficients(self, alpha: float) -> Tuple[float, float]:
        """Register coefficients of x_k = (y_k - alpha_k v_k) / (1 - alpha_k)."""
        scale = 1.0 / (1.0 - alpha)
        return self.combination(-alpha * scale, scale)

    def v(self) -> np.ndarray:
        return self.b00 * self.oracle.u + self.b01 * self.oracle.w

    def y(self) -> np.ndarray:
        return self.b10 * self.oracle.u + self.b11 * self.oracle.w


def materialize(pair: ImplicitPair) -> Tuple[np.ndarray, np.ndarray]:
    """Explicit (v, y); O(n)."""
    return pair.v(), pair.y()
