"""
A tridiagonal quadratic on which span-restricted coordinate methods with
uniform sampling cannot converge faster than a known geometric rate.

    f(x) = (L - s)/4 [(1 - x_1)^2 + sum (x_i - x_{i+1})^2 + (x_n - q^(n+1))^2] + s/2 ||x||^2

with L = S1 / n and s the strong convexity. The minimizer is x*(k) = q^k.
Up to a constant, f(x) = x^T H x / 2 - c^T x with
H = (L - s)/2 tridiag(-1, 2, -1) + s I and c = (L - s)/2 (e_1 + q^(n+1) e_n).
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
import scipy.sparse as sp

from core.errors import InvalidInputError
from core.matrix_market import write_matrix_market, write_vector
from core.sparse import CsrMatrix
from oracle.spd import SpdQuadraticOracle

logger = logging.getLogger(__name__)


def decay_rate(L: float, sigma: float) -> float:
    """Smaller root of t^2 - 2 L/(L - sigma) t + 1."""
    r = L / (L - sigma)
    # 1 / (r + sqrt(r^2 - 1)) avoids the cancellation in r - sqrt(r^2 - 1)
    return 1.0 / (r + math.sqrt(r * r - 1.0))


@dataclass(frozen=True, eq=False)
class HardInstance:
    n: int
    sigma: float
    s1: float
    q: float
    H: CsrMatrix
    c: np.ndarray
    x_star: np.ndarray

    @property
    def L(self) -> float:
        return self.s1 / self.n

    @property
    def constant(self) -> float:
        """Offset between f and x^T H x / 2 - c^T x."""
        return 0.25 * (self.L - self.sigma) * (1.0 + self.q ** (2 * self.n + 2))

    @property
    def f_star(self) -> float:
        """Minimum of x^T H x / 2 - c^T x, the form the oracle evaluates."""
        return -0.5 * float(np.dot(self.c, self.x_star))

    def as_oracle(self, rebuild_factor: int | None = None) -> SpdQuadraticOracle:
        """A fresh oracle; every coordinate has Lipschitz constant L."""
        return SpdQuadraticOracle(self.H, self.c, check_symmetric=False, rebuild_factor=rebuild_factor)

    def sigma_in_norm(self, alpha: float) -> float:
        """Strong convexity in the norm weighted by L^(1 - alpha)."""
        return self.sigma / self.L ** (1.0 - alpha)

    def value(self, x) -> float:
        """f itself, constant included."""
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * float(np.dot(x, self.H.matvec(x))) - float(np.dot(self.c, x)) + self.constant

    def gradient(self, x) -> np.ndarray:
        return self.H.matvec(np.asarray(x, dtype=np.float64)) - self.c

    def write(self, matrix_path, rhs_path) -> None:
        write_matrix_market(
            matrix_path,
            self.H,
            comment=f"hard instance n={self.n} sigma={self.sigma!r} S1={self.s1!r} q={self.q!r}",
        )
        write_vector(rhs_path, self.c)


def make_hard_instance(n: int, sigma: float, s1: float) -> HardInstance:
    if n < 1:
        raise InvalidInputError("n must be positive")
    if not (sigma > 0.0 and math.isfinite(sigma) and math.isfinite(s1)):
        raise InvalidInputError("sigma must be positive and finite")
    if s1 <= 4.0 * sigma * n:
        raise InvalidInputError(f"need S1 > 4 sigma n = {4.0 * sigma * n!r}, got {s1!r}")

    L = s1 / n
    q = decay_rate(L, sigma)
    half = 0.5 * (L - sigma)
    main = np.full(n, 2.0 * half + sigma)
    off = np.full(n - 1, -half)
    if n == 1:
        H = CsrMatrix.diagonal_matrix(main)
    else:
        H = CsrMatrix.from_scipy(sp.diags_array([off, main, off], offsets=[-1, 0, 1], shape=(n, n)))

    # Underflows to 0 for large n; the instance stays valid
    tail = q ** (n + 1)
    c = np.zeros(n)
    c[0] += half
    c[-1] += half * tail
    x_star = q ** np.arange(1, n + 1, dtype=np.float64)
    logger.debug("hard instance n=%d L=%.4g sigma=%.4g q=%.6f", n, L, sigma, q)
    return HardInstance(n, float(sigma), float(s1), q, H, c, x_star)


def lower_bound_curve(instance: HardInstance, k_max: int, x0=None, exact: bool = False) -> np.ndarray:
    """Lower bound on E f(x_k) - f* for k = 0..k_max under uniform sampling.

    The default is the closed-form geometric bound in terms of S1. With
    exact=True the binomial expectation over revealed prefixes is used,
    which is tighter and requires x0 = 0.
    """
    if k_max < 0:
        raise InvalidInputError("k_max must be nonnegative")
    n, sigma, s1, q = instance.n, instance.sigma, instance.s1, instance.q
    k = np.arange(k_max + 1, dtype=np.float64)
    if exact:
        if x0 is not None and np.any(np.asarray(x0) != 0.0):
            raise InvalidInputError("the exact bound is stated for x0 = 0")
        dist_sq = float(np.dot(instance.x_star, instance.x_star))
        base = 1.0 - 1.0 / n + q * q / n
        offset = 0.5 * sigma * q ** (2 * n + 2) / (1.0 - q * q)
        return 0.5 * sigma * base**k * dist_sq - offset

    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64)
    dist_sq = float(np.sum((instance.x_star - x0) ** 2))
    base = max(0.0, 1.0 - 2.0 * math.sqrt(2.0 * sigma / (n * s1)))
    offset = math.sqrt(sigma * s1 / n) * (1.0 - 0.5 * math.sqrt(n * sigma / s1)) ** (2 * n)
    return 0.5 * sigma * base**k * dist_sq - offset
