"""
The coordinate-oracle contract consumed by the ACDM engine.

An oracle owns two registers u and w and answers partial derivatives of f at
c1*u + c2*w. The engine never forms that combination; it only pushes
single-coordinate increments through notify_increment, so the oracle can keep
whatever caches make a partial cheap.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
import logging

import numpy as np

from config import SETTINGS
from core.errors import InvalidInputError, UnsupportedOperationError
from core.vectors import as_vector

logger = logging.getLogger(__name__)


class Register(IntEnum):
    U = 0
    W = 1


@dataclass(slots=True)
class OracleStats:
    """Operation counters used to check per-iteration work."""

    partial_calls: int = 0
    increments: int = 0
    rebuilds: int = 0

    def snapshot(self) -> "OracleStats":
        return OracleStats(self.partial_calls, self.increments, self.rebuilds)


class CoordinateOracle(ABC):
    """Base class for objectives exposing coordinate partials at implicit combinations."""

    def __init__(self, n: int, rebuild_factor: int | None = None):
        if n < 1:
            raise InvalidInputError("oracle dimension must be positive")
        self._n = n
        self.u = np.zeros(n)
        self.w = np.zeros(n)
        self.stats = OracleStats()
        factor = SETTINGS.cache_rebuild_factor if rebuild_factor is None else rebuild_factor
        self._rebuild_every = max(1, factor * n)
        self._since_rebuild = 0

    def dim(self) -> int:
        return self._n

    @abstractmethod
    def lipschitz_array(self) -> np.ndarray:
        """Coordinate Lipschitz constants L_i, all positive."""

    def lipschitz(self, i: int) -> float:
        return float(self.lipschitz_array()[i])

    # -- partials ---------------------------------------------------------

    def partial(self, i: int, c1: float, c2: float) -> float:
        """i-th partial derivative of f at c1*u + c2*w."""
        self.stats.partial_calls += 1
        return self._partial(i, c1, c2)

    @abstractmethod
    def _partial(self, i: int, c1: float, c2: float) -> float: ...

    # -- registers --------------------------------------------------------

    def notify_increment(self, register: Register, i: int, delta: float) -> None:
        """Apply register[i] += delta and keep the caches exact."""
        if register == Register.U:
            self.u[i] += delta
        else:
            self.w[i] += delta
        self._apply_increment(register, i, delta)
        self.stats.increments += 1
        self._since_rebuild += 1
        if self._since_rebuild >= self._rebuild_every:
            self.rebuild()

    @abstractmethod
    def _apply_increment(self, register: Register, i: int, delta: float) -> None: ...

    def set_registers(self, u0, w0) -> None:
        self.u = as_vector(u0, self._n, "u0", copy=True)
        self.w = as_vector(w0, self._n, "w0", copy=True)
        self.rebuild()

    def rebuild(self) -> None:
        """Recompute all caches from the registers."""
        self._rebuild_caches()
        self.stats.rebuilds += 1
        logger.debug("%s rebuilt caches (rebuild %d)", type(self).__name__, self.stats.rebuilds)
        self._since_rebuild = 0

    @abstractmethod
    def _rebuild_caches(self) -> None: ...

    def combine(self, c1: float, c2: float) -> np.ndarray:
        return c1 * self.u + c2 * self.w

    # -- diagnostics ------------------------------------------------------

    def value(self, x: np.ndarray) -> float:
        raise UnsupportedOperationError(f"{type(self).__name__} does not evaluate f")

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise UnsupportedOperationError(f"{type(self).__name__} does not evaluate the full gradient")

    def value_at(self, c1: float, c2: float) -> float:
        return self.value(self.combine(c1, c2))

    def gradient_at(self, c1: float, c2: float) -> np.ndarray:
        return self.gradient(self.combine(c1, c2))

    def primal(self, c1: float, c2: float) -> np.ndarray:
        """The point the caller actually wants; dual oracles map back to primal space."""
        return self.combine(c1, c2)


def finite_diff_check(oracle: CoordinateOracle, x, i: int, h: float | None = None) -> float:
    """Relative error of partial(i) at x against a central difference of value()."""
    h = SETTINGS.fd_step if h is None else h
    if h <= 0.0:
        raise InvalidInputError("finite-difference step must be positive")
    n = oracle.dim()
    x = as_vector(x, n, "x", copy=True)
    # Raises UnsupportedOperationError before touching the registers
    probe = x.copy()
    probe[i] = x[i] + h
    f_plus = oracle.value(probe)
    probe[i] = x[i] - h
    f_minus = oracle.value(probe)

    oracle.set_registers(x, np.zeros(n))
    g = oracle.partial(i, 1.0, 0.0)
    fd = (f_plus - f_minus) / (2.0 * h)
    return abs(g - fd) / (1.0 + abs(g))
