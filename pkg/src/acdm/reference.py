"""
Explicit ACDM that stores x, v and y as vectors and updates them in O(n) per step.

It shares sampling, thresholding and coefficients with AcdmEngine, so the
same seed picks the same coordinates; comparing the two checks the implicit
representation.
"""

import math

import numpy as np

from acdm.coefficients import initial_coefficients, next_coefficients
from acdm.engine import AcdmConfig, AcdmEngine
from core.errors import NumericalAbortError
from core.vectors import as_vector
from oracle.base import CoordinateOracle


class NaiveAcdm:
    """Reference iteration; uses its own oracle instance only for partials."""

    def __init__(self, oracle: CoordinateOracle, config: AcdmConfig, x0=None):
        # Borrow the engine's setup for thresholds, sampler and streams
        setup = AcdmEngine(oracle, config, x0)
        self.oracle = oracle
        self.config = config
        self.L_tilde = setup.L_tilde
        self.norm = setup.norm
        self.coordinates = setup.coordinates
        self.noise_rng = setup.noise_rng

        n = oracle.dim()
        x0 = np.zeros(n) if x0 is None else as_vector(x0, n, "x0", copy=True)
        self.x = x0.copy()
        self.v = x0.copy()
        self.y = x0.copy()
        self.coefficients = initial_coefficients(n, setup.coefficients.sigma, setup.s_tilde, config.mode)
        self._next = next_coefficients(self.coefficients)
        self._zeros = np.zeros(n)
        self.k = 0

    def _partial_at_y(self, i: int) -> float:
        self.oracle.set_registers(self.y, self._zeros)
        return self.oracle.partial(i, 1.0, 0.0)

    def step(self) -> int:
        c, nxt = self.coefficients, self._next
        i = self.coordinates.draw()
        g = self._partial_at_y(i)
        if not math.isfinite(g):
            raise NumericalAbortError("non-finite partial derivative", self.k, i)
        scaled = g / self.L_tilde[i]

        x_next = self.y.copy()
        x_next[i] -= scaled
        v_next = c.beta * self.v + (1.0 - c.beta) * self.y
        v_next[i] -= c.gamma * scaled

        if self.config.noise is not None:
            eps_x, eps_v = self.config.noise
            n = x_next.shape[0]
            x_next += self.norm.scale_to(self.noise_rng.standard_normal(n), eps_x)
            v_next += self.norm.scale_to(self.noise_rng.standard_normal(n), eps_v)

        self.x = x_next
        self.v = v_next
        self.y = nxt.alpha * v_next + (1.0 - nxt.alpha) * x_next
        self.coefficients = nxt
        self._next = next_coefficients(nxt)
        self.k += 1
        return i
