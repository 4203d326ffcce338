"""
Full-gradient baselines: gradient descent with step 1/L and Nesterov's
constant-momentum scheme for strongly convex objectives.
"""

import math
import time

import numpy as np

from acdm.trace import ConvergenceTrace
from baselines.config import BaselineConfig, Method
from core.errors import InvalidInputError, NumericalAbortError
from core.vectors import as_vector
from oracle.base import CoordinateOracle


def gd_step(oracle: CoordinateOracle, x: np.ndarray, L: float) -> np.ndarray:
    """x - grad f(x) / L."""
    if L <= 0.0:
        raise InvalidInputError("L must be positive")
    return x - oracle.gradient(x) / L


def _gap(oracle: CoordinateOracle, x: np.ndarray, f_star: float | None, k: int) -> float:
    if f_star is None:
        return math.nan
    gap = oracle.value(x) - f_star
    if not math.isfinite(gap):
        raise NumericalAbortError("objective became non-finite", k)
    return gap


def gd_run(oracle: CoordinateOracle, x0, config: BaselineConfig) -> tuple[np.ndarray, ConvergenceTrace]:
    x = as_vector(x0, oracle.dim(), "x0", copy=True)
    trace = ConvergenceTrace()
    start = time.perf_counter_ns()
    trace.record(0, _gap(oracle, x, config.f_star, 0), wall_ns=0)
    for k in range(1, config.max_iters + 1):
        x = gd_step(oracle, x, config.L)
        if k % config.record_stride == 0 or k == config.max_iters:
            trace.record(k, _gap(oracle, x, config.f_star, k), wall_ns=time.perf_counter_ns() - start)
    return x, trace


def agd_momentum(L: float, sigma: float) -> float:
    root = math.sqrt(sigma / L)
    return (1.0 - root) / (1.0 + root)


def agd_run(oracle: CoordinateOracle, x0, L: float, sigma: float, k: int, f_star: float | None = None,
            record_stride: int = 1) -> tuple[np.ndarray, ConvergenceTrace]:
    """Nesterov's method with constant momentum (1 - sqrt(q)) / (1 + sqrt(q)), q = sigma / L."""
    config = BaselineConfig(method=Method.AGD, L=L, sigma=sigma, max_iters=k, f_star=f_star,
                            record_stride=record_stride)
    momentum = agd_momentum(config.L, config.sigma)
    x = as_vector(x0, oracle.dim(), "x0", copy=True)
    y = x.copy()
    trace = ConvergenceTrace()
    start = time.perf_counter_ns()
    trace.record(0, _gap(oracle, x, f_star, 0), wall_ns=0)
    for it in range(1, k + 1):
        x_next = y - oracle.gradient(y) / L
        y = x_next + momentum * (x_next - x)
        x = x_next
        if it % record_stride == 0 or it == k:
            trace.record(it, _gap(oracle, x, f_star, it), wall_ns=time.perf_counter_ns() - start)
    return x, trace
