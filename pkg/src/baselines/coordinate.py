"""
Randomized coordinate descent: x_{k+1} = x_k - f_i(x_k) / L_i e_i with
Pr[i = j] proportional to L_j^alpha.
"""

import math
import time

import numpy as np

from acdm.trace import ConvergenceTrace
from baselines.config import BaselineConfig
from config import SETTINGS
from core.errors import NumericalAbortError
from core.sampling import AliasSampler, CoordinateStream, make_streams
from core.vectors import as_vector
from oracle.base import CoordinateOracle, Register


def sampling_weights(L: np.ndarray, alpha: float) -> np.ndarray:
    return np.ones_like(L) if alpha == 0.0 else L**alpha


def cdm_step(oracle: CoordinateOracle, x, rng: np.random.Generator, alpha: float,
             sampler: AliasSampler | None = None) -> np.ndarray:
    """One explicit step from x; returns the new point."""
    L = oracle.lipschitz_array()
    sampler = sampler or AliasSampler(sampling_weights(L, alpha))
    i = sampler.sample(rng)
    x_next = as_vector(x, oracle.dim(), "x", copy=True)
    oracle.set_registers(x_next, np.zeros_like(x_next))
    x_next[i] -= oracle.partial(i, 1.0, 0.0) / L[i]
    return x_next


def cdm_run(oracle: CoordinateOracle, x0, config: BaselineConfig, observer=None) -> tuple[np.ndarray, ConvergenceTrace]:
    """Coordinate descent on the oracle's U register; O(one partial + one increment) per step."""
    n = oracle.dim()
    L = np.asarray(oracle.lipschitz_array(), dtype=np.float64)
    stream = CoordinateStream(
        AliasSampler(sampling_weights(L, config.alpha)), make_streams(config.seed).coordinates, SETTINGS.sample_block
    )
    step_size = L.tolist()
    oracle.set_registers(as_vector(x0, n, "x0"), np.zeros(n))

    def gap(k: int) -> float:
        if config.f_star is None:
            return math.nan
        value = oracle.value_at(1.0, 0.0) - config.f_star
        if not math.isfinite(value):
            raise NumericalAbortError("objective became non-finite", k)
        return value

    trace = ConvergenceTrace()
    start = time.perf_counter_ns()
    trace.record(0, gap(0), wall_ns=0)
    for k in range(1, config.max_iters + 1):
        i = stream.draw()
        g = oracle.partial(i, 1.0, 0.0)
        if not math.isfinite(g):
            raise NumericalAbortError("non-finite partial derivative", k, i)
        oracle.notify_increment(Register.U, i, -g / step_size[i])
        if observer is not None:
            observer(k, i, oracle.u)
        if k % config.record_stride == 0 or k == config.max_iters:
            trace.record(k, gap(k), coord=i, wall_ns=time.perf_counter_ns() - start)
    return oracle.u.copy(), trace
