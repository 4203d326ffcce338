"""
Accelerated coordinate descent engine.

Each step samples i with probability L~_i^alpha / S~_alpha, reads one partial
at y_k through the implicit pair and pushes two register increments:

    x_{k+1} = y_k - f_i(y_k) / L~_i e_i
    v_{k+1} = beta_k v_k + (1 - beta_k) y_k - gamma_k f_i(y_k) / L~_i e_i
    y_{k+1} = alpha_{k+1} v_{k+1} + (1 - alpha_{k+1}) x_{k+1}

x_k itself is never stored; it is recovered as (y_k - alpha_k v_k) / (1 - alpha_k).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional
import logging
import math
import time

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from acdm.coefficients import (
    AcdmMode,
    CoefficientState,
    initial_coefficients,
    next_coefficients,
    thresholded_lipschitz,
)
from acdm.implicit import ImplicitPair, materialize
from acdm.trace import ConvergenceTrace
from config import SETTINGS
from core.errors import InvalidInputError, NumericalAbortError
from core.norms import WeightedNorm
from core.sampling import AliasSampler, CoordinateStream, make_streams
from core.vectors import as_vector
from oracle.base import CoordinateOracle, OracleStats, Register

logger = logging.getLogger(__name__)


class StopRule(str, Enum):
    ITERATIONS = "iterations"
    GRADIENT_WINDOW = "gradient-window"
    VALUE_GAP = "value-gap"


class AcdmConfig(BaseModel):
    """Run configuration. sigma is measured in the norm weighted by L~^(1 - alpha)."""

    alpha: float = Field(1.0, ge=0.0, le=1.0)
    sigma: Optional[float] = Field(None, gt=0.0)
    mode: AcdmMode = AcdmMode.STABLE
    max_iters: int = Field(1000, ge=0)
    stop_rule: StopRule = StopRule.ITERATIONS
    tolerance: float = Field(1e-6, gt=0.0)
    f_star: Optional[float] = None
    seed: int = 0
    noise: Optional[tuple[float, float]] = None
    full_window: bool = False
    record_stride: int = Field(default_factory=lambda: SETTINGS.record_stride, ge=1)
    det_floor: float = Field(default_factory=lambda: SETTINGS.det_floor, ge=0.0, lt=1.0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_combination(self) -> "AcdmConfig":
        if self.mode != AcdmMode.PLAIN and self.sigma is None:
            raise ValueError(f"sigma is required in {self.mode.value} mode")
        if self.stop_rule == StopRule.VALUE_GAP and self.f_star is None:
            raise ValueError("value-gap stopping needs f_star")
        if self.stop_rule == StopRule.GRADIENT_WINDOW and self.max_iters < 1:
            raise ValueError("gradient-window stopping needs max_iters >= 1")
        if self.noise is not None and min(self.noise) < 0.0:
            raise ValueError("noise magnitudes must be nonnegative")
        return self


@dataclass
class RunResult:
    x: np.ndarray
    primal: np.ndarray
    trace: ConvergenceTrace
    iterations: int
    stop_iteration: Optional[int]
    gradient_window_mean: Optional[float]
    renormalizations: int
    min_abs_det: float
    stats: OracleStats
    engine: "AcdmEngine"


Observer = Callable[["AcdmEngine"], Optional[bool]]


class AcdmEngine:
    """One ACDM run over a coordinate oracle. Owns the oracle's registers."""

    def __init__(self, oracle: CoordinateOracle, config: AcdmConfig, x0=None, thresholded=None):
        """thresholded replaces the L~ computed from the oracle (accelerated modes only)."""
        self.oracle = oracle
        self.config = config
        n = oracle.dim()
        alpha = config.alpha

        L = np.asarray(oracle.lipschitz_array(), dtype=np.float64)
        if thresholded is not None:
            if config.mode == AcdmMode.PLAIN:
                raise InvalidInputError("plain mode samples the untouched Lipschitz constants")
            self.L_tilde = as_vector(thresholded, n, "thresholded", copy=True)
            if np.any(self.L_tilde < L * (1.0 - 1e-12)):
                raise InvalidInputError("thresholded constants must not lie below the oracle's")
            weights = np.ones(n) if alpha == 0.0 else self.L_tilde**alpha
            self.s_tilde = float(weights.sum())
        elif config.mode == AcdmMode.PLAIN:
            # No thresholding: the engine reduces to coordinate descent with P_alpha
            thresholded_lipschitz(L, alpha)  # validates L and alpha
            self.L_tilde = L.copy()
            weights = np.ones(n) if alpha == 0.0 else L**alpha
            self.s_tilde = float(weights.sum())
        else:
            self.L_tilde, self.s_tilde = thresholded_lipschitz(L, alpha)
            weights = np.ones(n) if alpha == 0.0 else self.L_tilde**alpha

        self.norm = WeightedNorm(self.L_tilde ** (1.0 - alpha))
        self.sampler = AliasSampler(weights)
        streams = make_streams(config.seed)
        self.coordinates = CoordinateStream(self.sampler, streams.coordinates, SETTINGS.sample_block)
        self.noise_rng = streams.noise
        self.stop_rng = streams.stopping

        sigma = config.sigma if config.sigma is not None else math.nan
        self.coefficients: CoefficientState = initial_coefficients(n, sigma, self.s_tilde, config.mode)
        self._next = next_coefficients(self.coefficients)

        x0 = np.zeros(n) if x0 is None else as_vector(x0, n, "x0", copy=True)
        oracle.set_registers(x0, x0)
        self.pair = ImplicitPair(oracle)
        self._step_size = self.L_tilde.tolist()

        self.k = 0
        self.last_coordinate: Optional[int] = None
        self.renormalizations = 0
        self.min_abs_det = 1.0

    @property
    def n(self) -> int:
        return self.oracle.dim()

    # -- stepping ---------------------------------------------------------

    def step(self) -> int:
        """Advance one iteration; returns the sampled coordinate."""
        pair = self.pair
        if abs(pair.det()) < self.config.det_floor:
            self.renormalize()

        c = self.coefficients
        nxt = self._next
        i = self.coordinates.draw()
        g = self.oracle.partial(i, pair.b10, pair.b11)
        if not math.isfinite(g):
            raise NumericalAbortError("non-finite partial derivative", self.k, i)

        scaled = g / self._step_size[i]
        s_v = c.gamma * scaled
        s_y = (1.0 - nxt.alpha + nxt.alpha * c.gamma) * scaled
        pair.advance(c.beta, nxt.alpha)
        du, dw = pair.solve(s_v, s_y)
        self.oracle.notify_increment(Register.U, i, -du)
        self.oracle.notify_increment(Register.W, i, -dw)

        if self.config.noise is not None:
            self._inject_noise(nxt.alpha)

        self.coefficients = nxt
        self._next = next_coefficients(nxt)
        self.k += 1
        self.last_coordinate = i
        det = abs(pair.det())
        if det < self.min_abs_det:
            self.min_abs_det = det
        return i

    def _inject_noise(self, alpha_next: float) -> None:
        """Perturb x_{k+1} and v_{k+1} by vectors of norm eps_x, eps_v; O(n + nnz)."""
        eps_x, eps_v = self.config.noise
        n = self.n
        e_x = self.norm.scale_to(self.noise_rng.standard_normal(n), eps_x)
        e_v = self.norm.scale_to(self.noise_rng.standard_normal(n), eps_v)
        dv = e_v
        dy = alpha_next * e_v + (1.0 - alpha_next) * e_x
        pair = self.pair
        det = pair.det()
        du = (pair.b11 * dv - pair.b01 * dy) / det
        dw = (pair.b00 * dy - pair.b10 * dv) / det
        self.oracle.set_registers(self.oracle.u + du, self.oracle.w + dw)

    def renormalize(self) -> None:
        """Fold B into the registers: registers := (v, y), B := I."""
        v, y = materialize(self.pair)
        self.oracle.set_registers(v, y)
        self.pair.reset()
        self.renormalizations += 1
        logger.debug("renormalized implicit pair at k=%d", self.k)

    # -- views ------------------------------------------------------------

    def x_coefficients(self) -> tuple[float, float]:
        return self.pair.x_coefficients(self.coefficients.alpha)

    def solution(self) -> np.ndarray:
        """x_k in the oracle's coordinates."""
        return self.oracle.combine(*self.x_coefficients())

    def primal_solution(self) -> np.ndarray:
        return self.oracle.primal(*self.x_coefficients())

    def objective(self) -> float:
        return self.oracle.value_at(*self.x_coefficients())

    def gradient_dual_norm_sq(self) -> float:
        """||grad f(y_k)||^2 in the dual of the L~^(1-alpha) norm."""
        return self.norm.dual_norm_sq(self.oracle.gradient_at(self.pair.b10, self.pair.b11))

    def v(self) -> np.ndarray:
        return self.pair.v()

    def y(self) -> np.ndarray:
        return self.pair.y()

    # -- driver -----------------------------------------------------------

    def _record(self, trace: ConvergenceTrace, start: int, grad_sq: float = math.nan) -> float:
        gap = math.nan
        if self.config.f_star is not None:
            gap = self.objective() - self.config.f_star
            if not math.isfinite(gap):
                raise NumericalAbortError("objective became non-finite", self.k)
        trace.record(self.k, gap, grad_sq, self.last_coordinate, time.perf_counter_ns() - start)
        return gap

    def run(self, observer: Optional[Observer] = None) -> RunResult:
        cfg = self.config
        trace = ConvergenceTrace()
        stride = cfg.record_stride
        window = cfg.stop_rule == StopRule.GRADIENT_WINDOW
        value_gap = cfg.stop_rule == StopRule.VALUE_GAP

        stop_at: Optional[int] = None
        window_start = 0
        grad_every = 1
        if window:
            window_start = cfg.max_iters
            stop_at = int(self.stop_rng.integers(window_start, 2 * window_start))
            total = 2 * window_start - 1 if cfg.full_window else stop_at
            grad_every = max(1, math.ceil(self.n / SETTINGS.grad_stride_divisor))
        else:
            total = cfg.max_iters

        start = time.perf_counter_ns()
        initial_gap = self._record(trace, start)
        x_stop: Optional[np.ndarray] = None
        primal_stop: Optional[np.ndarray] = None
        window_values: list[float] = []

        for _ in range(total):
            self.step()
            grad_sq = math.nan
            if window and self.k >= window_start and (self.k - window_start) % grad_every == 0:
                grad_sq = self.gradient_dual_norm_sq()
                window_values.append(grad_sq)
            if self.k == stop_at:
                x_stop = self.solution()
                primal_stop = self.primal_solution()

            stop = bool(observer(self)) if observer is not None else False
            if self.k % stride == 0 or self.k == total or stop or not math.isnan(grad_sq):
                gap = self._record(trace, start, grad_sq)
                if value_gap and gap <= cfg.tolerance * initial_gap:
                    break
            if stop:
                break

        if x_stop is None:
            x_stop, primal_stop = self.solution(), self.primal_solution()
        return RunResult(
            x=x_stop,
            primal=primal_stop,
            trace=trace,
            iterations=self.k,
            stop_iteration=stop_at,
            gradient_window_mean=float(np.mean(window_values)) if window_values else None,
            renormalizations=self.renormalizations,
            min_abs_det=self.min_abs_det,
            stats=self.oracle.stats.snapshot(),
            engine=self,
        )


def run(oracle: CoordinateOracle, x0, config: AcdmConfig, observer: Optional[Observer] = None) -> RunResult:
    """Run ACDM from x0 and return the solution with its trace."""
    return AcdmEngine(oracle, config, x0).run(observer)


def acdm_step(engine: AcdmEngine) -> int:
    """One step of the adaptive (stable) schedule."""
    if engine.config.mode != AcdmMode.STABLE:
        raise InvalidInputError(f"acdm_step needs a stable-mode engine, got {engine.config.mode.value}")
    return engine.step()


def simple_acdm_step(engine: AcdmEngine) -> int:
    """One step with the fixed-theta coefficients."""
    if engine.config.mode != AcdmMode.SIMPLE:
        raise InvalidInputError(f"simple_acdm_step needs a simple-mode engine, got {engine.config.mode.value}")
    return engine.step()
