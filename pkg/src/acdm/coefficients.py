"""
Coefficient schedules for accelerated coordinate descent.

Three schedules share one state type:

* STABLE recomputes gamma_k from the previous one through the closed-form
  root of gamma^2 - gamma/(2n) = beta * gamma_prev^2, clamped at its limit.
* SIMPLE uses the limiting values for every k (fixed theta).
* PLAIN disables acceleration (alpha = 0, beta = 1, gamma = 0), which turns the
  engine into ordinary randomized coordinate descent.

a_k and b_k grow geometrically, so they are carried as logarithms.
"""

from dataclasses import dataclass, replace
from enum import Enum
import math

import numpy as np

from core.errors import InvalidInputError


class AcdmMode(str, Enum):
    STABLE = "stable"
    SIMPLE = "simple"
    PLAIN = "plain"


def thresholded_lipschitz(L, alpha: float) -> tuple[np.ndarray, float]:
    """Raise small L_i so that L~_i^alpha >= S_alpha / n; returns (L~, S~_alpha)."""
    L = np.asarray(L, dtype=np.float64)
    if L.size == 0 or not np.all(np.isfinite(L)) or np.any(L <= 0.0):
        raise InvalidInputError("coordinate Lipschitz constants must be finite and positive")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    n = L.size
    if alpha == 0.0:
        # L~^0 = max(1, S_0/n) = 1: sampling is uniform and L is untouched
        return L.copy(), float(n)
    s_alpha = float(np.sum(L**alpha))
    floor = (s_alpha / n) ** (1.0 / alpha)
    L_tilde = np.maximum(L, floor)
    return L_tilde, float(np.sum(L_tilde**alpha))


@dataclass(frozen=True, slots=True)
class CoefficientState:
    """Scalars of iteration k. alpha is alpha_k; gamma and beta are gamma_k, beta_k."""

    k: int
    gamma: float
    beta: float
    alpha: float
    log_a: float
    log_b: float
    n: int
    sigma: float
    s_tilde: float
    mode: AcdmMode
    theta: float = math.nan

    @property
    def a(self) -> float:
        return _safe_exp(self.log_a)

    @property
    def b(self) -> float:
        return _safe_exp(self.log_b)

    @property
    def gamma_limit(self) -> float:
        return math.sqrt(self.s_tilde / (2.0 * self.n * self.sigma))

    @property
    def beta_limit(self) -> float:
        return 1.0 - math.sqrt(self.sigma / (2.0 * self.s_tilde * self.n))


def _safe_exp(x: float) -> float:
    if math.isnan(x):
        return math.nan
    return math.exp(x) if x < 709.0 else math.inf


def validate_parameters(n: int, sigma: float, s_tilde: float) -> None:
    if n < 1:
        raise InvalidInputError("dimension must be positive")
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise InvalidInputError(f"sigma must be positive and finite, got {sigma}")
    if not (s_tilde > 0.0 and math.isfinite(s_tilde)):
        raise InvalidInputError(f"S~ must be positive and finite, got {s_tilde}")
    if sigma >= 2.0 * n * s_tilde:
        # beta would reach 0 at the limit
        raise InvalidInputError(f"sigma={sigma} must be below 2 n S~ = {2.0 * n * s_tilde}")


def gamma_map(gamma: float, n: int, sigma: float, s_tilde: float) -> float:
    """gamma_{k+1} as a function of gamma_k, clamped at sqrt(S~ / (2 n sigma))."""
    c = 1.0 / (2.0 * n) - gamma * gamma * sigma / s_tilde
    root = math.sqrt(c * c + 4.0 * gamma * gamma)
    if c >= 0.0:
        nxt = 0.5 * (c + root)
    else:
        # Same root without cancellation
        nxt = 2.0 * gamma * gamma / (root - c)
    return min(nxt, math.sqrt(s_tilde / (2.0 * n * sigma)))


def _alpha_from(beta: float, gamma: float, n: int) -> float:
    return beta / (beta + 2.0 * n * gamma - 1.0)


def initial_coefficients(n: int, sigma: float, s_tilde: float, mode: AcdmMode = AcdmMode.STABLE) -> CoefficientState:
    """Coefficients of iteration 0."""
    mode = AcdmMode(mode)
    if mode == AcdmMode.PLAIN:
        return CoefficientState(0, 0.0, 1.0, 0.0, math.nan, math.nan, n, sigma, s_tilde, mode)

    validate_parameters(n, sigma, s_tilde)
    if mode == AcdmMode.SIMPLE:
        theta = math.sqrt(sigma / (2.0 * s_tilde * n))
        return CoefficientState(
            0,
            gamma=s_tilde * theta / sigma,
            beta=1.0 - theta,
            alpha=theta / (1.0 + theta),
            log_a=math.nan,
            log_b=math.nan,
            n=n,
            sigma=sigma,
            s_tilde=s_tilde,
            mode=mode,
            theta=theta,
        )

    # a_0 / b_0 = 1/(4n) plays the role of gamma_{-1}
    gamma = gamma_map(1.0 / (4.0 * n), n, sigma, s_tilde)
    beta = 1.0 - gamma * sigma / s_tilde
    return CoefficientState(
        0,
        gamma=gamma,
        beta=beta,
        alpha=_alpha_from(beta, gamma, n),
        log_a=math.log(1.0 / (2.0 * n)),
        log_b=math.log(2.0),
        n=n,
        sigma=sigma,
        s_tilde=s_tilde,
        mode=mode,
    )


def next_coefficients(state: CoefficientState) -> CoefficientState:
    """Coefficients of iteration k + 1."""
    if state.mode != AcdmMode.STABLE:
        return replace(state, k=state.k + 1)

    n, sigma, s_tilde = state.n, state.sigma, state.s_tilde
    gamma = gamma_map(state.gamma, n, sigma, s_tilde)
    beta = 1.0 - gamma * sigma / s_tilde
    log_b = state.log_b - 0.5 * math.log(state.beta)
    log_a = math.log(state.gamma) + log_b
    return CoefficientState(
        state.k + 1,
        gamma=gamma,
        beta=beta,
        alpha=_alpha_from(beta, gamma, n),
        log_a=log_a,
        log_b=log_b,
        n=n,
        sigma=sigma,
        s_tilde=s_tilde,
        mode=state.mode,
    )


def growth_lower_bounds(state: CoefficientState) -> tuple[float, float]:
    """Logarithms of the lower bounds on a_k and b_k."""
    rho = 0.5 * math.sqrt(state.sigma / (2.0 * state.s_tilde * state.n))
    e = state.k + 1
    up = e * math.log1p(rho)
    down = e * math.log1p(-rho)
    # log(x^e - y^e) and log(x^e + y^e) with x > y > 0
    log_a_bound = 0.5 * math.log(state.s_tilde / (2.0 * state.n * state.sigma)) + up + math.log(-math.expm1(down - up))
    log_b_bound = up + math.log1p(math.exp(down - up))
    return log_a_bound, log_b_bound


def defining_identity_residual(state: CoefficientState) -> float:
    """Relative residual of gamma_k^2 - gamma_k/(2n) = beta_k (a_k / b_k)^2."""
    ratio = math.exp(state.log_a - state.log_b)
    lhs = state.gamma * state.gamma - state.gamma / (2.0 * state.n)
    rhs = state.beta * ratio * ratio
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
