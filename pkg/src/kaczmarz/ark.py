"""
Accelerated randomized Kaczmarz.

ACDM (alpha = 1) runs on the dual objective f(y) = ||A^T y||^2 / 2 - <b, y>;
the dual oracle keeps its registers in primal form x = A^T y, so every step is
a sparse row operation on x and y itself is never materialized.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from acdm.coefficients import AcdmMode
from acdm.engine import AcdmConfig, AcdmEngine, RunResult
from acdm.trace import ConvergenceTrace
from config import SETTINGS
from core.dense import singular_value_extremes
from core.errors import InvalidInputError
from core.sparse import CsrMatrix
from core.vectors import as_vector
from oracle.least_squares import DualLeastSquaresOracle

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ArkProblem:
    A: CsrMatrix
    b: np.ndarray
    row_norms_sq: np.ndarray
    frobenius_sq: float
    sigma_dual: float

    @classmethod
    def from_system(cls, A: CsrMatrix, b, sigma_dual: float | None = None) -> "ArkProblem":
        """sigma_dual defaults to the squared smallest nonzero singular value (dense, desk scale)."""
        b = as_vector(b, A.n_rows, "b", copy=True)
        row_norms = A.row_norms_sq()
        if np.any(row_norms <= 0.0):
            zero = int(np.flatnonzero(row_norms <= 0.0)[0])
            raise InvalidInputError(f"row {zero} of A is zero")
        if sigma_dual is None:
            sigma_dual = singular_value_extremes(A).lambda_min ** 2
        if sigma_dual <= 0.0:
            raise InvalidInputError("sigma_dual must be positive")
        return cls(A, b, row_norms, float(row_norms.sum()), float(sigma_dual))

    @property
    def m(self) -> int:
        return self.A.n_rows

    @property
    def kappa(self) -> float:
        """Relative condition number ||A||_F / sigma_min."""
        return math.sqrt(self.frobenius_sq / self.sigma_dual)


def ark_sampling_weights(problem: ArkProblem) -> np.ndarray:
    """max(||a_i||^2, ||A||_F^2 / m): the alpha = 1 threshold applied to the row norms."""
    return np.maximum(problem.row_norms_sq, problem.frobenius_sq / problem.m)


@dataclass
class ArkResult:
    x: np.ndarray
    trace: ConvergenceTrace
    status: str  # "converged", "plateau" or "budget"
    residual: float
    run: RunResult


class ResidualPlateau:
    """Stops a run when the best residual has not improved over a window of steps.

    ark_run sets the window to plateau_window_factor * m. The dual iteration has one
    coordinate per row, so m is its dimension even when m > n.
    """

    def __init__(self, A: CsrMatrix, b: np.ndarray, window: int, check_every: int, rtol: float):
        self.A = A
        self.b = b
        self.window = window
        self.check_every = check_every
        self.target = rtol * float(np.linalg.norm(b))
        self.best = math.inf
        self.best_k = 0
        self.status = "budget"
        self.residual = math.nan

    def __call__(self, engine: AcdmEngine) -> bool:
        if engine.k % self.check_every:
            return False
        x = engine.primal_solution()
        self.residual = float(np.linalg.norm(self.A.matvec(x) - self.b))
        if self.residual <= self.target:
            self.status = "converged"
            return True
        if self.residual < self.best * (1.0 - 1e-12):
            self.best = self.residual
            self.best_k = engine.k
        elif engine.k - self.best_k >= self.window:
            self.status = "plateau"
            logger.warning(
                "Kaczmarz residual %.3e has not improved for %d steps; system may be inconsistent",
                self.best, engine.k - self.best_k,
            )
            return True
        return False


def ark_run(problem: ArkProblem, x0=None, config: AcdmConfig | None = None, x_star=None,
            detect_plateau: bool = True) -> ArkResult:
    """Run accelerated Kaczmarz; x0 must lie in the row space of A (0 by default).

    With x_star the trace's f_gap is the dual gap ||x - x*||^2 / 2.
    """
    config = config or AcdmConfig(sigma=problem.sigma_dual)
    if config.alpha != 1.0:
        raise InvalidInputError("accelerated Kaczmarz samples rows with alpha = 1")
    if config.sigma is None and config.mode != AcdmMode.PLAIN:
        config = config.model_copy(update={"sigma": problem.sigma_dual})

    oracle = DualLeastSquaresOracle(problem.A, problem.b)
    if x_star is not None and config.f_star is None:
        x_star = as_vector(x_star, problem.A.n_cols, "x_star")
        # f(y) - f* = ||A^T y - x*||^2 / 2 for consistent systems
        config = config.model_copy(update={"f_star": -0.5 * float(np.dot(x_star, x_star))})

    y0 = None
    if x0 is not None:
        # Dual point with A^T y0 = x0
        x0 = as_vector(x0, problem.A.n_cols, "x0")
        y0 = np.linalg.lstsq(problem.A.to_dense().T, x0, rcond=None)[0]
    thresholded = None if config.mode == AcdmMode.PLAIN else ark_sampling_weights(problem)
    engine = AcdmEngine(oracle, config, y0, thresholded)

    observer = None
    if detect_plateau:
        observer = ResidualPlateau(
            problem.A,
            problem.b,
            window=SETTINGS.plateau_window_factor * problem.m,
            check_every=max(1, problem.m // 4),
            rtol=SETTINGS.plateau_rtol,
        )
    result = engine.run(observer)
    residual = float(np.linalg.norm(problem.A.matvec(result.primal) - problem.b))
    status = observer.status if observer is not None else "budget"
    if status == "budget" and residual <= SETTINGS.plateau_rtol * float(np.linalg.norm(problem.b)):
        status = "converged"
    return ArkResult(x=result.primal, trace=result.trace, status=status, residual=residual, run=result)
