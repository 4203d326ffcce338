"""
Conjugate gradient for symmetric positive definite systems.
"""

import time

import numpy as np

from acdm.trace import ConvergenceTrace
from core.errors import DimensionMismatchError, InvalidInputError, NumericalAbortError
from core.sparse import CsrMatrix
from core.vectors import as_vector


def cg_solve(A: CsrMatrix, b, x0=None, tol: float = 1e-10, max_iters: int | None = None,
             f_star: float | None = None) -> tuple[np.ndarray, ConvergenceTrace]:
    """Solve A x = b; stops when ||A x - b|| <= tol or after max_iters (default 2n).

    The trace's grad_sq column holds ||r_k||^2; f_gap is filled when f_star is given.
    """
    if A.n_rows != A.n_cols:
        raise DimensionMismatchError("A columns", A.n_rows, A.n_cols)
    if tol <= 0.0:
        raise InvalidInputError("tolerance must be positive")
    n = A.n_rows
    b = as_vector(b, n, "b")
    x = np.zeros(n) if x0 is None else as_vector(x0, n, "x0", copy=True)
    max_iters = 2 * n if max_iters is None else max_iters

    def gap(x: np.ndarray, r: np.ndarray) -> float:
        if f_star is None:
            return float("nan")
        # f(x) = x^T A x / 2 - b^T x with A x = b - r
        return float(0.5 * np.dot(x, b - r) - np.dot(b, x) - f_star)

    trace = ConvergenceTrace()
    start = time.perf_counter_ns()
    r = b - A.matvec(x)
    d = r.copy()
    rr = float(np.dot(r, r))
    trace.record(0, gap(x, r), rr, wall_ns=0)

    k = 0
    while np.sqrt(rr) > tol and k < max_iters:
        Ad = A.matvec(d)
        curvature = float(np.dot(d, Ad))
        if curvature <= 0.0:
            raise NumericalAbortError("conjugate gradient breakdown: nonpositive curvature", k)
        step = rr / curvature
        x += step * d
        r -= step * Ad
        rr_next = float(np.dot(r, r))
        d = r + (rr_next / rr) * d
        rr = rr_next
        k += 1
        trace.record(k, gap(x, r), rr, wall_ns=time.perf_counter_ns() - start)
    return x, trace
