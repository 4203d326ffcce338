"""
Randomized Kaczmarz: project onto the hyperplane <a_i, x> = b_i of a row
sampled with probability proportional to ||a_i||^2.
"""

import math
import time

import numpy as np

from acdm.trace import ConvergenceTrace
from config import SETTINGS
from core.errors import InvalidInputError
from core.sampling import AliasSampler, CoordinateStream, make_streams
from core.sparse import CsrMatrix
from core.vectors import as_vector


class RandomizedKaczmarz:
    """Holds the row norms and sampler for one system."""

    def __init__(self, A: CsrMatrix, b, seed: int = 0):
        self.A = A
        self.b = as_vector(b, A.n_rows, "b", copy=True)
        self.row_norms = A.row_norms_sq()
        if np.any(self.row_norms <= 0.0):
            zero = int(np.flatnonzero(self.row_norms <= 0.0)[0])
            raise InvalidInputError(f"row {zero} of A is zero")
        self.sampler = AliasSampler(self.row_norms)
        self.rows = CoordinateStream(self.sampler, make_streams(seed).coordinates, SETTINGS.sample_block)

    def project(self, x: np.ndarray, i: int) -> None:
        """In-place projection of x onto row i's hyperplane."""
        cols, vals = self.A.row(i)
        residual = float(np.dot(vals, x[cols])) - self.b[i]
        x[cols] += (-residual / self.row_norms[i]) * vals

    def run(self, x0=None, max_iters: int = 1000, x_star=None, record_stride: int = 1) -> tuple[np.ndarray, ConvergenceTrace]:
        """Trace f_gap is ||x - x*||^2 / 2 when x_star is given."""
        x = np.zeros(self.A.n_cols) if x0 is None else as_vector(x0, self.A.n_cols, "x0", copy=True)
        x_star = None if x_star is None else as_vector(x_star, self.A.n_cols, "x_star")

        def gap() -> float:
            if x_star is None:
                return math.nan
            e = x - x_star
            return 0.5 * float(np.dot(e, e))

        trace = ConvergenceTrace()
        start = time.perf_counter_ns()
        trace.record(0, gap(), wall_ns=0)
        for k in range(1, max_iters + 1):
            i = self.rows.draw()
            self.project(x, i)
            if k % record_stride == 0 or k == max_iters:
                trace.record(k, gap(), coord=i, wall_ns=time.perf_counter_ns() - start)
        return x, trace


def rk_step(A: CsrMatrix, b, x, rng: np.random.Generator) -> np.ndarray:
    """One projection from x onto a row drawn with probability ||a_i||^2 / ||A||_F^2."""
    row_norms = A.row_norms_sq()
    if np.any(row_norms <= 0.0):
        raise InvalidInputError("A has a zero row")
    i = AliasSampler(row_norms).sample(rng)
    return project_onto_row(A, b, x, i)


def project_onto_row(A: CsrMatrix, b, x, i: int) -> np.ndarray:
    x_next = as_vector(x, A.n_cols, "x", copy=True)
    cols, vals = A.row(i)
    norm_sq = float(np.dot(vals, vals))
    if norm_sq <= 0.0:
        raise InvalidInputError(f"row {i} of A is zero")
    x_next[cols] += ((b[i] - float(np.dot(vals, x_next[cols]))) / norm_sq) * vals
    return x_next
