"""
Small dense direct solvers.

These back the test harness and the benchmark's reference values (f*, x*,
convexity parameters). They are O(n^3) and capped at desk-scale sizes; no
solver path depends on them.
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

from core.errors import InvalidInputError
from core.sparse import CsrMatrix

MAX_DENSE_DIM = 2000


def _dense(A: CsrMatrix | np.ndarray) -> np.ndarray:
    M = A.to_dense() if isinstance(A, CsrMatrix) else np.asarray(A, dtype=np.float64)
    if max(M.shape) > MAX_DENSE_DIM:
        raise InvalidInputError(f"dense reference limited to dimension {MAX_DENSE_DIM}, got {M.shape}")
    return M


class SpectrumExtremes(NamedTuple):
    lambda_min: float
    lambda_max: float


def extreme_eigenvalues(A: CsrMatrix | np.ndarray) -> SpectrumExtremes:
    """Smallest and largest eigenvalue of a symmetric matrix."""
    eig = scipy.linalg.eigvalsh(_dense(A))
    return SpectrumExtremes(float(eig[0]), float(eig[-1]))


def weighted_convexity(A: CsrMatrix | np.ndarray, weights: np.ndarray) -> float:
    """Strong convexity of x -> x^T A x / 2 in the norm sum_i w_i x_i^2.

    Equals lambda_min(W^-1/2 A W^-1/2).
    """
    scale = 1.0 / np.sqrt(np.asarray(weights, dtype=np.float64))
    M = _dense(A) * scale[:, None] * scale[None, :]
    return float(scipy.linalg.eigvalsh(M, subset_by_index=[0, 0])[0])


def solve_spd(A: CsrMatrix | np.ndarray, b: np.ndarray) -> np.ndarray:
    return scipy.linalg.solve(_dense(A), np.asarray(b, dtype=np.float64), assume_a="pos")


def least_norm_solution(A: CsrMatrix | np.ndarray, b: np.ndarray) -> np.ndarray:
    return scipy.linalg.lstsq(_dense(A), np.asarray(b, dtype=np.float64))[0]


def singular_value_extremes(A: CsrMatrix | np.ndarray, rtol: float = 1e-12) -> SpectrumExtremes:
    """Smallest nonzero and largest singular value."""
    s = scipy.linalg.svdvals(_dense(A))
    nonzero = s[s > rtol * s[0]]
    return SpectrumExtremes(float(nonzero[-1]), float(s[0]))


def laplacian_solve(L: CsrMatrix | np.ndarray, chi: np.ndarray) -> np.ndarray:
    """Mean-zero potentials x with L x = chi, via the pseudo-inverse."""
    x = scipy.linalg.lstsq(_dense(L), np.asarray(chi, dtype=np.float64))[0]
    return x - x.mean()
