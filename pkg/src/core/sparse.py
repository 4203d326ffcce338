"""
Compressed sparse row matrices.

CsrMatrix keeps the raw CSR arrays so that row access in the solver hot loops
is a pair of array slices. Bulk products go through a cached SciPy view.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from core.errors import DimensionMismatchError, InvalidInputError
from core.vectors import as_vector


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Immutable CSR matrix with validated structure."""

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        row_ptr = np.asarray(self.row_ptr, dtype=np.int64)
        col_idx = np.asarray(self.col_idx, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)

        if self.n_rows < 0 or self.n_cols < 0:
            raise InvalidInputError("matrix dimensions must be nonnegative")
        if row_ptr.shape != (self.n_rows + 1,):
            raise InvalidInputError("row_ptr must have length n_rows + 1")
        if row_ptr[0] != 0 or row_ptr[-1] != col_idx.shape[0]:
            raise InvalidInputError("row_ptr must start at 0 and end at nnz")
        if col_idx.shape != values.shape:
            raise InvalidInputError("col_idx and values must have equal length")
        if np.any(np.diff(row_ptr) < 0):
            raise InvalidInputError("row_ptr must be nondecreasing")
        if col_idx.size:
            if col_idx.min() < 0 or col_idx.max() >= self.n_cols:
                raise InvalidInputError("column index out of range")
            # Strictly increasing inside a row; row boundaries are exempt
            steps = np.diff(col_idx)
            boundary = np.zeros(steps.shape, dtype=bool)
            starts = row_ptr[1:-1]
            starts = starts[(starts > 0) & (starts < col_idx.size)]
            boundary[starts - 1] = True
            if np.any((steps <= 0) & ~boundary):
                raise InvalidInputError("column indices must be strictly increasing within each row")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("matrix values must be finite")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_scipy(cls, matrix) -> "CsrMatrix":
        csr = sp.csr_array(matrix, dtype=np.float64, copy=True)
        csr.sum_duplicates()
        csr.sort_indices()
        return cls(csr.shape[0], csr.shape[1], csr.indptr, csr.indices, csr.data)

    @classmethod
    def from_dense(cls, array) -> "CsrMatrix":
        dense = np.atleast_2d(np.asarray(array, dtype=np.float64))
        if dense.ndim != 2:
            raise InvalidInputError("dense matrix must be two-dimensional")
        return cls.from_scipy(sp.csr_array(dense))

    @classmethod
    def from_coo(cls, n_rows: int, n_cols: int, rows, cols, vals) -> "CsrMatrix":
        """Build from triplets; duplicate entries are summed."""
        coo = sp.coo_array(
            (np.asarray(vals, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
            shape=(n_rows, n_cols),
        )
        return cls.from_scipy(coo)

    @classmethod
    def identity(cls, n: int) -> "CsrMatrix":
        return cls.from_scipy(sp.identity(n, format="csr"))

    @classmethod
    def diagonal_matrix(cls, diag) -> "CsrMatrix":
        return cls.from_scipy(sp.diags_array(np.asarray(diag, dtype=np.float64), format="csr"))

    # -- properties -------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.col_idx.shape[0])

    @cached_property
    def scipy(self) -> sp.csr_array:
        """SciPy view sharing this matrix's arrays."""
        return sp.csr_array((self.values, self.col_idx, self.row_ptr), shape=self.shape)

    # -- access -----------------------------------------------------------

    def row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """Column indices and values of row i (views)."""
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        return self.col_idx[lo:hi], self.values[lo:hi]

    def diagonal(self) -> np.ndarray:
        return self.scipy.diagonal().astype(np.float64)

    def row_norms_sq(self) -> np.ndarray:
        """Squared Euclidean norm of every row."""
        sq = self.values * self.values
        # reduceat misbehaves on empty rows; use a cumulative sum instead
        csum = np.concatenate(([0.0], np.cumsum(sq)))
        return csum[self.row_ptr[1:]] - csum[self.row_ptr[:-1]]

    def frobenius_sq(self) -> float:
        return float(np.dot(self.values, self.values))

    # -- products ---------------------------------------------------------

    def matvec(self, x) -> np.ndarray:
        x = as_vector(x, self.n_cols, "x")
        return np.asarray(self.scipy @ x, dtype=np.float64)

    def rmatvec(self, y) -> np.ndarray:
        """Product with the transpose, A^T y."""
        y = as_vector(y, self.n_rows, "y")
        return np.asarray(self.scipy.T @ y, dtype=np.float64)

    def transpose(self) -> "CsrMatrix":
        return CsrMatrix.from_scipy(self.scipy.T.tocsr())

    def to_dense(self) -> np.ndarray:
        return self.scipy.toarray()

    def is_symmetric(self, rtol: float = 0.0) -> bool:
        if self.n_rows != self.n_cols:
            return False
        diff = (self.scipy - self.scipy.T).tocsr()
        if diff.nnz == 0:
            return True
        scale = np.abs(self.values).max() if self.nnz else 0.0
        return bool(np.abs(diff.data).max() <= rtol * scale)


def csr_row_dot(M: CsrMatrix, i: int, x: np.ndarray) -> float:
    """Dot product of row i of M with x; cost proportional to nnz of row i."""
    if not 0 <= i < M.n_rows:
        raise InvalidInputError(f"row index {i} out of range for {M.n_rows} rows")
    if x.shape[0] != M.n_cols:
        raise DimensionMismatchError("x", M.n_cols, x.shape[0])
    cols, vals = M.row(i)
    return float(np.dot(vals, x[cols]))
