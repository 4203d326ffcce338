"""
Matrix Market and plain-text vector I/O.
"""

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from core.errors import InvalidInputError
from core.sparse import CsrMatrix
from core.vectors import as_vector

UNSUPPORTED_FIELDS = ("pattern", "complex")


def _header(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.readline().strip().lower()


def read_matrix_market(path) -> CsrMatrix:
    """Read a real general or symmetric Matrix Market file (coordinate or array)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    if not _header(path).startswith("%%matrixmarket"):
        raise InvalidInputError(f"{path} is not a Matrix Market file")

    _, _, _, fmt, field, _ = scipy.io.mminfo(path)
    if field in UNSUPPORTED_FIELDS:
        raise InvalidInputError(f"{path}: Matrix Market field '{field}' is not supported (real only)")

    data = scipy.io.mmread(path)
    if fmt == "array":
        return CsrMatrix.from_dense(np.asarray(data, dtype=np.float64))
    return CsrMatrix.from_scipy(data)


def write_matrix_market(path, matrix: CsrMatrix, comment: str = "") -> None:
    """Write in coordinate format; symmetric matrices are stored as one triangle."""
    if matrix.is_symmetric():
        symmetry, entries = "symmetric", sp.tril(matrix.scipy).tocoo()
    else:
        symmetry, entries = "general", matrix.scipy.tocoo()
    scipy.io.mmwrite(str(path), entries, comment=comment, field="real", precision=17, symmetry=symmetry)


def read_vector(path) -> np.ndarray:
    """Read a one-column Matrix Market array or a plain text file with one value per line."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Vector file not found: {path}")
    if _header(path).startswith("%%matrixmarket"):
        _, _, _, _, field, _ = scipy.io.mminfo(path)
        if field in UNSUPPORTED_FIELDS:
            raise InvalidInputError(f"{path}: Matrix Market field '{field}' is not supported (real only)")
        data = scipy.io.mmread(path)
        if hasattr(data, "toarray"):
            data = data.toarray()
        data = np.asarray(data, dtype=np.float64)
        if data.ndim == 2 and 1 not in data.shape:
            raise InvalidInputError(f"{path}: expected a single column, got shape {data.shape}")
        return as_vector(data.ravel(), name=str(path))
    try:
        values = np.loadtxt(path, dtype=np.float64, ndmin=1)
    except ValueError as e:
        raise InvalidInputError(f"{path}: {e}") from e
    return as_vector(values, name=str(path))


def write_vector(path, values: np.ndarray) -> None:
    np.savetxt(path, np.asarray(values, dtype=np.float64), fmt="%.17g")
