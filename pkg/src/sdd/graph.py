"""
Weighted graphs for electrical-flow problems.

Edges carry a fixed orientation tail -> head and a resistance r_e > 0.
Sign conventions: (B x)_e = x_tail - x_head and B^T z = chi means the net
outflow of z at every vertex equals its demand.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from core.errors import InvalidInputError
from core.sparse import CsrMatrix


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    n: int
    tails: np.ndarray
    heads: np.ndarray
    resistances: np.ndarray

    def __post_init__(self):
        tails = np.asarray(self.tails, dtype=np.int64)
        heads = np.asarray(self.heads, dtype=np.int64)
        r = np.asarray(self.resistances, dtype=np.float64)
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "resistances", r)

        if self.n < 1:
            raise InvalidInputError("graph needs at least one vertex")
        if not (tails.shape == heads.shape == r.shape) or tails.ndim != 1:
            raise InvalidInputError("edge arrays must be one-dimensional and equally long")
        if tails.size and (min(tails.min(), heads.min()) < 0 or max(tails.max(), heads.max()) >= self.n):
            raise InvalidInputError("edge endpoint out of range")
        if np.any(tails == heads):
            loop = int(np.flatnonzero(tails == heads)[0])
            raise InvalidInputError(f"edge {loop} is a self-loop")
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            raise InvalidInputError("resistances must be finite and positive")
        if self.component_count != 1:
            raise InvalidInputError(f"graph is disconnected ({self.component_count} components)")

    @classmethod
    def from_edges(cls, n: int, edges) -> "WeightedGraph":
        """edges: iterable of (tail, head, resistance)."""
        arr = np.asarray(list(edges), dtype=np.float64).reshape(-1, 3)
        return cls(n, arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])

    @property
    def m(self) -> int:
        return int(self.tails.shape[0])

    @cached_property
    def component_count(self) -> int:
        adjacency = sp.coo_array((np.ones(self.m), (self.tails, self.heads)), shape=(self.n, self.n))
        count, _ = connected_components(adjacency, directed=False)
        return int(count)

    @cached_property
    def incidence(self) -> CsrMatrix:
        """m x n matrix with +1 at the tail and -1 at the head of every edge."""
        rows = np.repeat(np.arange(self.m), 2)
        cols = np.column_stack((self.tails, self.heads)).ravel()
        vals = np.tile([1.0, -1.0], self.m)
        return CsrMatrix.from_coo(self.m, self.n, rows, cols, vals)

    @cached_property
    def laplacian(self) -> CsrMatrix:
        """B^T R^-1 B."""
        B = self.incidence.scipy
        return CsrMatrix.from_scipy(B.T @ sp.diags_array(1.0 / self.resistances) @ B)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Incident edge ids per vertex, in edge order."""
        incident: list[list[int]] = [[] for _ in range(self.n)]
        for e, (a, b) in enumerate(zip(self.tails.tolist(), self.heads.tolist())):
            incident[a].append(e)
            incident[b].append(e)
        return incident

    def other_end(self, e: int, v: int) -> int:
        a, b = int(self.tails[e]), int(self.heads[e])
        return b if v == a else a

    # -- flows and potentials ---------------------------------------------

    def divergence(self, z: np.ndarray) -> np.ndarray:
        """B^T z: net outflow at every vertex."""
        return self.incidence.rmatvec(z)

    def energy(self, z: np.ndarray) -> float:
        """sum_e r_e z_e^2 / 2."""
        return 0.5 * float(np.dot(self.resistances, z * z))

    def potential_energy(self, x: np.ndarray) -> float:
        """x^T L x."""
        drop = self.incidence.matvec(x)
        return float(np.dot(drop * drop, 1.0 / self.resistances))


def graph_from_laplacian(L: CsrMatrix, rtol: float = 1e-10) -> WeightedGraph:
    """Recover the graph of a Laplacian; other SDD matrices are rejected."""
    if L.n_rows != L.n_cols or not L.is_symmetric(rtol):
        raise InvalidInputError("a Laplacian must be square and symmetric")
    dense_scale = np.abs(L.values).max() if L.nnz else 1.0
    upper = sp.triu(L.scipy, k=1).tocoo()
    if np.any(upper.data > rtol * dense_scale):
        raise InvalidInputError(
            "positive off-diagonal entries: reduce the SDD system to a Laplacian first "
            "(Gremban's double-cover reduction)"
        )
    row_sums = np.asarray(L.scipy.sum(axis=1)).ravel()
    if np.any(np.abs(row_sums) > rtol * dense_scale * max(1, L.n_rows)):
        raise InvalidInputError(
            "rows do not sum to zero: this is SDD but not a Laplacian; apply the standard "
            "SDD-to-Laplacian reduction (Gremban) before solving"
        )
    keep = upper.data < 0.0
    return WeightedGraph(L.n_rows, upper.row[keep], upper.col[keep], -1.0 / upper.data[keep])


def read_edge_list(path, n: int | None = None) -> WeightedGraph:
    """Whitespace-separated `u v resistance` lines, 0-based vertices; '#' starts a comment."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Edge list not found: {path}")
    try:
        data = np.loadtxt(path, dtype=np.float64, comments="#", ndmin=2)
    except ValueError as e:
        raise InvalidInputError(f"{path}: {e}") from e
    if data.size and data.shape[1] != 3:
        raise InvalidInputError(f"{path}: expected 3 columns (u v resistance), got {data.shape[1]}")
    ends = data[:, :2]
    if np.any(ends != np.round(ends)):
        raise InvalidInputError(f"{path}: vertex ids must be integers")
    if n is None:
        n = int(ends.max()) + 1 if data.size else 1
    return WeightedGraph(n, ends[:, 0].astype(np.int64), ends[:, 1].astype(np.int64), data[:, 2])


def write_edge_list(path, graph: WeightedGraph) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# n={graph.n} m={graph.m}\n")
        for a, b, r in zip(graph.tails.tolist(), graph.heads.tolist(), graph.resistances.tolist()):
            f.write(f"{a} {b} {r!r}\n")
