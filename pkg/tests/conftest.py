"""
Pytest configuration and shared fixtures for the solver tests.
"""

import pytest
import sys
import os

import numpy as np

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from core.sparse import CsrMatrix
from sdd.graph import WeightedGraph


def random_spd(n: int, cond: float, seed: int) -> np.ndarray:
    """Dense SPD matrix with eigenvalues geometrically spaced in [1, cond]."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = (Q * np.geomspace(1.0, cond, n)) @ Q.T
    return 0.5 * (A + A.T)


@pytest.fixture
def rng():
    """A fixed-seed generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def diag12():
    """The 2x2 system diag(1, 2) x = (1, 1)."""
    return CsrMatrix.from_dense(np.diag([1.0, 2.0])), np.array([1.0, 1.0])


@pytest.fixture
def spd_system():
    """A 30x30 SPD system with condition number 50 and its solution."""
    A = random_spd(30, 50.0, seed=7)
    b = np.random.default_rng(8).standard_normal(30)
    return CsrMatrix.from_dense(A), b, np.linalg.solve(A, b)


@pytest.fixture
def gaussian_system():
    """A consistent 120x20 Gaussian system and its solution."""
    rng = np.random.default_rng(21)
    A = rng.standard_normal((120, 20))
    x_star = rng.standard_normal(20)
    return CsrMatrix.from_dense(A), A @ x_star, x_star


@pytest.fixture
def triangle():
    """Unit triangle on vertices 0, 1, 2 with edges 0->1, 0->2, 2->1."""
    return WeightedGraph.from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)])


@pytest.fixture
def triangle_tree_ids():
    """Tree {(0,2), (2,1)} leaving edge (0,1) off-tree."""
    return [1, 2]
