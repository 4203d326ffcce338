"""
Synthetic problems for the benchmark.

spd       symmetric positive definite system with a prescribed spectrum
gaussian  overdetermined Gaussian system (consistent by default)
graph     random connected weighted graph with mean-zero demands
hard      the tridiagonal lower-bound quadratic
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional
import inspect
import json
import logging

import numpy as np

from core.dense import MAX_DENSE_DIM, laplacian_solve, least_norm_solution, singular_value_extremes, solve_spd
from core.errors import InvalidInputError
from core.matrix_market import write_matrix_market, write_vector
from core.sparse import CsrMatrix
from hardinstance.instance import make_hard_instance
from sdd.graph import WeightedGraph, write_edge_list

logger = logging.getLogger(__name__)

SPD = "spd"
LEAST_SQUARES = "least-squares"
GRAPH = "graph"


@dataclass(eq=False)
class BenchProblem:
    """One problem in memory: a matrix system or a graph with demands."""

    kind: str
    A: Optional[CsrMatrix] = None
    b: Optional[np.ndarray] = None
    graph: Optional[WeightedGraph] = None
    x_star: Optional[np.ndarray] = None
    f_star: Optional[float] = None
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.graph.n if self.kind == GRAPH else self.A.n_cols

    def write(self, out_dir) -> list[Path]:
        """Write the problem files plus meta.json; returns the paths written."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if self.kind == GRAPH:
            paths = [out_dir / "graph.edges", out_dir / "demands.txt"]
            write_edge_list(paths[0], self.graph)
            write_vector(paths[1], self.b)
        else:
            paths = [out_dir / "matrix.mtx", out_dir / "rhs.txt"]
            write_matrix_market(paths[0], self.A, comment=f"{self.meta.get('generator', self.kind)} problem")
            write_vector(paths[1], self.b)
        meta_path = out_dir / "meta.json"
        with open(meta_path, "w", encoding="utf-8") as f:
            json.dump({"kind": self.kind, **self.meta}, f, indent=2, sort_keys=True)
        paths.append(meta_path)
        return paths


def with_reference(problem: BenchProblem) -> BenchProblem:
    """Fill x* and f* by a dense solve when the problem is small enough."""
    if problem.x_star is not None or problem.dim > MAX_DENSE_DIM:
        return problem
    if problem.kind == SPD:
        problem.x_star = solve_spd(problem.A, problem.b)
        problem.f_star = -0.5 * float(np.dot(problem.b, problem.x_star))
    elif problem.kind == LEAST_SQUARES:
        problem.x_star = least_norm_solution(problem.A, problem.b)
    else:
        problem.x_star = laplacian_solve(problem.graph.laplacian, problem.b)
    return problem


def _spectrum(n: int, spectrum: str, cond: float, rng: np.random.Generator) -> np.ndarray:
    if spectrum == "geometric":
        return np.geomspace(1.0, cond, n)
    if spectrum == "linear":
        return np.linspace(1.0, cond, n)
    if spectrum == "random":
        inner = np.sort(rng.uniform(1.0, cond, max(0, n - 2)))
        return np.concatenate(([1.0], inner, [cond]))[:n] if n > 1 else np.array([1.0])
    raise InvalidInputError(f"unknown spectrum {spectrum!r}; use geometric, linear or random")


def spd_problem(n: int = 100, spectrum: str = "geometric", cond: float = 100.0, seed: int = 0) -> BenchProblem:
    """Q diag(lambda) Q^T with a Haar-random orthogonal Q; lambda runs from 1 to cond."""
    if n < 1 or n > MAX_DENSE_DIM:
        raise InvalidInputError(f"spd generator needs 1 <= n <= {MAX_DENSE_DIM}")
    if cond < 1.0:
        raise InvalidInputError("cond must be at least 1")
    rng = np.random.default_rng(seed)
    eigenvalues = _spectrum(n, spectrum, float(cond), rng)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q *= np.sign(np.diag(R))
    dense = (Q * eigenvalues) @ Q.T
    dense = 0.5 * (dense + dense.T)
    b = rng.standard_normal(n)
    meta = {
        "generator": "spd",
        "n": n,
        "spectrum": spectrum,
        "seed": seed,
        "lambda_min": float(eigenvalues.min()),
        "lambda_max": float(eigenvalues.max()),
        "condition": float(eigenvalues.max() / eigenvalues.min()),
        "trace": float(eigenvalues.sum()),
        "numerical_rank": float(eigenvalues.sum() / eigenvalues.max()),
    }
    return with_reference(BenchProblem(SPD, A=CsrMatrix.from_dense(dense), b=b, meta=meta))


def gaussian_problem(m: int = 200, n: int = 50, consistent: bool = True, seed: int = 0) -> BenchProblem:
    if m < 1 or n < 1:
        raise InvalidInputError("gaussian generator needs positive m and n")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    x_true = rng.standard_normal(n)
    b = A @ x_true
    if not consistent:
        b = b + 0.1 * rng.standard_normal(m)
    matrix = CsrMatrix.from_dense(A)
    extremes = singular_value_extremes(matrix)
    meta = {
        "generator": "gaussian",
        "m": m,
        "n": n,
        "seed": seed,
        "consistent": consistent,
        "sigma_min": extremes.lambda_min,
        "sigma_max": extremes.lambda_max,
        "kappa": float(np.sqrt(matrix.frobenius_sq()) / extremes.lambda_min),
    }
    return with_reference(BenchProblem(LEAST_SQUARES, A=matrix, b=b, meta=meta))


def random_graph(n: int, m: int, rng: np.random.Generator, r_min: float = 1.0, r_max: float = 10.0) -> WeightedGraph:
    """A random recursive tree plus m - n + 1 distinct extra edges; log-uniform resistances."""
    if n < 2:
        raise InvalidInputError("graph generator needs n >= 2")
    if not n - 1 <= m <= n * (n - 1) // 2:
        raise InvalidInputError(f"m must lie in [{n - 1}, {n * (n - 1) // 2}] for n={n}")
    edges = set()
    tails, heads = [], []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
        tails.append(u)
        heads.append(v)
    while len(tails) < m:
        u, v = sorted(int(t) for t in rng.choice(n, size=2, replace=False))
        if (u, v) in edges:
            continue
        edges.add((u, v))
        tails.append(u)
        heads.append(v)
    r = np.exp(rng.uniform(np.log(r_min), np.log(r_max), m))
    # Random orientation
    flip = rng.random(m) < 0.5
    t, h = np.array(tails), np.array(heads)
    return WeightedGraph(n, np.where(flip, h, t), np.where(flip, t, h), r)


def graph_problem(n: int = 50, m: int = 200, seed: int = 0) -> BenchProblem:
    rng = np.random.default_rng(seed)
    graph = random_graph(n, m, rng)
    chi = rng.standard_normal(n)
    chi -= chi.mean()
    meta = {"generator": "graph", "n": n, "m": m, "seed": seed, "off_tree_edges": m - n + 1}
    return with_reference(BenchProblem(GRAPH, b=chi, graph=graph, meta=meta))


def hard_problem(n: int = 50, sigma: float = 0.01, s1: float = 4.0, seed: int = 0) -> BenchProblem:
    instance = make_hard_instance(n, sigma, s1)
    meta = {"generator": "hard", "n": n, "sigma": sigma, "s1": s1, "q": instance.q, "L": instance.L}
    return BenchProblem(SPD, A=instance.H, b=instance.c, x_star=instance.x_star, f_star=instance.f_star, meta=meta)


GENERATORS: dict[str, Callable[..., BenchProblem]] = {
    "spd": spd_problem,
    "gaussian": gaussian_problem,
    "graph": graph_problem,
    "hard": hard_problem,
}


def generate_problem(name: str, params: dict[str, Any] | None = None, seed: int = 0) -> BenchProblem:
    if name not in GENERATORS:
        raise InvalidInputError(f"unknown generator {name!r}; available: {', '.join(sorted(GENERATORS))}")
    generator = GENERATORS[name]
    params = dict(params or {})
    accepted = inspect.signature(generator).parameters
    unknown = sorted(set(params) - set(accepted))
    if unknown:
        raise InvalidInputError(f"generator {name!r} does not take {unknown}; it takes {sorted(accepted)}")
    params.setdefault("seed", seed)
    problem = generator(**params)
    logger.info("generated %s problem of dimension %d", name, problem.dim)
    return problem
