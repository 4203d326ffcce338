"""
Problem loading for the benchmark: generated problems and problem files.
"""

from pathlib import Path
from typing import Any, Dict
import json

import numpy as np

from bench.generators import GRAPH, LEAST_SQUARES, SPD, BenchProblem, generate_problem, with_reference
from bench.spec import ProblemSpec
from core.errors import DimensionMismatchError
from core.matrix_market import read_matrix_market, read_vector
from core.sparse import CsrMatrix
from sdd.graph import read_edge_list


class ProblemLoader:
    """Loads problems from disk or generators, caching by source."""

    def __init__(self):
        self._cache: Dict[str, Any] = {}

    def load_matrix(self, path) -> tuple[str, CsrMatrix]:
        """Matrix Market file; square symmetric matrices become SPD problems."""
        key = f"matrix_{Path(path).resolve()}"
        if key not in self._cache:
            A = read_matrix_market(path)
            kind = SPD if A.n_rows == A.n_cols and A.is_symmetric(1e-12) else LEAST_SQUARES
            self._cache[key] = (kind, A)
        return self._cache[key]

    def load_vector(self, path) -> np.ndarray:
        key = f"vector_{Path(path).resolve()}"
        if key not in self._cache:
            self._cache[key] = read_vector(path)
        return self._cache[key].copy()

    def load_meta(self, directory) -> Dict[str, Any]:
        """meta.json next to generated problem files; empty when absent."""
        filepath = Path(directory) / "meta.json"
        key = f"json_{filepath.resolve()}"
        if key in self._cache:
            return self._cache[key]
        if not filepath.exists():
            return {}
        with open(filepath, "r", encoding="utf-8") as f:
            data = json.load(f)
        self._cache[key] = data
        return data

    def load(self, spec: ProblemSpec) -> BenchProblem:
        if spec.generator is not None:
            key = f"gen_{spec.generator}_{sorted(spec.params.items())}_{spec.seed}"
            if key not in self._cache:
                self._cache[key] = generate_problem(spec.generator, spec.params, spec.seed)
            return self._cache[key]

        if spec.matrix is not None:
            kind, A = self.load_matrix(spec.matrix)
            b = self.load_vector(spec.rhs)
            if b.shape[0] != A.n_rows:
                raise DimensionMismatchError("rhs length", A.n_rows, b.shape[0])
            meta = {"source": str(spec.matrix), **self.load_meta(spec.matrix.parent)}
            return with_reference(BenchProblem(kind, A=A, b=b, meta=meta))

        graph = read_edge_list(spec.edges)
        chi = self.load_vector(spec.demands)
        if chi.shape[0] != graph.n:
            raise DimensionMismatchError("demand length", graph.n, chi.shape[0])
        meta = {"source": str(spec.edges), **self.load_meta(spec.edges.parent)}
        return with_reference(BenchProblem(GRAPH, b=chi, graph=graph, meta=meta))
