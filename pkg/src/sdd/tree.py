"""
Spanning trees and their stretch.

Two heuristics are offered: Kruskal on resistances (a minimum total-resistance
tree) and a BFS tree from vertex 0. Neither carries a low-stretch guarantee;
the measured total stretch is reported instead.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
import logging

import numpy as np

from core.errors import InvalidInputError
from sdd.graph import WeightedGraph
from sdd.path_structure import HeavyLightDecomposition

logger = logging.getLogger(__name__)

ROOT = 0


class TreeStrategy(str, Enum):
    MIN_RESISTANCE = "min-resistance"
    BFS = "bfs"


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self._parent = list(range(n))
        self._size = [1] * n

    def find(self, v: int) -> int:
        parent = self._parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self._size[a] < self._size[b]:
            a, b = b, a
        self._parent[b] = a
        self._size[a] += self._size[b]
        return True


@dataclass(frozen=True, eq=False)
class SpanningTree:
    graph: WeightedGraph
    parent: np.ndarray  # parent vertex, -1 at the root
    parent_edge: np.ndarray  # edge id joining v to its parent, -1 at the root
    upward_sign: np.ndarray  # +1 when parent_edge[v] is oriented v -> parent
    in_tree: np.ndarray
    off_tree: np.ndarray  # off-tree edge ids, ascending
    stretch: np.ndarray  # per off-tree edge
    hld: HeavyLightDecomposition
    depth_resistance: np.ndarray  # resistance of the root path

    @classmethod
    def from_edges(cls, graph: WeightedGraph, edge_ids) -> "SpanningTree":
        """Root the given n - 1 edges at vertex 0; they must span the graph."""
        ids = np.unique(np.asarray(list(edge_ids), dtype=np.int64))
        n = graph.n
        if ids.size != n - 1:
            raise InvalidInputError(f"a spanning tree has {n - 1} distinct edges, got {ids.size}")
        if ids.size and (ids[0] < 0 or ids[-1] >= graph.m):
            raise InvalidInputError("tree edge id out of range")

        incident: list[list[int]] = [[] for _ in range(n)]
        for e in ids.tolist():
            incident[int(graph.tails[e])].append(e)
            incident[int(graph.heads[e])].append(e)

        parent = np.full(n, -1, dtype=np.int64)
        parent_edge = np.full(n, -1, dtype=np.int64)
        seen = np.zeros(n, dtype=bool)
        seen[ROOT] = True
        queue = deque([ROOT])
        while queue:
            v = queue.popleft()
            for e in incident[v]:
                w = graph.other_end(e, v)
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    parent_edge[w] = e
                    queue.append(w)
        if not seen.all():
            raise InvalidInputError("edges do not span the graph (they contain a cycle)")

        upward_sign = np.zeros(n)
        for v in range(n):
            e = parent_edge[v]
            if e >= 0:
                upward_sign[v] = 1.0 if graph.tails[e] == v else -1.0

        in_tree = np.zeros(graph.m, dtype=bool)
        in_tree[ids] = True
        off_tree = np.flatnonzero(~in_tree)

        hld = HeavyLightDecomposition(parent, ROOT)
        depth_resistance = np.zeros(n)
        for v in hld.order[1:]:
            depth_resistance[v] = depth_resistance[parent[v]] + graph.resistances[parent_edge[v]]

        stretch = np.empty(off_tree.size)
        for j, e in enumerate(off_tree.tolist()):
            a, b = int(graph.tails[e]), int(graph.heads[e])
            top = hld.lca(a, b)
            path = depth_resistance[a] + depth_resistance[b] - 2.0 * depth_resistance[top]
            stretch[j] = path / graph.resistances[e]

        return cls(graph, parent, parent_edge, upward_sign, in_tree, off_tree, stretch, hld, depth_resistance)

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def off_index(self) -> np.ndarray:
        """Position of every edge in off_tree, -1 for tree edges."""
        index = np.full(self.graph.m, -1, dtype=np.int64)
        index[self.off_tree] = np.arange(self.off_tree.size)
        return index

    @property
    def tree_edges(self) -> np.ndarray:
        return np.flatnonzero(self.in_tree)

    @property
    def lipschitz(self) -> np.ndarray:
        """Coordinate constants st(e) + 1 of the off-tree edges."""
        return self.stretch + 1.0

    def edge_resistance_by_vertex(self) -> np.ndarray:
        """Resistance of every vertex's parent edge; 0 at the root."""
        out = np.zeros(self.n)
        has_parent = self.parent_edge >= 0
        out[has_parent] = self.graph.resistances[self.parent_edge[has_parent]]
        return out

    def path_resistance(self, a: int, b: int) -> float:
        top = self.hld.lca(a, b)
        return float(self.depth_resistance[a] + self.depth_resistance[b] - 2.0 * self.depth_resistance[top])


def _kruskal(graph: WeightedGraph) -> list[int]:
    order = np.lexsort((np.arange(graph.m), graph.resistances))
    sets = UnionFind(graph.n)
    chosen = []
    for e in order.tolist():
        if sets.union(int(graph.tails[e]), int(graph.heads[e])):
            chosen.append(e)
            if len(chosen) == graph.n - 1:
                break
    return chosen


def _bfs(graph: WeightedGraph) -> list[int]:
    seen = np.zeros(graph.n, dtype=bool)
    seen[ROOT] = True
    chosen = []
    queue = deque([ROOT])
    while queue:
        v = queue.popleft()
        for e in graph.adjacency[v]:
            w = graph.other_end(e, v)
            if not seen[w]:
                seen[w] = True
                chosen.append(e)
                queue.append(w)
    return chosen


def build_spanning_tree(graph: WeightedGraph, strategy: TreeStrategy | str = TreeStrategy.MIN_RESISTANCE) -> SpanningTree:
    strategy = TreeStrategy(strategy)
    if graph.component_count != 1:
        raise InvalidInputError("cannot span a disconnected graph")
    edges = _kruskal(graph) if strategy == TreeStrategy.MIN_RESISTANCE else _bfs(graph)
    tree = SpanningTree.from_edges(graph, edges)
    logger.info(
        "%s tree: %d off-tree edges, total stretch %.4g",
        strategy.value, tree.off_tree.size, measured_total_stretch(tree),
    )
    return tree


def measured_total_stretch(tree: SpanningTree) -> float:
    """sum over off-tree edges of st(e) + 1; zero when the graph is a tree."""
    return float(tree.lipschitz.sum())
