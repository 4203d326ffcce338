"""
Flows on a graph split by a spanning tree.

Off-tree edge flows are stored explicitly; tree-edge flows live in a
TreePathStructure as upward flows. A cycle update touches one off-tree value
and one tree path, so B^T z is preserved exactly up to rounding.
"""

from dataclasses import dataclass
import logging

import numpy as np

from core.errors import InvalidInputError
from core.vectors import as_vector
from sdd.path_structure import TreePathStructure
from sdd.tree import SpanningTree

logger = logging.getLogger(__name__)

DEMAND_SUM_TOL = 1e-12


@dataclass(eq=False)
class FlowState:
    tree: SpanningTree
    off: np.ndarray  # flow on each off-tree edge, in off_tree order
    paths: TreePathStructure
    chi: np.ndarray

    @classmethod
    def circulation(cls, tree: SpanningTree, off=None) -> "FlowState":
        """A flow with zero demands whose off-tree part is `off` (zero by default)."""
        off = np.zeros(tree.off_tree.size) if off is None else np.array(off, dtype=np.float64)
        state = cls(tree, off, TreePathStructure(tree.hld, tree.edge_resistance_by_vertex()), np.zeros(tree.n))
        resync(state)
        return state

    def push(self, j: int, delta: float) -> None:
        """Add delta units around the cycle of off-tree edge j (tail -> head, then back through the tree)."""
        e = int(self.tree.off_tree[j])
        g = self.tree.graph
        self.off[j] += delta
        self.paths.path_add(int(g.heads[e]), int(g.tails[e]), delta)

    def cycle_sum(self, j: int) -> float:
        """sum of r * z around the cycle of off-tree edge j."""
        e = int(self.tree.off_tree[j])
        g = self.tree.graph
        return g.resistances[e] * self.off[j] + self.paths.path_weighted_sum(int(g.heads[e]), int(g.tails[e]))


def check_demands(chi, n: int) -> np.ndarray:
    """Validate a demand vector and remove the rounding residue of its sum."""
    chi = as_vector(chi, n, "demands", copy=True)
    total = float(chi.sum())
    if abs(total) > DEMAND_SUM_TOL * max(1.0, float(np.abs(chi).sum())):
        raise InvalidInputError(f"demands must sum to zero, got {total:.3e}")
    chi -= total / n
    return chi


def tree_route(tree: SpanningTree, demand: np.ndarray) -> np.ndarray:
    """Upward flow on every parent edge that routes `demand` through the tree alone."""
    subtree = np.array(demand, dtype=np.float64)
    parent = tree.parent
    for v in reversed(tree.hld.order[1:]):
        subtree[parent[v]] += subtree[v]
    subtree[tree.hld.root] = 0.0
    return subtree


def tree_potentials(tree: SpanningTree, upward: np.ndarray) -> np.ndarray:
    """Potentials with phi(root) = 0 that drive `upward` through every tree edge."""
    r = tree.edge_resistance_by_vertex()
    phi = np.zeros(tree.n)
    parent = tree.parent
    for v in tree.hld.order[1:]:
        phi[v] = phi[parent[v]] + r[v] * upward[v]
    return phi


def resync(state: FlowState) -> None:
    """Re-derive the tree-edge flows from the demands and the off-tree flows."""
    tree = state.tree
    g = tree.graph
    demand = state.chi.copy()
    off_edges = tree.off_tree
    np.subtract.at(demand, g.tails[off_edges], state.off)
    np.add.at(demand, g.heads[off_edges], state.off)
    state.paths.load(tree_route(tree, demand))


def initial_tree_flow(tree: SpanningTree, chi) -> FlowState:
    """The flow meeting the demands on tree edges only."""
    chi = check_demands(chi, tree.n)
    state = FlowState(
        tree,
        np.zeros(tree.off_tree.size),
        TreePathStructure(tree.hld, tree.edge_resistance_by_vertex()),
        chi,
    )
    state.paths.load(tree_route(tree, chi))
    return state


def _off_position(tree: SpanningTree, e: int) -> int:
    if e < 0 or e >= tree.graph.m:
        raise InvalidInputError(f"edge {e} out of range")
    j = int(tree.off_index[e])
    if j < 0:
        raise InvalidInputError(f"edge {e} is a tree edge and has no cycle")
    return j


def cycle_partial(state: FlowState, e: int) -> float:
    """Cycle sum for graph edge e, which must be off-tree."""
    return state.cycle_sum(_off_position(state.tree, e))


def cycle_update(state: FlowState, e: int) -> FlowState:
    """Exact minimization of the energy along the cycle of off-tree edge e, in place."""
    j = _off_position(state.tree, e)
    tree = state.tree
    r_e = tree.graph.resistances[int(tree.off_tree[j])]
    step = state.cycle_sum(j) / (r_e * tree.lipschitz[j])
    if step != 0.0:
        state.push(j, -step)
    return state


def edge_flows(state: FlowState) -> np.ndarray:
    """Flow on every edge in graph order; O(m + n)."""
    tree = state.tree
    z = np.zeros(tree.graph.m)
    z[tree.off_tree] = state.off
    upward = state.paths.upward_flows()
    has_parent = tree.parent_edge >= 0
    z[tree.parent_edge[has_parent]] = tree.upward_sign[has_parent] * upward[has_parent]
    return z


def conservation_residual(state: FlowState) -> float:
    """max |B^T z - chi|."""
    z = edge_flows(state)
    return float(np.abs(state.tree.graph.divergence(z) - state.chi).max())


def energy(state: FlowState) -> float:
    return state.tree.graph.energy(edge_flows(state))
