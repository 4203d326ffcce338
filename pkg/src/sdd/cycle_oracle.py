"""
Coordinate oracle over off-tree edges.

The variable is the vector of off-tree flows rescaled by sqrt(r_e); in those
coordinates the energy ||z0 + C y||_R^2 / 2 has coordinate Lipschitz
constants st(e) + 1 and strong convexity 1. Each register keeps its own
circulation so a partial costs three cycle sums.
"""

import numpy as np

from core.vectors import as_vector
from oracle.base import CoordinateOracle, Register
from sdd.flow import FlowState, edge_flows, initial_tree_flow, resync, tree_potentials, tree_route
from sdd.tree import SpanningTree


class CycleOracle(CoordinateOracle):
    """Electrical-flow energy as a function of the rescaled off-tree flows."""

    def __init__(self, tree: SpanningTree, chi, rebuild_factor: int | None = None):
        super().__init__(tree.off_tree.size, rebuild_factor)
        self.tree = tree
        self.base = initial_tree_flow(tree, chi)
        self._base_edges = edge_flows(self.base)
        r_off = tree.graph.resistances[tree.off_tree]
        self._sqrt_r = np.sqrt(r_off)
        self._inv_sqrt_r = (1.0 / self._sqrt_r).tolist()
        self._base_cycles = self._cycle_sums(self._base_edges)
        self._flows = (FlowState.circulation(tree), FlowState.circulation(tree))

    @property
    def chi(self) -> np.ndarray:
        return self.base.chi

    def lipschitz_array(self) -> np.ndarray:
        return self.tree.lipschitz

    def _partial(self, i: int, c1: float, c2: float) -> float:
        flow_u, flow_w = self._flows
        total = self._base_cycles[i]
        if c1 != 0.0:
            total += c1 * flow_u.cycle_sum(i)
        if c2 != 0.0:
            total += c2 * flow_w.cycle_sum(i)
        return total * self._inv_sqrt_r[i]

    def _apply_increment(self, register: Register, i: int, delta: float) -> None:
        self._flows[register].push(i, delta * self._inv_sqrt_r[i])

    def _rebuild_caches(self) -> None:
        for flow, values in zip(self._flows, (self.u, self.w)):
            flow.off[:] = values / self._sqrt_r
            resync(flow)

    # -- full evaluations ---------------------------------------------------

    def flow_from(self, y) -> np.ndarray:
        """Edge flows z0 + C diag(r)^-1/2 y in graph order; O(m + n)."""
        tree = self.tree
        g = tree.graph
        off = as_vector(y, self.dim(), "y") / self._sqrt_r
        demand = np.zeros(tree.n)
        np.subtract.at(demand, g.tails[tree.off_tree], off)
        np.add.at(demand, g.heads[tree.off_tree], off)
        upward = tree_route(tree, demand)
        z = self._base_edges.copy()
        z[tree.off_tree] += off
        has_parent = tree.parent_edge >= 0
        z[tree.parent_edge[has_parent]] += tree.upward_sign[has_parent] * upward[has_parent]
        return z

    def _cycle_sums(self, z: np.ndarray) -> np.ndarray:
        tree = self.tree
        g = tree.graph
        upward = np.zeros(tree.n)
        has_parent = tree.parent_edge >= 0
        upward[has_parent] = tree.upward_sign[has_parent] * z[tree.parent_edge[has_parent]]
        phi = tree_potentials(tree, upward)
        off = tree.off_tree
        return g.resistances[off] * z[off] + phi[g.heads[off]] - phi[g.tails[off]]

    def value(self, y: np.ndarray) -> float:
        return self.tree.graph.energy(self.flow_from(y))

    def gradient(self, y: np.ndarray) -> np.ndarray:
        return self._cycle_sums(self.flow_from(y)) / self._sqrt_r
