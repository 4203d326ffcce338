"""
Tests for spanning trees, tree-cycle flows and the Laplacian solver.
"""

import numpy as np
import pytest

from core.errors import InvalidInputError
from core.sampling import AliasSampler, CoordinateStream, make_streams
from core.sparse import CsrMatrix
from oracle.base import finite_diff_check
from sdd.cycle_oracle import CycleOracle
from sdd.flow import (
    conservation_residual,
    cycle_partial,
    cycle_update,
    edge_flows,
    energy,
    initial_tree_flow,
)
from sdd.graph import WeightedGraph, graph_from_laplacian, read_edge_list, write_edge_list
from sdd.solver import (
    SddConfig,
    SddMode,
    dual_value,
    duality_gap,
    plain_cycle_descent,
    recover_potentials,
    solve_laplacian,
)
from sdd.tree import SpanningTree, TreeStrategy, build_spanning_tree, measured_total_stretch


def random_graph(n, extra, seed):
    """Connected graph: a random spanning path plus `extra` distinct chords."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    pairs = {tuple(sorted((int(a), int(b)))) for a, b in zip(order[:-1], order[1:])}
    while len(pairs) < n - 1 + extra:
        a, b = (int(x) for x in rng.integers(n, size=2))
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    edges = [(a, b, float(rng.uniform(0.5, 2.0))) if rng.random() < 0.5 else (b, a, float(rng.uniform(0.5, 2.0)))
             for a, b in sorted(pairs)]
    return WeightedGraph.from_edges(n, edges)


def random_demands(n, seed):
    chi = np.random.default_rng(seed).standard_normal(n)
    return chi - chi.mean()


def dense_potentials(graph, chi):
    L = graph.laplacian.to_dense()
    x = np.linalg.pinv(L) @ chi
    return x - x.mean(), L


def l_norm(L, x):
    return float(np.sqrt(max(x @ L @ x, 0.0)))


class TestGraph:
    """Test graph construction and Laplacian conversion."""

    def test_incidence_and_laplacian(self, triangle):
        """B x = x_tail - x_head and L = B^T R^-1 B."""
        B = triangle.incidence.to_dense()
        np.testing.assert_array_equal(B[0], [1.0, -1.0, 0.0])
        np.testing.assert_array_equal(B[2], [0.0, -1.0, 1.0])
        np.testing.assert_allclose(triangle.laplacian.to_dense(), 3.0 * np.eye(3) - np.ones((3, 3)))

    def test_rejects_disconnected(self):
        """Two components cannot be spanned."""
        with pytest.raises(InvalidInputError):
            WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])

    def test_rejects_self_loop_and_bad_resistance(self):
        """Self-loops and nonpositive resistances are rejected."""
        with pytest.raises(InvalidInputError):
            WeightedGraph.from_edges(2, [(0, 1, 1.0), (1, 1, 1.0)])
        with pytest.raises(InvalidInputError):
            WeightedGraph.from_edges(2, [(0, 1, 0.0)])

    def test_graph_from_laplacian(self, triangle):
        """A Laplacian gives back its edges and resistances."""
        graph = graph_from_laplacian(triangle.laplacian)
        assert graph.n == 3 and graph.m == 3
        np.testing.assert_allclose(graph.resistances, [1.0, 1.0, 1.0])
        np.testing.assert_allclose(graph.laplacian.to_dense(), triangle.laplacian.to_dense())

    def test_graph_from_laplacian_rejects_sdd(self):
        """Positive off-diagonals and nonzero row sums are not Laplacians."""
        with pytest.raises(InvalidInputError, match="off-diagonal"):
            graph_from_laplacian(CsrMatrix.from_dense([[2.0, 1.0], [1.0, 2.0]]))
        with pytest.raises(InvalidInputError, match="sum to zero"):
            graph_from_laplacian(CsrMatrix.from_dense([[2.0, -1.0], [-1.0, 2.0]]))

    def test_edge_list_round_trip(self, tmp_path):
        """Written edge lists read back with the same resistances."""
        graph = random_graph(12, 10, seed=1)
        path = tmp_path / "graph.txt"
        write_edge_list(path, graph)
        back = read_edge_list(path)
        assert back.n == graph.n
        np.testing.assert_array_equal(back.tails, graph.tails)
        np.testing.assert_array_equal(back.heads, graph.heads)
        np.testing.assert_array_equal(back.resistances, graph.resistances)

    def test_edge_list_missing(self, tmp_path):
        """A missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_edge_list(tmp_path / "nope.txt")


class TestSpanningTree:
    """Test tree construction and stretch."""

    def test_triangle_stretch(self, triangle, triangle_tree_ids):
        """The off-tree edge of the unit triangle has stretch 2 and L = 3."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        assert tree.off_tree.tolist() == [0]
        np.testing.assert_allclose(tree.stretch, [2.0])
        np.testing.assert_allclose(tree.lipschitz, [3.0])
        assert measured_total_stretch(tree) == pytest.approx(3.0)
        assert tree.path_resistance(0, 1) == pytest.approx(2.0)

    def test_star_with_chord(self):
        """A chord between two leaves of a star has stretch 2."""
        graph = WeightedGraph.from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0)])
        tree = build_spanning_tree(graph, TreeStrategy.MIN_RESISTANCE)
        assert tree.off_tree.tolist() == [3]
        np.testing.assert_allclose(tree.stretch, [2.0])

    def test_cycle_bfs(self):
        """The n-cycle leaves one edge of stretch n - 1, so S1 = n."""
        n = 9
        graph = WeightedGraph.from_edges(n, [(i, (i + 1) % n, 1.0) for i in range(n)])
        tree = build_spanning_tree(graph, TreeStrategy.BFS)
        assert tree.off_tree.size == 1
        np.testing.assert_allclose(tree.stretch, [n - 1.0])
        assert measured_total_stretch(tree) == pytest.approx(n)

    def test_tree_input(self):
        """A tree has no off-tree edges and zero total stretch."""
        graph = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)])
        tree = build_spanning_tree(graph)
        assert tree.off_tree.size == 0
        assert measured_total_stretch(tree) == 0.0

    def test_min_resistance_prefers_light_edges(self):
        """Kruskal keeps the two cheapest edges of a triangle."""
        graph = WeightedGraph.from_edges(3, [(0, 1, 5.0), (1, 2, 1.0), (0, 2, 1.0)])
        tree = build_spanning_tree(graph, "min-resistance")
        assert tree.tree_edges.tolist() == [1, 2]
        np.testing.assert_allclose(tree.stretch, [2.0 / 5.0])

    def test_stretch_matches_path_resistance(self):
        """Stretch is the tree-path resistance over the edge resistance."""
        graph = random_graph(40, 60, seed=2)
        for strategy in TreeStrategy:
            tree = build_spanning_tree(graph, strategy)
            assert tree.tree_edges.size == graph.n - 1
            for j, e in enumerate(tree.off_tree.tolist()):
                path = tree.path_resistance(int(graph.tails[e]), int(graph.heads[e]))
                assert tree.stretch[j] == pytest.approx(path / graph.resistances[e])
                assert tree.stretch[j] > 0.0

    def test_rejects_non_spanning_edges(self):
        """n - 1 edges containing a cycle do not span."""
        graph = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 3, 1.0)])
        with pytest.raises(InvalidInputError):
            SpanningTree.from_edges(graph, [0, 1, 2])
        with pytest.raises(InvalidInputError):
            SpanningTree.from_edges(graph, [0, 1])


class TestFlows:
    """Test tree routing and cycle updates."""

    def test_initial_tree_flow(self, triangle, triangle_tree_ids):
        """chi = (1, -1, 0) routes one unit along 0 -> 2 -> 1."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        state = initial_tree_flow(tree, [1.0, -1.0, 0.0])
        np.testing.assert_allclose(edge_flows(state), [0.0, 1.0, 1.0])
        assert conservation_residual(state) < 1e-15

    def test_single_edge_and_zero_demand(self):
        """One edge carries the whole demand; zero demands give zero flow."""
        graph = WeightedGraph.from_edges(2, [(0, 1, 1.0)])
        tree = build_spanning_tree(graph)
        np.testing.assert_allclose(edge_flows(initial_tree_flow(tree, [1.0, -1.0])), [1.0])
        np.testing.assert_allclose(edge_flows(initial_tree_flow(tree, [0.0, 0.0])), [0.0])

    def test_rejects_unbalanced_demands(self, triangle, triangle_tree_ids):
        """Demands must sum to zero."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        with pytest.raises(InvalidInputError):
            initial_tree_flow(tree, [1.0, 0.0, 0.0])

    def test_cycle_partial_example(self, triangle, triangle_tree_ids):
        """The cycle sum of the off-tree edge is 0 - 1 - 1 = -2."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        assert cycle_partial(initial_tree_flow(tree, [1.0, -1.0, 0.0]), 0) == pytest.approx(-2.0)
        assert cycle_partial(initial_tree_flow(tree, [0.0, 0.0, 0.0]), 0) == 0.0

    def test_cycle_partial_rejects_tree_edge(self, triangle, triangle_tree_ids):
        """Tree edges have no cycle."""
        state = initial_tree_flow(SpanningTree.from_edges(triangle, triangle_tree_ids), [1.0, -1.0, 0.0])
        with pytest.raises(InvalidInputError):
            cycle_partial(state, 1)
        with pytest.raises(InvalidInputError):
            cycle_update(state, 5)

    def test_cycle_update_example(self, triangle, triangle_tree_ids):
        """One update gives the electrical flow (2/3, 1/3, 1/3); a second changes nothing."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        state = cycle_update(initial_tree_flow(tree, [1.0, -1.0, 0.0]), 0)
        np.testing.assert_allclose(edge_flows(state), [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], atol=1e-15)
        assert energy(state) == pytest.approx(1.0 / 3.0)
        cycle_update(state, 0)
        np.testing.assert_allclose(edge_flows(state), [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], atol=1e-12)
        np.testing.assert_allclose(recover_potentials(tree, edge_flows(state)), [1.0 / 3.0, -1.0 / 3.0, 0.0], atol=1e-12)

    def test_disjoint_circulation_has_zero_partial(self):
        """A circulation on one cycle does not show in the sum of an edge-disjoint cycle."""
        # Two triangles joined at vertex 0
        graph = WeightedGraph.from_edges(
            5, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (0, 3, 1.0), (3, 4, 1.0), (4, 0, 1.0)]
        )
        tree = SpanningTree.from_edges(graph, [0, 2, 3, 5])
        state = initial_tree_flow(tree, np.zeros(5))
        state.push(int(tree.off_index[1]), 0.7)
        assert cycle_partial(state, 4) == pytest.approx(0.0, abs=1e-15)
        assert cycle_partial(state, 1) == pytest.approx(3.0 * 0.7)

    def test_one_off_tree_edge_is_exact(self):
        """With a single off-tree edge one update reaches the optimal energy."""
        graph = WeightedGraph.from_edges(
            6, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.5), (4, 5, 1.0), (5, 1, 3.0)]
        )
        tree = build_spanning_tree(graph)
        assert tree.off_tree.size == 1
        chi = random_demands(6, seed=3)
        state = cycle_update(initial_tree_flow(tree, chi), int(tree.off_tree[0]))
        x_star, L = dense_potentials(graph, chi)
        assert energy(state) == pytest.approx(0.5 * x_star @ L @ x_star, rel=1e-10)

    def test_plain_descent_invariants(self):
        """Energy never increases and B^T z = chi holds during plain descent."""
        graph = random_graph(60, 120, seed=4)
        tree = build_spanning_tree(graph)
        state = initial_tree_flow(tree, random_demands(60, seed=5))
        stream = CoordinateStream(AliasSampler(tree.lipschitz), make_streams(0).coordinates, 256)
        energies = [energy(state)]

        def observer(k, s):
            if k % 10 == 0:
                energies.append(energy(s))
            if k % 1000 == 0:
                assert conservation_residual(s) < 1e-10

        plain_cycle_descent(state, 3000, stream, observer)
        assert all(b <= a * (1.0 + 1e-12) for a, b in zip(energies, energies[1:]))
        assert energies[-1] < energies[0]


class TestCycleOracle:
    """Test the rescaled off-tree coordinate oracle."""

    def test_value_at_zero_is_tree_flow_energy(self, triangle, triangle_tree_ids):
        """At y = 0 the flow is the tree-only routing."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        oracle = CycleOracle(tree, [1.0, -1.0, 0.0])
        assert oracle.value(np.zeros(1)) == pytest.approx(1.0)
        np.testing.assert_allclose(oracle.lipschitz_array(), [3.0])
        # The partial at zero is the cycle sum divided by sqrt(r)
        assert oracle.partial(0, 1.0, 0.0) == pytest.approx(-2.0)

    def test_finite_difference(self):
        """Partials match central differences of the energy."""
        graph = random_graph(30, 40, seed=6)
        oracle = CycleOracle(build_spanning_tree(graph), random_demands(30, seed=7))
        y = np.random.default_rng(8).standard_normal(oracle.dim())
        assert max(finite_diff_check(oracle, y, i) for i in range(oracle.dim())) < 1e-6

    def test_flow_is_feasible(self):
        """Every y maps to a flow meeting the demands."""
        graph = random_graph(30, 40, seed=9)
        chi = random_demands(30, seed=10)
        oracle = CycleOracle(build_spanning_tree(graph), chi)
        z = oracle.flow_from(np.random.default_rng(11).standard_normal(oracle.dim()))
        np.testing.assert_allclose(graph.divergence(z), oracle.chi, atol=1e-10)


class TestSolveLaplacian:
    """Test the end-to-end Laplacian solver."""

    def test_single_edge(self):
        """A tree is solved exactly without iterations."""
        graph = WeightedGraph.from_edges(2, [(0, 1, 2.0)])
        solution = solve_laplacian(graph, [1.0, -1.0], 1e-6)
        np.testing.assert_allclose(solution.potentials, [1.0, -1.0])
        np.testing.assert_allclose(solution.flow, [1.0])
        assert solution.iterations == 0
        assert solution.certified

    def test_triangle(self, triangle, triangle_tree_ids):
        """The triangle reaches (1/3, -1/3, 0)."""
        tree = SpanningTree.from_edges(triangle, triangle_tree_ids)
        x, z, trace = solve_laplacian(triangle, [1.0, -1.0, 0.0], 1e-6, tree=tree)
        x_star, L = dense_potentials(triangle, np.array([1.0, -1.0, 0.0]))
        assert l_norm(L, x - x_star) <= 1e-6 * l_norm(L, x_star)
        np.testing.assert_allclose(z, [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], atol=1e-6)
        assert trace.k[0] == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_random_graph_accelerated(self, seed):
        """The relative L-norm error meets eps against a dense solve."""
        graph = random_graph(50, 150, seed=seed)
        chi = random_demands(50, seed=100 + seed)
        eps = 1e-4
        solution = solve_laplacian(graph, chi, eps, SddConfig(seed=seed))
        x_star, L = dense_potentials(graph, chi)
        assert solution.certified
        assert l_norm(L, solution.potentials - x_star) <= eps * l_norm(L, x_star)
        assert abs(solution.potentials.mean()) < 1e-10
        np.testing.assert_allclose(graph.divergence(solution.flow), chi, atol=1e-9)

    def test_random_graph_plain(self):
        """Plain cycle descent also certifies its answer."""
        graph = random_graph(30, 60, seed=12)
        chi = random_demands(30, seed=13)
        solution = solve_laplacian(graph, chi, 1e-3, SddConfig(mode=SddMode.PLAIN, tree_strategy=TreeStrategy.BFS))
        x_star, L = dense_potentials(graph, chi)
        assert solution.certified
        assert l_norm(L, solution.potentials - x_star) <= 1e-3 * l_norm(L, x_star)

    def test_weak_duality(self):
        """The flow energy never drops below the optimum and the gap is nonnegative."""
        graph = random_graph(25, 40, seed=14)
        chi = random_demands(25, seed=15)
        solution = solve_laplacian(graph, chi, 1e-2, SddConfig(seed=1))
        x_star, L = dense_potentials(graph, chi)
        assert solution.energy >= 0.5 * x_star @ L @ x_star * (1.0 - 1e-12)
        assert duality_gap(graph, solution.flow, solution.potentials, chi) >= -1e-12
        assert solution.total_stretch == pytest.approx(measured_total_stretch(solution.tree))

    @pytest.mark.parametrize("eps", [1e-2, 1e-4])
    def test_certified_gap(self, eps):
        """The returned gap is at most eps^2 times the dual value, and so at most eps times the optimum."""
        graph = random_graph(40, 100, seed=21)
        chi = random_demands(40, seed=22)
        solution = solve_laplacian(graph, chi, eps, SddConfig(seed=3))
        x_star, L = dense_potentials(graph, chi)
        opt = 0.5 * float(x_star @ L @ x_star)
        assert solution.certified
        assert solution.dual == pytest.approx(dual_value(graph, solution.potentials, chi), rel=1e-12)
        assert solution.duality_gap == pytest.approx(
            duality_gap(graph, solution.flow, solution.potentials, chi), rel=1e-9, abs=1e-12
        )
        assert solution.duality_gap <= eps * eps * solution.dual
        assert solution.dual <= opt * (1.0 + 1e-12)
        assert solution.duality_gap <= eps * opt

    def test_rejects_bad_eps(self, triangle):
        """eps must be positive."""
        with pytest.raises(InvalidInputError):
            solve_laplacian(triangle, [1.0, -1.0, 0.0], 0.0)

    def test_rejects_foreign_tree(self, triangle):
        """A tree built for another graph is rejected."""
        other = WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
        with pytest.raises(InvalidInputError):
            solve_laplacian(triangle, [1.0, -1.0, 0.0], 1e-3, tree=build_spanning_tree(other))
