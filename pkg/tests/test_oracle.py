"""
Tests for the coordinate oracles.
"""

import numpy as np
import pytest

from core.errors import InvalidInputError, UnsupportedOperationError
from core.sparse import CsrMatrix
from oracle.base import CoordinateOracle, Register, finite_diff_check
from oracle.least_squares import DualLeastSquaresOracle, LeastSquaresOracle
from oracle.spd import SpdQuadraticOracle, spd_parameters


def drive(oracle, steps, seed):
    """Apply random increments to both registers; returns the final (c1, c2)."""
    rng = np.random.default_rng(seed)
    n = oracle.dim()
    for _ in range(steps):
        register = Register.U if rng.random() < 0.5 else Register.W
        oracle.notify_increment(register, int(rng.integers(n)), float(rng.standard_normal()))
    return float(rng.standard_normal()), float(rng.standard_normal())


class TestSpdOracle:
    """Test the quadratic oracle."""

    def test_parameters(self):
        """diag(1, 2, 3) has sigma 1, L 3 and trace 6."""
        params = spd_parameters(CsrMatrix.diagonal_matrix([1.0, 2.0, 3.0]))
        assert params.sigma == pytest.approx(1.0)
        assert params.L == pytest.approx(3.0)
        assert params.s1 == 6.0

    def test_parameters_reject_asymmetric(self):
        """Asymmetric input is rejected."""
        with pytest.raises(InvalidInputError):
            spd_parameters(CsrMatrix.from_dense([[2.0, 1.0], [0.0, 2.0]]))

    def test_finite_difference(self):
        """Partials of diag(2, 3) at (1, 1) match central differences."""
        oracle = SpdQuadraticOracle(CsrMatrix.diagonal_matrix([2.0, 3.0]), [0.0, 0.0])
        for i in range(2):
            assert finite_diff_check(oracle, [1.0, 1.0], i) < 1e-8

    def test_finite_difference_dense(self, spd_system):
        """Every coordinate of a dense system passes the finite-difference check."""
        A, b, _ = spd_system
        oracle = SpdQuadraticOracle(A, b)
        x = np.random.default_rng(3).standard_normal(A.n_rows)
        assert max(finite_diff_check(oracle, x, i) for i in range(A.n_rows)) < 1e-6

    def test_partial_is_row_residual(self, spd_system):
        """partial(i) at c1 u + c2 w equals (A x - b)_i."""
        A, b, _ = spd_system
        oracle = SpdQuadraticOracle(A, b)
        c1, c2 = drive(oracle, 200, seed=1)
        x = c1 * oracle.u + c2 * oracle.w
        expected = A.matvec(x) - b
        for i in range(A.n_rows):
            assert oracle.partial(i, c1, c2) == pytest.approx(expected[i], rel=1e-9, abs=1e-9)

    def test_caches_match_rebuild(self, spd_system):
        """Incremental caches agree with a rebuild from the registers."""
        A, b, _ = spd_system
        oracle = SpdQuadraticOracle(A, b, rebuild_factor=1000)
        c1, c2 = drive(oracle, 500, seed=2)
        before = oracle.gradient_at(c1, c2)
        oracle.rebuild()
        np.testing.assert_allclose(oracle.gradient_at(c1, c2), before, rtol=1e-10, atol=1e-10)

    def test_periodic_rebuild(self, diag12):
        """Caches are rebuilt every factor * n increments."""
        A, b = diag12
        oracle = SpdQuadraticOracle(A, b, rebuild_factor=3)
        rebuilds = oracle.stats.rebuilds
        for _ in range(6):
            oracle.notify_increment(Register.U, 0, 0.1)
        assert oracle.stats.rebuilds == rebuilds + 1

    def test_rejects_non_square(self):
        """Rectangular matrices are rejected."""
        with pytest.raises(InvalidInputError):
            SpdQuadraticOracle(CsrMatrix.from_dense([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]), [1.0, 1.0])

    def test_rejects_nonpositive_diagonal(self):
        """A zero diagonal entry leaves a coordinate without curvature."""
        with pytest.raises(InvalidInputError):
            SpdQuadraticOracle(CsrMatrix.diagonal_matrix([1.0, 0.0]), [1.0, 1.0])

    def test_value_at_matches_value(self, diag12):
        """The cached objective matches a direct evaluation."""
        A, b = diag12
        oracle = SpdQuadraticOracle(A, b)
        oracle.set_registers([1.0, 2.0], [0.5, -1.0])
        x = 2.0 * oracle.u + 3.0 * oracle.w
        assert oracle.value_at(2.0, 3.0) == pytest.approx(oracle.value(x))


class TestLeastSquaresOracles:
    """Test the primal and dual least-squares oracles."""

    def test_dual_partial_example(self):
        """With A = I, b = (1, 1) and y = 0 the partial is -1."""
        oracle = DualLeastSquaresOracle(CsrMatrix.identity(2), [1.0, 1.0])
        assert oracle.partial(0, 1.0, 0.0) == -1.0
        assert oracle.lipschitz_array().tolist() == [1.0, 1.0]

    def test_dual_finite_difference(self, gaussian_system):
        """Dual partials match central differences."""
        A, b, _ = gaussian_system
        oracle = DualLeastSquaresOracle(A, b)
        y = np.random.default_rng(5).standard_normal(A.n_rows)
        assert max(finite_diff_check(oracle, y, i) for i in range(0, A.n_rows, 7)) < 1e-6

    def test_primal_finite_difference(self, gaussian_system):
        """Column partials match central differences."""
        A, b, _ = gaussian_system
        oracle = LeastSquaresOracle(A, b)
        x = np.random.default_rng(6).standard_normal(A.n_cols)
        assert max(finite_diff_check(oracle, x, i) for i in range(A.n_cols)) < 1e-6

    def test_dual_primal_map(self, gaussian_system):
        """primal() returns A^T (c1 u + c2 w)."""
        A, b, _ = gaussian_system
        oracle = DualLeastSquaresOracle(A, b)
        c1, c2 = drive(oracle, 300, seed=4)
        expected = A.rmatvec(c1 * oracle.u + c2 * oracle.w)
        np.testing.assert_allclose(oracle.primal(c1, c2), expected, rtol=1e-9, atol=1e-9)

    def test_dual_value_at(self, gaussian_system):
        """Cached dual objective matches a direct evaluation."""
        A, b, _ = gaussian_system
        oracle = DualLeastSquaresOracle(A, b)
        c1, c2 = drive(oracle, 300, seed=9)
        direct = oracle.value(c1 * oracle.u + c2 * oracle.w)
        assert oracle.value_at(c1, c2) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_zero_row_rejected(self):
        """A zero row has no Lipschitz constant."""
        with pytest.raises(InvalidInputError):
            DualLeastSquaresOracle(CsrMatrix.from_dense([[1.0, 0.0], [0.0, 0.0]]), [1.0, 1.0])

    def test_zero_column_rejected(self):
        """A zero column has no Lipschitz constant."""
        with pytest.raises(InvalidInputError):
            LeastSquaresOracle(CsrMatrix.from_dense([[1.0, 0.0], [1.0, 0.0]]), [1.0, 1.0])


class _PartialOnly(CoordinateOracle):
    def __init__(self):
        super().__init__(2)

    def lipschitz_array(self):
        return np.ones(2)

    def _partial(self, i, c1, c2):
        return 0.0

    def _apply_increment(self, register, i, delta):
        pass

    def _rebuild_caches(self):
        pass


class TestOracleContract:
    """Test the base-class behaviour."""

    def test_finite_difference_unsupported(self):
        """Oracles without value() cannot be checked."""
        with pytest.raises(UnsupportedOperationError):
            finite_diff_check(_PartialOnly(), [0.0, 0.0], 0)

    def test_stats_count_calls(self):
        """Partial calls and increments are counted."""
        oracle = _PartialOnly()
        oracle.partial(0, 1.0, 0.0)
        oracle.notify_increment(Register.W, 1, 2.0)
        assert oracle.stats.partial_calls == 1
        assert oracle.stats.increments == 1
        assert oracle.w.tolist() == [0.0, 2.0]

    def test_rejects_bad_step(self, diag12):
        """A nonpositive finite-difference step is rejected."""
        A, b = diag12
        with pytest.raises(InvalidInputError):
            finite_diff_check(SpdQuadraticOracle(A, b), [0.0, 0.0], 0, h=0.0)
