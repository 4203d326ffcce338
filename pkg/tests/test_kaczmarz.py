"""
Tests for accelerated randomized Kaczmarz.
"""

import math

import numpy as np
import pytest
import scipy.stats

from acdm.coefficients import AcdmMode
from acdm.engine import AcdmConfig, AcdmEngine, StopRule
from acdm.reference import NaiveAcdm
from baselines.rk import RandomizedKaczmarz
from config import SETTINGS
from core.errors import InvalidInputError
from core.sparse import CsrMatrix
from kaczmarz.ark import ArkProblem, ark_run, ark_sampling_weights
from oracle.least_squares import DualLeastSquaresOracle


def gaussian(m, n, seed):
    rng = np.random.default_rng(seed)
    dense = rng.standard_normal((m, n))
    x_star = rng.standard_normal(n)
    return CsrMatrix.from_dense(dense), dense @ x_star, x_star


class TestArkProblem:
    """Test problem setup and sampling weights."""

    def test_weights_example(self):
        """diag(1, 2): ||A||_F^2 = 5, m = 2, weights (2.5, 4)."""
        problem = ArkProblem.from_system(CsrMatrix.diagonal_matrix([1.0, 2.0]), [1.0, 2.0])
        assert problem.frobenius_sq == 5.0
        np.testing.assert_allclose(ark_sampling_weights(problem), [2.5, 4.0])

    def test_equal_rows_are_uniform(self):
        """Rows of equal norm keep equal weights."""
        A = CsrMatrix.from_dense([[3.0, 4.0], [0.0, 5.0], [5.0, 0.0]])
        problem = ArkProblem.from_system(A, [1.0, 1.0, 1.0], sigma_dual=1.0)
        np.testing.assert_allclose(ark_sampling_weights(problem), [25.0, 25.0, 25.0])

    def test_single_row(self):
        """One row keeps its own squared norm."""
        problem = ArkProblem.from_system(CsrMatrix.from_dense([[1.0, 2.0]]), [1.0])
        np.testing.assert_allclose(ark_sampling_weights(problem), [5.0])

    def test_sigma_from_svd(self):
        """The default sigma is the squared smallest singular value."""
        problem = ArkProblem.from_system(CsrMatrix.diagonal_matrix([1.0, 2.0]), [1.0, 2.0])
        assert problem.sigma_dual == pytest.approx(1.0)
        assert problem.kappa == pytest.approx(math.sqrt(5.0))

    def test_rejects_zero_row(self):
        """Zero rows have no hyperplane."""
        with pytest.raises(InvalidInputError):
            ArkProblem.from_system(CsrMatrix.from_dense([[1.0, 0.0], [0.0, 0.0]]), [1.0, 0.0])


class TestArkRun:
    """Test accelerated Kaczmarz runs."""

    def test_orthonormal_rows(self):
        """A = I reaches x* = (1, 1) to machine precision."""
        result = ark_run(ArkProblem.from_system(CsrMatrix.identity(2), [1.0, 1.0]))
        assert result.status == "converged"
        np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-9)

    def test_sampling_follows_weights(self):
        """The engine samples rows in proportion to the thresholded row norms."""
        A, b, _ = gaussian(6, 3, seed=8)
        scaled = CsrMatrix.from_dense(A.to_dense() * np.array([0.1, 0.2, 1.0, 3.0, 5.0, 10.0])[:, None])
        problem = ArkProblem.from_system(scaled, scaled.matvec(np.ones(3)))
        weights = ark_sampling_weights(problem)
        assert np.any(weights > problem.row_norms_sq)
        engine = ark_run(problem, config=AcdmConfig(sigma=problem.sigma_dual, max_iters=10), detect_plateau=False).run.engine
        np.testing.assert_allclose(engine.sampler.weights, weights, rtol=1e-12)
        assert engine.s_tilde == pytest.approx(weights.sum())
        draws = np.array([engine.coordinates.draw() for _ in range(20000)])
        observed = np.bincount(draws, minlength=6)
        _, p = scipy.stats.chisquare(observed, draws.size * weights / weights.sum())
        assert p > 1e-4

    def test_thresholded_override_rejects_plain_mode(self):
        """Plain mode keeps the oracle's own constants."""
        problem = ArkProblem.from_system(CsrMatrix.diagonal_matrix([1.0, 2.0]), [1.0, 2.0])
        oracle = DualLeastSquaresOracle(problem.A, problem.b)
        with pytest.raises(InvalidInputError):
            AcdmEngine(oracle, AcdmConfig(mode=AcdmMode.PLAIN), None, ark_sampling_weights(problem))

    def test_gaussian_converges(self):
        """A consistent 200 x 50 system is solved."""
        A, b, x_star = gaussian(200, 50, seed=1)
        problem = ArkProblem.from_system(A, b)
        config = AcdmConfig(sigma=problem.sigma_dual, max_iters=20000, record_stride=1000)
        result = ark_run(problem, config=config, x_star=x_star, detect_plateau=False)
        np.testing.assert_allclose(result.x, x_star, rtol=1e-6, atol=1e-6)
        assert result.residual <= 1e-6 * np.linalg.norm(b)

    def test_expected_rate(self):
        """Averaged squared error respects 3 (1 - 1/(2 kappa sqrt(m)))^k."""
        A, b, x_star = gaussian(200, 50, seed=2)
        problem = ArkProblem.from_system(A, b)
        checkpoints = (100, 500, 2000)
        errors = np.zeros(len(checkpoints))
        runs = 50
        for seed in range(runs):
            config = AcdmConfig(sigma=problem.sigma_dual, max_iters=2000, seed=seed, record_stride=100)
            trace = ark_run(problem, config=config, x_star=x_star, detect_plateau=False).trace
            errors += [2.0 * trace.gap_at(k) for k in checkpoints]
        rate = 1.0 - 1.0 / (2.0 * problem.kappa * math.sqrt(problem.m))
        for k, mean_error in zip(checkpoints, errors / runs):
            assert mean_error <= 1.1 * 3.0 * rate**k * float(x_star @ x_star)

    def test_beats_plain_kaczmarz_when_ill_conditioned(self):
        """With kappa well above 4 sqrt(m) acceleration reaches 1e-6 in fewer steps."""
        rng = np.random.default_rng(3)
        U, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        V, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        dense = (U * np.geomspace(1.0, 0.03, 10)) @ V.T
        x_star = rng.standard_normal(10)
        A, b = CsrMatrix.from_dense(dense), dense @ x_star
        problem = ArkProblem.from_system(A, b)
        assert problem.kappa >= 4.0 * math.sqrt(problem.m)

        budget = 200_000
        f_star = -0.5 * float(x_star @ x_star)
        ark_iters, rk_iters = [], []
        for seed in range(3):
            config = AcdmConfig(
                sigma=problem.sigma_dual, max_iters=budget, stop_rule=StopRule.VALUE_GAP,
                tolerance=1e-6, f_star=f_star, seed=seed, record_stride=10,
            )
            ark = ark_run(problem, config=config, detect_plateau=False).trace.iterations_to(1e-6)
            _, rk_trace = RandomizedKaczmarz(A, b, seed=seed).run(max_iters=budget, x_star=x_star, record_stride=10)
            rk = rk_trace.iterations_to(1e-6)
            ark_iters.append(budget if ark is None else ark)
            rk_iters.append(budget if rk is None else rk)
        assert np.mean(ark_iters) < np.mean(rk_iters)

    def test_plain_mode_is_randomized_kaczmarz(self, gaussian_system):
        """Without acceleration the iterates are the standard projection sequence."""
        A, b, _ = gaussian_system
        problem = ArkProblem.from_system(A, b)
        config = AcdmConfig(mode=AcdmMode.PLAIN, max_iters=300, seed=4)
        result = ark_run(problem, config=config, detect_plateau=False)
        x, _ = RandomizedKaczmarz(A, b, seed=4).run(max_iters=300)
        np.testing.assert_allclose(result.x, x, rtol=1e-10, atol=1e-10)

    def test_primal_matches_dual_reference(self):
        """Primal registers equal A^T y of an explicit dual run."""
        A, b, _ = gaussian(20, 8, seed=5)
        problem = ArkProblem.from_system(A, b)
        config = AcdmConfig(sigma=problem.sigma_dual, seed=6, max_iters=300)
        engine = AcdmEngine(DualLeastSquaresOracle(A, b), config)
        naive = NaiveAcdm(DualLeastSquaresOracle(A, b), config)
        for k in range(300):
            engine.step()
            naive.step()
            if k % 50 == 0:
                want = A.rmatvec(naive.x)
                np.testing.assert_allclose(engine.primal_solution(), want, rtol=1e-8, atol=1e-8 * np.abs(want).max())

    def test_warm_start_in_row_space(self, gaussian_system):
        """A start x0 = A^T y0 is honoured and the run still converges."""
        A, b, x_star = gaussian_system
        problem = ArkProblem.from_system(A, b)
        x0 = A.rmatvec(np.random.default_rng(7).standard_normal(A.n_rows))
        config = AcdmConfig(sigma=problem.sigma_dual, max_iters=0, seed=1)
        start = ark_run(problem, x0=x0, config=config, detect_plateau=False)
        np.testing.assert_allclose(start.x, x0, rtol=1e-8, atol=1e-8 * np.abs(x0).max())
        long = ark_run(problem, x0=x0, config=config.model_copy(update={"max_iters": 20000}))
        np.testing.assert_allclose(long.x, x_star, rtol=1e-6, atol=1e-6)

    def test_inconsistent_system_plateaus(self):
        """An inconsistent system stops with a plateau diagnostic."""
        rng = np.random.default_rng(8)
        A = CsrMatrix.from_dense(rng.standard_normal((30, 5)))
        b = rng.standard_normal(30)
        problem = ArkProblem.from_system(A, b)
        result = ark_run(problem, config=AcdmConfig(sigma=problem.sigma_dual, max_iters=20000))
        assert result.status == "plateau"
        assert SETTINGS.plateau_window_factor * problem.m <= result.run.iterations < 20000
        assert math.isfinite(result.residual)

    def test_rejects_other_exponents(self, gaussian_system):
        """Rows are sampled with alpha = 1 only."""
        A, b, _ = gaussian_system
        with pytest.raises(InvalidInputError):
            ark_run(ArkProblem.from_system(A, b), config=AcdmConfig(alpha=0.5, sigma=1.0))
