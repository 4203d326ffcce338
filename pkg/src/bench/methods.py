"""
Method registry for the benchmark.

Every entry turns (problem, options, seed, budget, stride) into a
ConvergenceTrace and declares which problem kinds it accepts. Options come
from the method's table in the experiment spec.
"""

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from acdm.coefficients import AcdmMode, thresholded_lipschitz
from acdm.engine import AcdmConfig, run
from acdm.trace import ConvergenceTrace
from baselines.cg import cg_solve
from baselines.config import BaselineConfig, Method
from baselines.coordinate import cdm_run
from baselines.gradient import agd_run, gd_run
from baselines.rk import RandomizedKaczmarz
from bench.generators import GRAPH, LEAST_SQUARES, SPD, BenchProblem
from core.dense import extreme_eigenvalues, weighted_convexity
from core.errors import InvalidInputError
from kaczmarz.ark import ArkProblem, ark_run
from oracle.base import CoordinateOracle
from oracle.least_squares import LeastSquaresOracle
from oracle.spd import SpdQuadraticOracle
from sdd.solver import SddConfig, SddMode, solve_laplacian


@dataclass(frozen=True)
class RunRequest:
    problem: BenchProblem
    options: dict[str, Any]
    seed: int
    max_iters: int
    record_stride: int


@dataclass(frozen=True)
class MethodEntry:
    runner: Callable[[RunRequest], ConvergenceTrace]
    kinds: frozenset[str]
    description: str


def _objective(problem: BenchProblem) -> tuple[CoordinateOracle, np.ndarray, float | None]:
    """Coordinate oracle, dense Hessian and f* of the problem's quadratic."""
    if problem.kind == SPD:
        return SpdQuadraticOracle(problem.A, problem.b, check_symmetric=False), problem.A.to_dense(), problem.f_star
    A = problem.A.to_dense()
    f_star = None
    if problem.x_star is not None:
        r = A @ problem.x_star - problem.b
        f_star = 0.5 * float(np.dot(r, r))
    return LeastSquaresOracle(problem.A, problem.b), A.T @ A, f_star


def _constants(request: RunRequest, hessian: np.ndarray) -> tuple[float, float]:
    L = request.options.get("L")
    sigma = request.options.get("sigma")
    if L is None or sigma is None:
        extremes = extreme_eigenvalues(hessian)
        L = extremes.lambda_max if L is None else L
        sigma = extremes.lambda_min if sigma is None else sigma
    return float(L), float(sigma)


def _baseline(request: RunRequest, method: Method, **fields) -> BaselineConfig:
    return BaselineConfig(
        method=method,
        max_iters=request.max_iters,
        seed=request.seed,
        record_stride=request.record_stride,
        **fields,
    )


def run_gd(request: RunRequest) -> ConvergenceTrace:
    oracle, hessian, f_star = _objective(request.problem)
    L, _ = _constants(request, hessian)
    _, trace = gd_run(oracle, np.zeros(oracle.dim()), _baseline(request, Method.GD, L=L, f_star=f_star))
    return trace


def run_agd(request: RunRequest) -> ConvergenceTrace:
    oracle, hessian, f_star = _objective(request.problem)
    L, sigma = _constants(request, hessian)
    _, trace = agd_run(oracle, np.zeros(oracle.dim()), L, sigma, request.max_iters, f_star, request.record_stride)
    return trace


def run_cdm(request: RunRequest) -> ConvergenceTrace:
    oracle, _, f_star = _objective(request.problem)
    alpha = float(request.options.get("alpha", 1.0))
    _, trace = cdm_run(oracle, np.zeros(oracle.dim()), _baseline(request, Method.CDM, alpha=alpha, f_star=f_star))
    return trace


def _acdm(request: RunRequest, mode: AcdmMode) -> ConvergenceTrace:
    oracle, hessian, f_star = _objective(request.problem)
    alpha = float(request.options.get("alpha", 1.0))
    sigma = request.options.get("sigma")
    if sigma is None:
        L_tilde, _ = thresholded_lipschitz(oracle.lipschitz_array(), alpha)
        sigma = weighted_convexity(hessian, L_tilde ** (1.0 - alpha))
    config = AcdmConfig(
        alpha=alpha,
        sigma=float(sigma),
        mode=mode,
        max_iters=request.max_iters,
        f_star=f_star,
        seed=request.seed,
        record_stride=request.record_stride,
    )
    return run(oracle, np.zeros(oracle.dim()), config).trace


def run_acdm(request: RunRequest) -> ConvergenceTrace:
    return _acdm(request, AcdmMode(request.options.get("mode", AcdmMode.STABLE.value)))


def run_acdm_simple(request: RunRequest) -> ConvergenceTrace:
    return _acdm(request, AcdmMode.SIMPLE)


def run_cg(request: RunRequest) -> ConvergenceTrace:
    problem = request.problem
    tol = float(request.options.get("tolerance", 1e-10))
    _, trace = cg_solve(problem.A, problem.b, tol=tol, max_iters=request.max_iters, f_star=problem.f_star)
    return trace


def run_rk(request: RunRequest) -> ConvergenceTrace:
    problem = request.problem
    solver = RandomizedKaczmarz(problem.A, problem.b, request.seed)
    _, trace = solver.run(None, request.max_iters, problem.x_star, request.record_stride)
    return trace


def run_ark(request: RunRequest) -> ConvergenceTrace:
    problem = request.problem
    system = ArkProblem.from_system(problem.A, problem.b, request.options.get("sigma"))
    config = AcdmConfig(
        alpha=1.0,
        sigma=system.sigma_dual,
        max_iters=request.max_iters,
        seed=request.seed,
        record_stride=request.record_stride,
    )
    detect = bool(request.options.get("detect_plateau", True))
    return ark_run(system, config=config, x_star=problem.x_star, detect_plateau=detect).trace


def _laplacian(request: RunRequest, mode: SddMode) -> ConvergenceTrace:
    problem = request.problem
    eps = float(request.options.get("eps", 1e-6))
    fields = {k: request.options[k] for k in ("tree_strategy", "iterations", "iteration_scale", "max_rounds")
              if k in request.options}
    config = SddConfig(mode=mode, seed=request.seed, **fields)
    return solve_laplacian(problem.graph, problem.b, eps, config).trace


def run_cycle(request: RunRequest) -> ConvergenceTrace:
    return _laplacian(request, SddMode.PLAIN)


def run_sdd_acdm(request: RunRequest) -> ConvergenceTrace:
    return _laplacian(request, SddMode.ACCELERATED)


_QUADRATIC = frozenset({SPD, LEAST_SQUARES})

METHODS: dict[str, MethodEntry] = {
    "gd": MethodEntry(run_gd, _QUADRATIC, "gradient descent, step 1/L"),
    "agd": MethodEntry(run_agd, _QUADRATIC, "Nesterov constant-momentum gradient"),
    "cdm": MethodEntry(run_cdm, _QUADRATIC, "randomized coordinate descent"),
    "acdm": MethodEntry(run_acdm, _QUADRATIC, "accelerated coordinate descent"),
    "acdm-simple": MethodEntry(run_acdm_simple, _QUADRATIC, "accelerated coordinate descent, fixed coefficients"),
    "cg": MethodEntry(run_cg, frozenset({SPD}), "conjugate gradient"),
    "rk": MethodEntry(run_rk, _QUADRATIC, "randomized Kaczmarz"),
    "ark": MethodEntry(run_ark, _QUADRATIC, "accelerated randomized Kaczmarz"),
    "cycle": MethodEntry(run_cycle, frozenset({GRAPH}), "tree-cycle descent"),
    "sdd-acdm": MethodEntry(run_sdd_acdm, frozenset({GRAPH}), "accelerated tree-cycle descent"),
}


def check_method(name: str, kind: str) -> MethodEntry:
    if name not in METHODS:
        raise InvalidInputError(f"unknown method {name!r}; available: {', '.join(sorted(METHODS))}")
    entry = METHODS[name]
    if kind not in entry.kinds:
        raise InvalidInputError(f"method {name!r} does not apply to {kind} problems")
    return entry


def run_method(name: str, request: RunRequest) -> ConvergenceTrace:
    return check_method(name, request.problem.kind).runner(request)
