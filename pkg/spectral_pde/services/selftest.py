import logging
from time import perf_counter
from typing import Callable, List

import numpy as np

from ..models.report import CheckResult
from ..models.transform import TransformKind, TransformPlan
from .boundaries import PATCH_PAIRS, evaluate_patch, make_patch, patch_derivative, spec_from_label
from .lattice import build_grid
from .operators import derivative_matrix, fd_laplacian, galerkin_matrices
from .problems import BOUNDARY_OPTIONS, get_problem, pde_residual
from .trig_transforms import forward, inverse, make_plan, naive_forward, plan_for_length

logger = logging.getLogger(__name__)

PlanFactory = Callable[[TransformKind, int], TransformPlan]


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


def _lengths(quick: bool) -> List[int]:
    return [4, 9, 16] if quick else [2, 3, 4, 5, 8, 9, 16, 17, 31, 32, 33, 63, 64]


def _transform_plans(plan_factory: PlanFactory, quick: bool):
    for kind in TransformKind:
        for n_transform in _lengths(quick):
            if kind == TransformKind.DCT1 and n_transform < 2:
                continue
            n_points = plan_for_length(kind, n_transform).n_points
            yield plan_factory(kind, n_points)


def check_transform_oracles(plan_factory: PlanFactory = make_plan, quick: bool = False) -> str:
    rng = np.random.default_rng(1)
    worst = 0.0
    for plan in _transform_plans(plan_factory, quick):
        a = rng.normal(size=plan.n_transform) + 1j * rng.normal(size=plan.n_transform)
        error = _relative(forward(a, plan), naive_forward(a, plan))
        if error > 1e-12:
            raise AssertionError(f"{plan.kind.value} with N_T={plan.n_transform} differs from its sum by {error:.3g}")
        worst = max(worst, error)
    return f"max relative error {worst:.2e}"


def check_round_trips(plan_factory: PlanFactory = make_plan, quick: bool = False) -> str:
    rng = np.random.default_rng(2)
    worst = 0.0
    for plan in _transform_plans(plan_factory, quick):
        a = rng.normal(size=plan.n_transform)
        error = _relative(inverse(forward(a, plan), plan), a)
        if error > 1e-13:
            raise AssertionError(f"{plan.kind.value} with N_T={plan.n_transform} round trip error {error:.3g}")
        worst = max(worst, error)
    return f"max relative error {worst:.2e}"


def check_derivative_matrix(quick: bool = False) -> str:
    n = 16 if quick else 64
    length = 1.0
    matrix = derivative_matrix(n, length)
    k2 = ((np.arange(1, n + 1) - 0.5) * np.pi / length) ** 2
    off = np.max(np.abs(matrix - np.diag(np.diag(matrix))))
    if off > 1e-10 * k2[-1]:
        raise AssertionError(f"Off-diagonal entries up to {off:.3g}")
    diagonal = _relative(np.diag(matrix), k2)
    if diagonal > 1e-12:
        raise AssertionError(f"Diagonal differs from k^2 by {diagonal:.3g}")
    return f"off-diagonal {off:.2e}, diagonal {diagonal:.2e}"


def check_galerkin(quick: bool = False) -> str:
    n = 4 if quick else 8
    mass, stiffness = galerkin_matrices(n)
    d = np.linalg.solve(mass, stiffness)
    k2 = ((np.arange(1, n + 1) - 0.5) * np.pi) ** 2
    error = float(np.max(np.abs(d - np.diag(k2))))
    if error > 1e-8:
        raise AssertionError(f"A^-1 B differs from diag(k^2) by {error:.3g}")
    return f"max deviation {error:.2e}"


def check_patches(quick: bool = False) -> str:
    rng = np.random.default_rng(3)
    x_a, x_b = -1.5, 2.0
    ends = np.array([x_a, x_b])
    for pair in PATCH_PAIRS:
        value_a, value_b = rng.normal(size=2) + 1j * rng.normal(size=2)
        p = make_patch(pair, value_a, value_b, x_a, x_b, coefficient=0.7, t_ref=0.3)
        values = evaluate_patch(p, p.t_ref, ends)
        slopes = patch_derivative(p, ends)
        for end, (kind, target) in enumerate(zip(pair, (value_a, value_b))):
            got = values[end] if kind == "D" else slopes[end]
            if abs(got - target) > 1e-12:
                raise AssertionError(f"{pair} patch misses its {kind} value at end {end}: {got} vs {target}")
    return f"{len(PATCH_PAIRS)} patch kinds"


def check_fd_convergence(quick: bool = False) -> str:
    errors = []
    sizes = [21, 41] if quick else [21, 41, 81]
    spec = spec_from_label("DD")
    for n in sizes:
        grid = build_grid([(0.0, np.pi)], n, spec)
        x = grid.coordinates(0)
        u = np.sin(x)[None, :]
        coefficients = get_problem("heat_zero").coefficients
        lap = fd_laplacian(u, grid, coefficients, spec, 0.0)
        errors.append(float(np.max(np.abs(lap[0, 1:-1] + np.sin(x[1:-1])))))
    slopes = [np.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
    if any(abs(s - 2) > 0.1 for s in slopes):
        raise AssertionError(f"Convergence slopes {slopes}")
    return "slopes " + ", ".join(f"{s:.3f}" for s in slopes)


def check_exact_residuals(quick: bool = False) -> str:
    worst = 0.0
    for problem_id, options in BOUNDARY_OPTIONS.items():
        for boundary in options[:1] if quick else options:
            problem = get_problem(problem_id, boundary)
            if problem.exact is None:
                continue
            x_a, x_b = problem.interval[0]
            x = np.linspace(x_a, x_b, 41)
            t0, t1 = problem.time_window
            for t in np.linspace(t0, t1, 5)[1:-1]:
                scale = max(float(np.max(np.abs(problem.exact(t, x)))), 1.0)
                residual = pde_residual(problem, t, x) / scale
                if residual > 1e-4:
                    raise AssertionError(f"{problem_id} ({boundary}) residual {residual:.3g} at t={t:.3g}")
                worst = max(worst, residual)
    return f"max scaled residual {worst:.2e}"


def run_selftest(plan_factory: PlanFactory = make_plan, quick: bool = False) -> List[CheckResult]:
    """
    Run the property suites and collect one CheckResult per suite.

    Args:
        plan_factory: Source of transform plans, replaceable to test the suite itself
        quick: Use fewer sizes and smaller matrices

    Returns:
        Results in run order; a failing suite has passed=False and its message in detail
    """
    checks = [
        ("transform_oracles", lambda: check_transform_oracles(plan_factory, quick)),
        ("round_trips", lambda: check_round_trips(plan_factory, quick)),
        ("derivative_matrix", lambda: check_derivative_matrix(quick)),
        ("galerkin", lambda: check_galerkin(quick)),
        ("patches", lambda: check_patches(quick)),
        ("fd_convergence", lambda: check_fd_convergence(quick)),
        ("exact_residuals", lambda: check_exact_residuals(quick)),
    ]
    results = []
    for name, check in checks:
        started = perf_counter()
        try:
            detail = check()
            passed = True
        except Exception as e:
            detail = str(e)
            passed = False
            logger.error(f"Self-test {name} failed: {detail}")
        results.append(CheckResult(name, passed, perf_counter() - started, detail))
        logger.info(f"{name}: {'ok' if passed else 'FAILED'} ({results[-1].seconds:.3f}s)")
    return results
