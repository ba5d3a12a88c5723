"""
Benchmark problem catalog.

Fields have components on axis -2 and space on axis -1. Boundary values and
derivatives of problems with an exact solution are read off that solution at the
interval ends.
"""
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from ..config.settings import SERIES_TOLERANCE
from ..exceptions import UnknownProblemError
from ..models.boundary import BoundarySpec
from ..models.grid import Grid
from ..models.problem import LinearCoefficients, Problem
from .boundaries import spec_from_label

logger = logging.getLogger(__name__)

ExactFunction = Callable[[float, np.ndarray], np.ndarray]


def _sech(x):
    return 1.0 / np.cosh(x)


def _check_boundary(problem_id: str, label: str) -> str:
    label = label.upper()
    if label not in BOUNDARY_OPTIONS[problem_id]:
        raise ValueError(f"Unsupported boundary {label} for {problem_id} (expected one of {BOUNDARY_OPTIONS[problem_id]})")
    return label


def _exact_boundaries(label: str, interval, exact: ExactFunction, derivative: ExactFunction) -> BoundarySpec:
    """Boundary spec whose Dirichlet values and Neumann derivatives follow the exact solution."""
    ends = [np.array([interval[0]]), np.array([interval[1]])]

    def dirichlet(c: int, end: int):
        return lambda t: complex(exact(t, ends[end])[c, 0])

    def neumann(c: int, end: int):
        return lambda t: complex(derivative(t, ends[end])[c, 0])

    return spec_from_label(label, dirichlet, neumann)


def _from_exact(exact: ExactFunction, t_start: float) -> Callable[[Grid], np.ndarray]:
    return lambda grid: exact(t_start, grid.coordinates(0))


def _zeros(u: np.ndarray, t: float, x, du) -> np.ndarray:
    return np.zeros_like(u)


def _real(u: np.ndarray) -> np.ndarray:
    return u.real


def _modulus(u: np.ndarray) -> np.ndarray:
    return np.abs(u)


def _intensity(u: np.ndarray) -> np.ndarray:
    return np.abs(u) ** 2


def _kerr(u: np.ndarray, t: float, x, du) -> np.ndarray:
    return 1j * u * np.abs(u) ** 2


# Heat equation, D = 1 on [0, pi]

_HEAT_ZERO = {
    "DD": lambda t, x: 2 * np.sin(x) * np.exp(-t) + np.sin(2 * x) * np.exp(-4 * t),
    "NN": lambda t, x: 2 + np.cos(x) * np.exp(-t) + np.cos(2 * x) * np.exp(-4 * t),
}

_HEAT = {
    "DD": lambda t, x: 4 * np.sin(x) * np.exp(-t) + np.sin(2 * x) * np.exp(-4 * t),
    "NN": lambda t, x: 5 + 4 * np.cos(x) * np.exp(-t) + np.cos(2 * x) * np.exp(-4 * t),
    "DN": lambda t, x: 4 * np.sin(x / 2) * np.exp(-t / 4) + np.sin(3 * x / 2) * np.exp(-9 * t / 4),
    "ND": lambda t, x: 4 * np.cos(x / 2) * np.exp(-t / 4) + np.cos(3 * x / 2) * np.exp(-9 * t / 4),
}


def _single(fn: Callable[[float, np.ndarray], np.ndarray]) -> ExactFunction:
    def exact(t: float, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(fn(t, x), dtype=complex), x.shape)[None, :].copy()
    return exact


def _heat_problem(name: str, solutions: dict, label: str, t_end: float, points: int, steps: int) -> Problem:
    exact = _single(solutions[label])
    return Problem(
        name=name,
        components=1,
        coefficients=LinearCoefficients([[1.0]]),
        drift=_zeros,
        initial=_from_exact(exact, 0.0),
        boundary=spec_from_label(label),
        interval=[(0.0, np.pi)],
        time_window=(0.0, t_end),
        default_points=points,
        default_steps=steps,
        exact=exact,
    )


def heat_zero_boundary(boundary: str = "DD") -> Problem:
    """Heat equation with zero D-D or N-N boundaries, 20 spatial steps on [0, pi], t in [0, 1]."""
    label = _check_boundary("heat_zero", boundary)
    return _heat_problem("heat_zero", _HEAT_ZERO, label, 1.0, 21, 2000)


def heat_nonperiodic(boundary: str = "DD") -> Problem:
    """Heat equation with zero boundaries of any non-periodic pair, 50 spatial steps on [0, pi], t in [0, 4]."""
    label = _check_boundary("heat", boundary)
    return _heat_problem("heat", _HEAT, label, 4.0, 51, 40)


# Advection-diffusion: a_t = D a_xx - c a_x

ADVECTION_SPEED = 1.0
ADVECTION_DIFFUSION = 0.5


def advection(boundary: str = "DD") -> Problem:
    """Decaying travelling wave exp(-D t) sin(x - c t) on [0, pi], t in [0, 1], with its own boundary data."""
    label = _check_boundary("advection", boundary)
    c, diffusion = ADVECTION_SPEED, ADVECTION_DIFFUSION
    interval = (0.0, np.pi)

    def drift(u: np.ndarray, t: float, x, du) -> np.ndarray:
        return -c * du[0]

    exact = _single(lambda t, x: np.exp(-diffusion * t) * np.sin(x - c * t))
    derivative = _single(lambda t, x: np.exp(-diffusion * t) * np.cos(x - c * t))
    return Problem(
        name="advection",
        components=1,
        coefficients=LinearCoefficients([[diffusion]]),
        drift=drift,
        initial=_from_exact(exact, 0.0),
        boundary=_exact_boundaries(label, interval, exact, derivative),
        interval=[interval],
        time_window=(0.0, 1.0),
        default_points=41,
        default_steps=2000,
        exact=exact,
        needs_gradient=True,
    )


# Nonlinear Schrodinger equation

SHIFTED_SOLITON_BACKGROUND = float(_sech(5.0))

_SHIFTED_INTERVALS = {"DD": (-5.0, 5.0), "DN": (-5.0, 0.0), "ND": (0.0, 5.0)}


def nlse_shifted_soliton(boundary: str = "DD") -> Problem:
    """
    Stationary soliton written as a shifted field a - a0 with a0 = sech(5).

    The shifted field vanishes at x = +-5 and its derivative vanishes at x = 0, so all
    boundaries are homogeneous.
    """
    label = _check_boundary("nlse_shifted", boundary)
    a0 = SHIFTED_SOLITON_BACKGROUND
    x_a, x_b = _SHIFTED_INTERVALS[label]

    def drift(u: np.ndarray, t: float, x, du) -> np.ndarray:
        a = u + a0
        return 1j * (a * np.abs(a) ** 2 - a / 2)

    exact = _single(lambda t, x: _sech(x) - a0 + 0j * t)
    return Problem(
        name="nlse_shifted",
        components=1,
        coefficients=LinearCoefficients([[0.5j]]),
        drift=drift,
        initial=_from_exact(exact, 0.0),
        boundary=spec_from_label(label),
        interval=[(x_a, x_b)],
        time_window=(0.0, 1.0),
        default_points=int(round((x_b - x_a) / 0.1)) + 1,
        default_steps=100,
        exact=exact,
    )


def nlse_soliton_td_boundary(boundary: str = "DD") -> Problem:
    """Bright soliton sech(x) exp(it/2) on [-2, 2] with its own time-dependent boundary data."""
    label = _check_boundary("soliton", boundary)
    exact = _single(lambda t, x: _sech(x) * np.exp(0.5j * t))
    derivative = _single(lambda t, x: -_sech(x) * np.tanh(x) * np.exp(0.5j * t))
    interval = (-2.0, 2.0)
    return Problem(
        name="soliton",
        components=1,
        coefficients=LinearCoefficients([[0.5j]]),
        drift=_kerr,
        initial=_from_exact(exact, 0.0),
        boundary=_exact_boundaries(label, interval, exact, derivative),
        interval=[interval],
        time_window=(0.0, 2 * np.pi),
        default_points=41,
        default_steps=2000,
        exact=exact,
        observable=_real,
    )


def _peregrine_value(t, x):
    return np.exp(1j * t) * (4 * (1 + 2j * t) / (1 + 4 * (t ** 2 + x ** 2)) - 1)


def _peregrine_slope(t, x):
    return np.exp(1j * t) * 4 * (1 + 2j * t) * (-8 * x) / (1 + 4 * (t ** 2 + x ** 2)) ** 2


def peregrine(boundary: str = "DD") -> Problem:
    """Peregrine rogue wave on [-2, 2], t in [-5, 5], observed as |a|^2 normalized by its peak 9."""
    label = _check_boundary("peregrine", boundary)
    exact = _single(_peregrine_value)
    interval = (-2.0, 2.0)
    return Problem(
        name="peregrine",
        components=1,
        coefficients=LinearCoefficients([[0.5j]]),
        drift=_kerr,
        initial=_from_exact(exact, -5.0),
        boundary=_exact_boundaries(label, interval, exact, _single(_peregrine_slope)),
        interval=[interval],
        time_window=(-5.0, 5.0),
        default_points=21,
        default_steps=2000,
        exact=exact,
        observable=_intensity,
        normalization=9.0,
    )


def _breather_value(t, x):
    numerator = np.cosh(3 * x) + 3 * np.exp(-4j * t) * np.cosh(x)
    denominator = np.cosh(4 * x) + 4 * np.cosh(2 * x) + 3 * np.cos(4 * t)
    return 4 * np.exp(-0.5j * t) * numerator / denominator


def _breather_slope(t, x):
    numerator = np.cosh(3 * x) + 3 * np.exp(-4j * t) * np.cosh(x)
    denominator = np.cosh(4 * x) + 4 * np.cosh(2 * x) + 3 * np.cos(4 * t)
    numerator_slope = 3 * np.sinh(3 * x) + 3 * np.exp(-4j * t) * np.sinh(x)
    denominator_slope = 4 * np.sinh(4 * x) + 8 * np.sinh(2 * x)
    return 4 * np.exp(-0.5j * t) * (numerator_slope / denominator - numerator * denominator_slope / denominator ** 2)


def check_boundary_slope(value: ExactFunction, slope: ExactFunction, points: np.ndarray, times: np.ndarray,
                         step: float = 1e-5, tolerance: float = 1e-6) -> float:
    """
    Compare a boundary derivative formula with a central difference of the value formula.

    Raises:
        ValueError: If they differ by more than tolerance relative to the slope scale
    """
    worst = 0.0
    for t in times:
        numeric = (value(t, points + step) - value(t, points - step)) / (2 * step)
        analytic = slope(t, points)
        scale = max(float(np.max(np.abs(analytic))), 1.0)
        worst = max(worst, float(np.max(np.abs(numeric - analytic))) / scale)
    if worst > tolerance:
        raise ValueError(f"Boundary derivative disagrees with the solution by {worst:.3g}")
    return worst


def breather(boundary: str = "DD") -> Problem:
    """Second-order soliton 2 sech(x) on [-2, 2] for one breathing period, observed as |a|."""
    label = _check_boundary("breather", boundary)
    interval = (-2.0, 2.0)
    check_boundary_slope(_breather_value, _breather_slope, np.array(interval), np.linspace(0.0, np.pi, 9))

    def drift(u: np.ndarray, t: float, x, du) -> np.ndarray:
        return -1j * u * np.abs(u) ** 2

    exact = _single(_breather_value)
    return Problem(
        name="breather",
        components=1,
        coefficients=LinearCoefficients([[-0.5j]]),
        drift=drift,
        initial=_from_exact(exact, 0.0),
        boundary=_exact_boundaries(label, interval, exact, _single(_breather_slope)),
        interval=[interval],
        time_window=(0.0, np.pi),
        default_points=21,
        default_steps=2000,
        exact=exact,
        observable=_modulus,
    )


# Simultons: coupled second-harmonic fields with profile s = 3/2 sech^2(x/2)

SIMULTON_PEAK = 1.5


def _simulton_profile(x):
    return SIMULTON_PEAK * _sech(x / 2) ** 2


def _simulton_slope(x):
    return -SIMULTON_PEAK * _sech(x / 2) ** 2 * np.tanh(x / 2)


def _simulton_solution(phases: List[float]):
    def value(t, x):
        x = np.asarray(x, dtype=float)
        return np.stack([_simulton_profile(x) * np.exp(-1j * p * t) for p in phases])

    def slope(t, x):
        x = np.asarray(x, dtype=float)
        return np.stack([_simulton_slope(x) * np.exp(-1j * p * t) for p in phases])

    return value, slope


def double_simulton(boundary: str = "DD;NN") -> Problem:
    """a_t = -i(a_xx + a* b), b_t = -i(b_xx + a^2 + b) on [-3, 3], t in [0, pi]."""
    label = _check_boundary("double_simulton", boundary)
    interval = (-3.0, 3.0)

    def drift(u: np.ndarray, t: float, x, du) -> np.ndarray:
        a, b = u[..., 0, :], u[..., 1, :]
        return np.stack([-1j * np.conj(a) * b, -1j * (a ** 2 + b)], axis=-2)

    exact, slope = _simulton_solution([1.0, 2.0])
    return Problem(
        name="double_simulton",
        components=2,
        coefficients=LinearCoefficients([[-1j], [-1j]]),
        drift=drift,
        initial=_from_exact(exact, 0.0),
        boundary=_exact_boundaries(label, interval, exact, slope),
        interval=[interval],
        time_window=(0.0, np.pi),
        default_points=21,
        default_steps=2000,
        exact=exact,
        observable=_real,
        normalization=SIMULTON_PEAK,
    )


def triple_simulton(boundary: str = "DD;ND;NN") -> Problem:
    """a_t = -i(a_xx + a* c), b_t = -i(b_xx + b* c), c_t = -i(c_xx + a b + c) on [-3, 3]."""
    label = _check_boundary("triple_simulton", boundary)
    interval = (-3.0, 3.0)

    def drift(u: np.ndarray, t: float, x, du) -> np.ndarray:
        a, b, c = u[..., 0, :], u[..., 1, :], u[..., 2, :]
        return np.stack([-1j * np.conj(a) * c, -1j * np.conj(b) * c, -1j * (a * b + c)], axis=-2)

    exact, slope = _simulton_solution([1.0, 1.0, 2.0])
    return Problem(
        name="triple_simulton",
        components=3,
        coefficients=LinearCoefficients([[-1j], [-1j], [-1j]]),
        drift=drift,
        initial=_from_exact(exact, 0.0),
        boundary=_exact_boundaries(label, interval, exact, slope),
        interval=[interval],
        time_window=(0.0, np.pi),
        default_points=21,
        default_steps=2000,
        exact=exact,
        observable=_real,
        normalization=SIMULTON_PEAK,
    )


# Stochastic heat equation

STOCHASTIC_HEAT_LENGTH = 5.0


def stochastic_heat_moment(
    t: np.ndarray,
    length: float = STOCHASTIC_HEAT_LENGTH,
    n_modes: Optional[int] = None,
    dt: Optional[float] = None,
    coefficient: float = 0.5,
) -> np.ndarray:
    """
    J(t) = int <|a|^2> dx for a_t = D a_xx + eta with zero Dirichlet ends and a(0) = 0.

    Mode n = 1, 2, ... with k_n = n pi / L contributes V_n(t) = (1 - exp(-2 K_n t)) / (2 K_n),
    K_n = D k_n^2.

    Args:
        t: Times (t >= 0)
        length: Interval length L
        n_modes: Keep only the first n_modes modes (the lattice-resolved ones)
        dt: With n_modes, the expectation of the midpoint FIP recursion at step dt,
            V_n(t_j) = dt e^{-K_n dt} (1 - q^j) / (1 - q), q = e^{-2 K_n dt}
        coefficient: Diffusion coefficient D

    Returns:
        J at every t
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("Times must be non-negative")
    if dt is not None and n_modes is None:
        raise ValueError("The lattice expectation needs n_modes")

    if n_modes is not None:
        k = np.arange(1, n_modes + 1) * np.pi / length
        rate = coefficient * k ** 2
        if dt is None:
            terms = (1 - np.exp(-2 * np.outer(t, rate))) / (2 * rate)
        else:
            steps = np.rint(t / dt)
            q = np.exp(-2 * rate * dt)
            terms = dt * np.exp(-rate * dt) * (1 - q[None, :] ** steps[:, None]) / (1 - q)
        return terms.sum(axis=1)

    # sum_n 1/(2 K_n) = L^2 / (12 D); the decaying remainder converges fast for t > 0
    total = length ** 2 / (12 * coefficient)
    positive = t > 0
    result = np.zeros_like(t)
    if not np.any(positive):
        return result
    t_min = float(np.min(t[positive]))
    n_max = int(np.ceil(length / np.pi * np.sqrt(np.log(1 / SERIES_TOLERANCE) / (2 * coefficient * t_min)))) + 1
    k = np.arange(1, n_max + 1) * np.pi / length
    rate = coefficient * k ** 2
    remainder = (np.exp(-2 * np.outer(t[positive], rate)) / (2 * rate)).sum(axis=1)
    result[positive] = total - remainder
    return result


def stochastic_heat(boundary: str = "DD") -> Problem:
    """a_t = a_xx / 2 + eta on [0, 5], zero boundaries and initial field, observed as J(t)."""
    label = _check_boundary("stochastic_heat", boundary)
    length = STOCHASTIC_HEAT_LENGTH

    def noise(u: np.ndarray, t: float, x, w: np.ndarray) -> np.ndarray:
        return w

    return Problem(
        name="stochastic_heat",
        components=1,
        coefficients=LinearCoefficients([[0.5]]),
        drift=_zeros,
        initial=lambda grid: np.zeros(grid.field_shape, dtype=complex),
        boundary=spec_from_label(label),
        interval=[(0.0, length)],
        time_window=(0.0, 1.0),
        default_points=101,
        default_steps=1000,
        noise=noise,
        noise_components=1,
        observable=_intensity,
        integrate_observable=True,
        exact_observable=lambda times: stochastic_heat_moment(times, length)[:, None],
        lattice_observable=lambda times, grid, dt: stochastic_heat_moment(
            times, length, n_modes=grid.shape[0] - 2, dt=dt)[:, None],
    )


PROBLEMS: Dict[str, Callable[..., Problem]] = {
    "heat_zero": heat_zero_boundary,
    "heat": heat_nonperiodic,
    "advection": advection,
    "nlse_shifted": nlse_shifted_soliton,
    "soliton": nlse_soliton_td_boundary,
    "peregrine": peregrine,
    "breather": breather,
    "double_simulton": double_simulton,
    "triple_simulton": triple_simulton,
    "stochastic_heat": stochastic_heat,
}

_PAIRS = ["DD", "NN", "DN", "ND"]

BOUNDARY_OPTIONS: Dict[str, List[str]] = {
    "heat_zero": ["DD", "NN"],
    "heat": _PAIRS,
    "advection": _PAIRS,
    "nlse_shifted": ["DD", "DN", "ND"],
    "soliton": _PAIRS,
    "peregrine": _PAIRS,
    "breather": _PAIRS,
    "double_simulton": ["DD;NN", "NN;DN", "DN;ND", "ND;DD", "DD;DD", "NN;NN"],
    "triple_simulton": ["DD;ND;NN"],
    "stochastic_heat": ["DD"],
}


def get_problem(problem_id: str, boundary: Optional[str] = None) -> Problem:
    """
    Look up a catalog problem.

    Raises:
        UnknownProblemError: If problem_id is not in the catalog
    """
    if problem_id not in PROBLEMS:
        raise UnknownProblemError(f"Unknown problem: {problem_id} (expected one of {sorted(PROBLEMS)})")
    if boundary is None:
        return PROBLEMS[problem_id]()
    return PROBLEMS[problem_id](boundary)


def pde_residual(problem: Problem, t: float, x: np.ndarray, dx: float = 2e-4, dt: float = 1e-4) -> float:
    """
    Largest |u_t - g(u, t, x, u_x) - D u_xx| of the exact solution by central differences.
    """
    if problem.exact is None:
        raise ValueError(f"Problem {problem.name} has no exact solution")
    x = np.asarray(x, dtype=float)
    exact = problem.exact
    u = exact(t, x)
    u_t = (exact(t + dt, x) - exact(t - dt, x)) / (2 * dt)
    u_x = (exact(t, x + dx) - exact(t, x - dx)) / (2 * dx)
    u_xx = (exact(t, x + dx) - 2 * u + exact(t, x - dx)) / dx ** 2
    linear = problem.coefficients.values[:, 0][:, None] * u_xx
    residual = u_t - problem.drift(u, t, [x], [u_x]) - linear
    return float(np.max(np.abs(residual)))
