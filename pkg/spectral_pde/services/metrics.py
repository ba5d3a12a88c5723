"""
Comparison errors between numerical and analytic observables.

With d = |numeric - analytic| sampled on N_i times and N_j points,

    printed:  eps_c = sqrt( sum d^2 / (N_i N_j M) )
    squared:  eps_c = sqrt( sum d^2 / (N_i N_j) ) / M

where M is the largest |numeric| unless the problem fixes it.
"""
import logging
from typing import Iterable, Optional

import numpy as np
from scipy import integrate

from ..config.settings import ERROR_NORMALIZATION, SUPPORTED_NORMALIZATIONS, WEIGHT_SUM_TOLERANCE
from ..exceptions import ShapeMismatchError
from ..models.grid import Grid
from ..models.problem import Problem, Trajectory

logger = logging.getLogger(__name__)


def _normalized(mean_square: float, scale: float, normalization: str) -> float:
    if scale <= 0:
        raise ValueError(f"Normalization M must be positive: {scale}")
    if normalization == "printed":
        return float(np.sqrt(mean_square / scale))
    if normalization == "squared":
        return float(np.sqrt(mean_square) / scale)
    raise ValueError(f"Unsupported normalization: {normalization} (expected one of {SUPPORTED_NORMALIZATIONS})")


def scale_maximum(numeric: np.ndarray) -> float:
    """Largest absolute value of the numerics over all times and points."""
    return float(np.max(np.abs(numeric)))


def rms_error_uniform(
    numeric: np.ndarray,
    analytic: np.ndarray,
    scale: Optional[float] = None,
    normalization: str = ERROR_NORMALIZATION,
) -> float:
    """
    RMS relative comparison error on a uniform space-time lattice.

    Args:
        numeric: Sampled observable, time along the first axis
        analytic: Exact observable, same shape
        scale: Normalization M, the max |numeric| when omitted
        normalization: "printed" or "squared"

    Returns:
        eps_c
    """
    numeric = np.asarray(numeric)
    analytic = np.asarray(analytic)
    if numeric.shape != analytic.shape:
        raise ShapeMismatchError(f"Numeric shape {numeric.shape} does not match analytic {analytic.shape}")
    if scale is None:
        scale = scale_maximum(numeric)
    d = np.abs(numeric - analytic)
    return _normalized(float(np.mean(d ** 2)), scale, normalization)


def weights_consistent(
    dx: np.ndarray,
    dt: np.ndarray,
    x_extent: float,
    t_extent: float,
    tolerance: float = WEIGHT_SUM_TOLERANCE,
) -> bool:
    """True when the summed steps match the stated extents within tolerance."""
    return (abs(np.sum(dx) - x_extent) <= tolerance * abs(x_extent)
            and abs(np.sum(dt) - t_extent) <= tolerance * abs(t_extent))


def rms_error_weighted(
    numeric: np.ndarray,
    analytic: np.ndarray,
    dx: np.ndarray,
    dt: np.ndarray,
    x_extent: float,
    t_extent: float,
    scale: Optional[float] = None,
    normalization: str = ERROR_NORMALIZATION,
) -> float:
    """
    eps_c with every squared difference weighted by its space step dx_j times its time step dt_i.

    numeric and analytic have time on the first axis and space on the last; axes in between
    (components) are averaged.
    """
    numeric = np.asarray(numeric)
    analytic = np.asarray(analytic)
    dx = np.asarray(dx, dtype=float)
    dt = np.asarray(dt, dtype=float)
    if numeric.shape != analytic.shape:
        raise ShapeMismatchError(f"Numeric shape {numeric.shape} does not match analytic {analytic.shape}")
    if numeric.shape[0] != dt.shape[0] or numeric.shape[-1] != dx.shape[0]:
        raise ShapeMismatchError(
            f"Weights ({dt.shape[0]} times, {dx.shape[0]} points) do not match data {numeric.shape}")
    if np.any(dx <= 0) or np.any(dt <= 0):
        raise ValueError("Weights must be positive")
    if not weights_consistent(dx, dt, x_extent, t_extent):
        logger.warning(
            f"Weight sums {np.sum(dx):.6g}, {np.sum(dt):.6g} differ from extents {x_extent:.6g}, {t_extent:.6g}")
    if scale is None:
        scale = scale_maximum(numeric)
    weights = dt.reshape((-1,) + (1,) * (numeric.ndim - 1)) * dx
    inner = numeric.size // (dt.shape[0] * dx.shape[0])
    d = np.abs(numeric - analytic)
    mean_square = float(np.sum(d ** 2 * weights)) / (x_extent * t_extent * inner)
    return _normalized(mean_square, scale, normalization)


def trapezoid_integral(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Integrate over the trailing spatial axes with the trapezoidal rule."""
    result = np.asarray(values)
    for axis in reversed(grid.axes):
        result = integrate.trapezoid(result, dx=axis.spacing, axis=-1)
    return result


def observable_values(fields: np.ndarray, problem: Problem, grid: Grid) -> np.ndarray:
    """Apply the problem's observable, integrating over space when the problem asks for it."""
    values = problem.observable(fields)
    if problem.integrate_observable:
        values = trapezoid_integral(values, grid)
    return values


def observable_series(trajectory: Trajectory, observable, grid: Optional[Grid] = None,
                      integrate_space: bool = False) -> np.ndarray:
    """Observable o(t_i, x_j) of a stored trajectory; spatially integrated when integrate_space."""
    values = observable(trajectory.fields)
    if integrate_space:
        if grid is None:
            raise ValueError("Spatial integration needs the grid")
        values = trapezoid_integral(values, grid)
    return values


def ensemble_mean(series_set: Iterable[np.ndarray]) -> np.ndarray:
    return np.mean(np.stack(list(series_set)), axis=0)


def sampling_error_from_moments(mean: np.ndarray, mean_square: np.ndarray, n: int) -> np.ndarray:
    """Standard error of the mean from the running moments <o> and <|o|^2> of n trajectories."""
    mean = np.asarray(mean)
    if n < 2:
        return np.zeros(mean.shape)
    variance = np.maximum(np.asarray(mean_square) - np.abs(mean) ** 2, 0.0)
    return np.sqrt(variance) / np.sqrt(n - 1)


def sampling_error(values: np.ndarray) -> np.ndarray:
    """Standard error of the mean over the leading trajectory axis, std / sqrt(n - 1)."""
    values = np.asarray(values)
    return sampling_error_from_moments(np.mean(values, axis=0), np.mean(np.abs(values) ** 2, axis=0),
                                       values.shape[0])


def sigma_deviation(mean: np.ndarray, error: np.ndarray, expected: np.ndarray) -> float:
    """Largest |mean - expected| in units of the standard error, over entries with a nonzero error."""
    mean = np.asarray(mean)
    error = np.asarray(error)
    expected = np.broadcast_to(np.asarray(expected), mean.shape)
    resolved = error > 0
    if not np.any(resolved):
        return 0.0
    return float(np.max(np.abs(mean - expected)[resolved] / error[resolved]))


def step_error(coarse: np.ndarray, fine: np.ndarray) -> float:
    """Largest difference between results at step dt and dt/2."""
    return float(np.max(np.abs(np.asarray(coarse) - np.asarray(fine))))


def exact_series(problem: Problem, grid: Grid, times: np.ndarray) -> np.ndarray:
    """Exact observable at the given times, shaped like the numeric observable series."""
    if problem.exact_observable is not None:
        return np.asarray(problem.exact_observable(np.asarray(times)))
    if problem.exact is None:
        raise ValueError(f"Problem {problem.name} has no exact solution")
    x = grid.coordinates(0)
    fields = np.stack([problem.exact(t, x) for t in times])
    return observable_values(fields, problem, grid)


def evaluate(
    problem: Problem,
    grid: Grid,
    trajectory: Trajectory,
    normalization: str = ERROR_NORMALIZATION,
) -> float:
    """eps_c of a trajectory against the problem's exact observable."""
    if trajectory.diverged:
        return float("inf")
    analytic = exact_series(problem, grid, trajectory.times)
    scale = problem.normalization if problem.normalization is not None else None
    return rms_error_uniform(trajectory.observables, analytic, scale, normalization)
