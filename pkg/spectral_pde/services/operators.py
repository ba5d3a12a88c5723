import logging
from typing import List, Tuple

import numpy as np
from scipy import integrate

from ..exceptions import ShapeMismatchError
from ..models.boundary import BoundaryKind, BoundarySpec
from ..models.grid import Grid
from ..models.problem import LinearCoefficients, Propagator
from ..models.transform import TransformPlan
from .lattice import half_shifted_points
from .trig_transforms import forward, inverse, make_plan, transform_slice

logger = logging.getLogger(__name__)


def _check_field(v: np.ndarray, grid: Grid) -> None:
    if v.shape[v.ndim - grid.d - 1:] != grid.field_shape:
        raise ShapeMismatchError(f"Field shape {v.shape} does not end with grid shape {grid.field_shape}")


def _component_index(c: int, d: int, spatial: Tuple[slice, ...] = None) -> tuple:
    spatial = spatial if spatial is not None else (slice(None),) * d
    return (Ellipsis, c) + tuple(spatial)


def component_plans(grid: Grid, c: int) -> Tuple[TransformPlan, ...]:
    return tuple(make_plan(kind, axis.points) for kind, axis in zip(grid.kinds[c], grid.axes))


def _spectral_sum(grid: Grid, c: int, weights: List[complex]) -> np.ndarray:
    """sum_i weights[i] * k_i^2 as an array over the transformed modes of component c."""
    total = 0.0
    for i, k in enumerate(grid.wavenumbers[c]):
        shape = [1] * grid.d
        shape[i] = k.shape[0]
        total = total + weights[i] * (k ** 2).reshape(shape)
    return np.asarray(total, dtype=complex)


def to_spectral(v: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """Forward transform of every component over its transformed points."""
    _check_field(v, grid)
    spectra = []
    for c in range(grid.components):
        plans = component_plans(grid, c)
        slices = tuple(transform_slice(p.kind, p.n_points) for p in plans)
        data = v[_component_index(c, grid.d, slices)]
        for i, plan in enumerate(plans):
            data = forward(data, plan, axis=data.ndim - grid.d + i)
        spectra.append(data)
    return spectra


def from_spectral(spectra: List[np.ndarray], grid: Grid, leading: Tuple[int, ...] = ()) -> np.ndarray:
    """Inverse of to_spectral; points outside each transform (Dirichlet ends) are set to zero."""
    out = np.zeros(leading + grid.field_shape, dtype=complex)
    for c, data in enumerate(spectra):
        plans = component_plans(grid, c)
        slices = tuple(transform_slice(p.kind, p.n_points) for p in plans)
        for i, plan in enumerate(plans):
            data = inverse(data, plan, axis=data.ndim - grid.d + i)
        out[_component_index(c, grid.d, slices)] = data
    return out


def spectral_laplacian(v: np.ndarray, grid: Grid, coefficients: LinearCoefficients) -> np.ndarray:
    """
    D^(2) Laplacian of a field satisfying the homogeneous boundaries of its transforms.

    Each component is transformed along every dimension, multiplied by -sum_i D_i k_i^2
    and transformed back.
    """
    spectra = to_spectral(v, grid)
    for c in range(grid.components):
        weights = [coefficients.of(c, i) for i in range(grid.d)]
        spectra[c] = -_spectral_sum(grid, c, weights) * spectra[c]
    return from_spectral(spectra, grid, v.shape[:v.ndim - grid.d - 1])


def build_propagator(coefficients: LinearCoefficients, grid: Grid, tau: float) -> Propagator:
    """Diagonal factors exp(-tau sum_i D_i k_i^2) per component."""
    factors = []
    plans = []
    for c in range(grid.components):
        weights = [coefficients.of(c, i) for i in range(grid.d)]
        factors.append(np.exp(-tau * _spectral_sum(grid, c, weights)))
        plans.append(component_plans(grid, c))
    logger.debug(f"Built propagator for tau={tau:.6g}")
    return Propagator(factors=factors, tau=tau, plans=plans)


def apply_propagator(propagator: Propagator, spectra: List[np.ndarray]) -> List[np.ndarray]:
    return [factor * data for factor, data in zip(propagator.factors, spectra)]


def propagate(h: np.ndarray, grid: Grid, propagator: Propagator) -> np.ndarray:
    """Propagate a homogeneous field in position space."""
    spectra = apply_propagator(propagator, to_spectral(h, grid))
    return from_spectral(spectra, grid, h.shape[:h.ndim - grid.d - 1])


def fd_laplacian(
    u: np.ndarray,
    grid: Grid,
    coefficients: LinearCoefficients,
    boundary: BoundarySpec,
    t: float,
) -> np.ndarray:
    """
    Second-order central difference Laplacian with boundary closure.

    Dirichlet ends use the boundary value in the neighbouring stencil and get a zero row;
    Neumann ends use a ghost point u_{-1} = u_1 - 2 dx n_a (and the mirror at x_b).
    """
    _check_field(u, grid)
    out = np.zeros(u.shape, dtype=complex)
    for c in range(grid.components):
        index = _component_index(c, grid.d)
        uc = u[index]
        total = np.zeros(uc.shape, dtype=complex)
        for i, axis in enumerate(grid.axes):
            end_a, end_b = boundary.ends(c, i)
            work = np.moveaxis(np.array(uc, dtype=complex), uc.ndim - grid.d + i, -1)
            dx2 = axis.spacing ** 2
            lap = np.zeros(work.shape, dtype=complex)
            if end_a.kind == BoundaryKind.PERIODIC:
                lap = (np.roll(work, 1, axis=-1) - 2 * work + np.roll(work, -1, axis=-1)) / dx2
            else:
                if end_a.kind == BoundaryKind.DIRICHLET:
                    work[..., 0] = end_a.at(t)
                if end_b.kind == BoundaryKind.DIRICHLET:
                    work[..., -1] = end_b.at(t)
                lap[..., 1:-1] = (work[..., :-2] - 2 * work[..., 1:-1] + work[..., 2:]) / dx2
                if end_a.kind == BoundaryKind.NEUMANN:
                    lap[..., 0] = (2 * work[..., 1] - 2 * work[..., 0] - 2 * axis.spacing * end_a.at(t)) / dx2
                if end_b.kind == BoundaryKind.NEUMANN:
                    lap[..., -1] = (2 * work[..., -2] - 2 * work[..., -1] + 2 * axis.spacing * end_b.at(t)) / dx2
            total += coefficients.of(c, i) * np.moveaxis(lap, -1, uc.ndim - grid.d + i)
        out[index] = total
    return out


def first_derivative_fd(u: np.ndarray, grid: Grid, dim: int = 0) -> np.ndarray:
    """Central first derivative along a spatial dimension, second-order one-sided at the ends."""
    _check_field(u, grid)
    return np.gradient(u, grid.axes[dim].spacing, axis=u.ndim - grid.d + dim, edge_order=2)


def derivative_matrix(n: int, length: float) -> np.ndarray:
    """
    D_ln = (2 k_n^2 / N) sum_m sin(k_n x_m) sin(k_l x_m) on the cell-centred lattice,
    with k_n = (n - 1/2) pi / L. The result is diag(k_n^2) up to rounding.
    """
    k = (np.arange(1, n + 1) - 0.5) * np.pi / length
    x = half_shifted_points(n, length)
    basis = np.sin(np.outer(k, x))
    return (2.0 / n) * (basis @ basis.T) * (k ** 2)[None, :]


def galerkin_matrices(n: int, length: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mass and stiffness matrices of the half-sine basis sin(k_i x), k_i = (i - 1/2) pi / L,
    integrated numerically over [0, L].

    Returns:
        (A, B) with A_ij = int sin(k_i x) sin(k_j x) dx and B_ij = int k_i k_j cos(k_i x) cos(k_j x) dx
    """
    k = (np.arange(1, n + 1) - 0.5) * np.pi / length
    mass = np.empty((n, n))
    stiffness = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            mass[i, j] = integrate.quad(
                lambda x: np.sin(k[i] * x) * np.sin(k[j] * x), 0.0, length, epsabs=1e-13, limit=200)[0]
            stiffness[i, j] = integrate.quad(
                lambda x: k[i] * k[j] * np.cos(k[i] * x) * np.cos(k[j] * x), 0.0, length, epsabs=1e-13, limit=200)[0]
    return mass, stiffness
