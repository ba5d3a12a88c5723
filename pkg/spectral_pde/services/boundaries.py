"""
Boundary specifications and patch functions.

A patch is a polynomial P with the boundary data of the field, so that u - P satisfies
the homogeneous version of the boundary conditions:

    D-D  P = u_a + (x - x_a)(u_b - u_a)/(x_b - x_a)
    N-N  P = eps (t - t_ref) + n_a (x - x_a) + (x - x_a)^2 (n_b - n_a) / (2 (x_b - x_a)),
         eps = D (n_b - n_a)/(x_b - x_a)
    D-N  P = u_a + (x - x_a) n_b
    N-D  P = u_b + (x - x_b) n_a
"""
import logging
from typing import Callable, List, Optional

import numpy as np

from ..exceptions import NoPatchError, ShapeMismatchError
from ..models.boundary import BoundaryCondition, BoundaryKind, BoundarySpec, BoundaryValue, Patch
from ..models.grid import Grid
from ..models.problem import LinearCoefficients

logger = logging.getLogger(__name__)

PATCH_PAIRS = ("DD", "NN", "DN", "ND")

ValueFactory = Callable[[int, int], BoundaryValue]


def make_patch(
    kind_pair: str,
    value_a: complex,
    value_b: complex,
    x_a: float,
    x_b: float,
    coefficient: complex = 1.0,
    t_ref: float = 0.0,
) -> Patch:
    """
    Build the patch of one dimension.

    Args:
        kind_pair: "DD", "NN", "DN" or "ND"
        value_a: Dirichlet value or Neumann derivative at x_a
        value_b: Dirichlet value or Neumann derivative at x_b
        x_a: Lower end
        x_b: Upper end
        coefficient: D^(2) of the dimension, sets the N-N drift rate
        t_ref: Time at which the N-N drift term vanishes

    Returns:
        Patch reproducing the boundary data
    """
    kind_pair = kind_pair.upper()
    if "P" in kind_pair:
        raise NoPatchError(f"Periodic boundaries need no patch: {kind_pair}")
    if kind_pair not in PATCH_PAIRS:
        raise ValueError(f"Unsupported boundary pair: {kind_pair}")
    epsilon = 0.0
    if kind_pair == "NN":
        epsilon = coefficient * (value_b - value_a) / (x_b - x_a)
    return Patch(kind_pair, float(x_a), float(x_b), value_a, value_b, epsilon, float(t_ref))


def evaluate_patch(p: Patch, t: float, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    length = p.x_b - p.x_a
    if p.kind_pair == "DD":
        values = p.value_a + (x - p.x_a) / length * (p.value_b - p.value_a)
    elif p.kind_pair == "NN":
        values = (p.epsilon * (t - p.t_ref) + p.value_a * (x - p.x_a)
                  + 0.5 * (x - p.x_a) ** 2 * (p.value_b - p.value_a) / length)
    elif p.kind_pair == "DN":
        values = p.value_a + (x - p.x_a) * p.value_b
    else:
        values = p.value_b + (x - p.x_b) * p.value_a
    return np.asarray(values, dtype=complex)


def patch_derivative(p: Patch, x: np.ndarray) -> np.ndarray:
    """First x-derivative of the patch."""
    x = np.asarray(x, dtype=float)
    length = p.x_b - p.x_a
    if p.kind_pair == "DD":
        values = np.full(x.shape, (p.value_b - p.value_a) / length)
    elif p.kind_pair == "NN":
        values = p.value_a + (x - p.x_a) * (p.value_b - p.value_a) / length
    elif p.kind_pair == "DN":
        values = np.full(x.shape, p.value_b)
    else:
        values = np.full(x.shape, p.value_a)
    return np.asarray(values, dtype=complex)


def patch_second_derivative(p: Patch) -> complex:
    if p.kind_pair == "NN":
        return (p.value_b - p.value_a) / (p.x_b - p.x_a)
    return 0.0


def _along(values: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = values.shape[0]
    return values.reshape(shape)


def subtract_patch(u: np.ndarray, p: Patch, x: np.ndarray, t: Optional[float] = None, axis: int = -1) -> np.ndarray:
    """v = u - P, with the patch broadcast along axis."""
    u = np.asarray(u)
    x = np.asarray(x)
    if u.shape[axis] != x.shape[0]:
        raise ShapeMismatchError(f"Field has {u.shape[axis]} points along axis {axis}, grid has {x.shape[0]}")
    t = p.t_ref if t is None else t
    return u - _along(evaluate_patch(p, t, x), u.ndim, axis)


def add_patch(v: np.ndarray, p: Patch, x: np.ndarray, t: Optional[float] = None, axis: int = -1) -> np.ndarray:
    """u = v + P, with the patch broadcast along axis."""
    v = np.asarray(v)
    x = np.asarray(x)
    if v.shape[axis] != x.shape[0]:
        raise ShapeMismatchError(f"Field has {v.shape[axis]} points along axis {axis}, grid has {x.shape[0]}")
    t = p.t_ref if t is None else t
    return v + _along(evaluate_patch(p, t, x), v.ndim, axis)


def patch_for(
    spec: BoundarySpec,
    component: int,
    dim: int,
    grid: Grid,
    coefficients: LinearCoefficients,
    t_values: float,
    t_ref: float,
) -> Optional[Patch]:
    """Patch of one component and dimension from boundary values sampled at t_values; None if periodic."""
    end_a, end_b = spec.ends(component, dim)
    if end_a.kind == BoundaryKind.PERIODIC:
        return None
    axis = grid.axes[dim]
    return make_patch(
        spec.pair_label(component, dim),
        end_a.at(t_values),
        end_b.at(t_values),
        axis.x_a,
        axis.x_b,
        coefficients.of(component, dim),
        t_ref,
    )


def patch_field(
    spec: BoundarySpec,
    grid: Grid,
    coefficients: LinearCoefficients,
    t_values: float,
    t_ref: float,
    t: float,
) -> np.ndarray:
    """
    Additive per-dimension patch of every component, shape (components, N_1, ..., N_d).

    Boundary values are sampled at t_values; the N-N drift is evaluated at t relative to t_ref.
    """
    out = np.zeros(grid.field_shape, dtype=complex)
    for c in range(spec.components):
        for i in range(grid.d):
            p = patch_for(spec, c, i, grid, coefficients, t_values, t_ref)
            if p is None:
                continue
            out[c] += _along(evaluate_patch(p, t, grid.coordinates(i)), grid.d, i)
    return out


def patch_laplacian(
    spec: BoundarySpec,
    grid: Grid,
    coefficients: LinearCoefficients,
    t_values: float,
) -> np.ndarray:
    """sum_i D_ci d^2P/dx_i^2 per component, shape (components, 1, ..., 1)."""
    out = np.zeros((spec.components,) + (1,) * grid.d, dtype=complex)
    for c in range(spec.components):
        for i in range(grid.d):
            p = patch_for(spec, c, i, grid, coefficients, t_values, t_values)
            if p is not None:
                out[c] += coefficients.of(c, i) * patch_second_derivative(p)
    return out


def boundary_rate(condition: BoundaryCondition, t: float, h: float) -> complex:
    """Centred time difference of a boundary value."""
    return (condition.at(t + h) - condition.at(t - h)) / (2 * h)


def dirichlet_mask(spec: BoundarySpec, grid: Grid) -> np.ndarray:
    """Boolean array (components, N_1, ..., N_d), True where a Dirichlet end pins the field."""
    mask = np.zeros(grid.field_shape, dtype=bool)
    for c in range(spec.components):
        for i in range(grid.d):
            end_a, end_b = spec.ends(c, i)
            index = [slice(None)] * grid.d
            if end_a.kind == BoundaryKind.DIRICHLET:
                index[i] = 0
                mask[c][tuple(index)] = True
            if end_b.kind == BoundaryKind.DIRICHLET:
                index[i] = -1
                mask[c][tuple(index)] = True
    return mask


def spec_from_label(
    label: str,
    dirichlet: Optional[ValueFactory] = None,
    neumann: Optional[ValueFactory] = None,
) -> BoundarySpec:
    """
    Build a BoundarySpec from a label such as "DN", "DD;NN" or "DD,PP".

    Components are separated by ';' and dimensions by ','. dirichlet(c, end) and
    neumann(c, end) return the value function of component c at end 0 (x_a) or 1 (x_b);
    missing factories give homogeneous conditions.
    """
    conditions: List[List[tuple]] = []
    for c, component_label in enumerate(label.upper().split(";")):
        dims = []
        for pair in component_label.split(","):
            pair = pair.strip()
            if len(pair) != 2 or any(k not in "PDN" for k in pair):
                raise ValueError(f"Unsupported boundary label: {pair}")
            ends = []
            for end, letter in enumerate(pair):
                kind = BoundaryKind(letter)
                factory = dirichlet if kind == BoundaryKind.DIRICHLET else neumann
                if kind == BoundaryKind.PERIODIC or factory is None:
                    ends.append(BoundaryCondition(kind))
                else:
                    ends.append(BoundaryCondition(kind, factory(c, end)))
            dims.append(tuple(ends))
        conditions.append(dims)
    return BoundarySpec(conditions)
