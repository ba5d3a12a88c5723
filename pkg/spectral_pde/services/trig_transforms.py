"""
Discrete sine, cosine and Fourier transforms on 1D slices of a lattice field.

Every sine/cosine transform is computed by embedding the data, with the odd or even
symmetry of its kind, into a complex FFT. Inverses apply the partner transform and
scale by 1/N_FT. Conventions (unnormalized, N_T points, 0-based indices):

    DST1  a~_n = 2 sum_j a_j sin(pi (j+1)(n+1) / (N_T+1))
    DCT1  a~_n = a_0 + (-1)^n a_{N_T-1} + 2 sum_{0<j<N_T-1} a_j cos(pi j n / (N_T-1))
    DST2  a~_n = 2 sum_j a_j sin(pi (n+1)(2j+1) / (2 N_T))
    DST3  a~_n = (-1)^n a_{N_T-1} + 2 sum_{j<N_T-1} a_j sin(pi (2n+1)(j+1) / (2 N_T))
    DCT2  a~_n = 2 sum_j a_j cos(pi n (2j+1) / (2 N_T))
    DCT3  a~_n = a_0 + 2 sum_{j>0} a_j cos(pi (2n+1) j / (2 N_T))
"""
import logging
from functools import lru_cache
from typing import Callable, Dict, Union

import numpy as np

from ..exceptions import InvalidPlanError
from ..models.boundary import BoundaryKind
from ..models.transform import SpectralCoefficients, TransformKind, TransformPlan

logger = logging.getLogger(__name__)

KindLike = Union[TransformKind, str]

_PARTNER = {
    TransformKind.DST1: TransformKind.DST1,
    TransformKind.DCT1: TransformKind.DCT1,
    TransformKind.DST2: TransformKind.DST3,
    TransformKind.DST3: TransformKind.DST2,
    TransformKind.DCT2: TransformKind.DCT3,
    TransformKind.DCT3: TransformKind.DCT2,
}

# Boundary pair (end a, end b) -> transform whose basis satisfies the homogeneous conditions
_BOUNDARY_KINDS = {
    "PP": TransformKind.FFT,
    "DD": TransformKind.DST1,
    "NN": TransformKind.DCT1,
    "DN": TransformKind.DST3,
    "ND": TransformKind.DCT3,
}


def _sizes(kind: TransformKind, n_points: int):
    if kind == TransformKind.FFT:
        return n_points, n_points
    if kind == TransformKind.DST1:
        return n_points - 2, 2 * (n_points - 1)
    if kind == TransformKind.DCT1:
        return n_points, 2 * (n_points - 1)
    return n_points - 1, 2 * (n_points - 1)


def validate_plan(plan: TransformPlan) -> None:
    """Check the point-count bookkeeping of a plan."""
    n_transform, n_logical = _sizes(plan.kind, plan.n_points)
    minimum = 2 if plan.kind == TransformKind.DCT1 else 1
    if plan.n_transform < minimum:
        raise InvalidPlanError(f"{plan.kind.value} needs at least {minimum} transformed points, got {plan.n_transform}")
    if (plan.n_transform, plan.n_logical) != (n_transform, n_logical):
        raise InvalidPlanError(
            f"Inconsistent {plan.kind.value} plan for N={plan.n_points}: "
            f"N_T={plan.n_transform}, N_FT={plan.n_logical}, expected {n_transform}, {n_logical}"
        )


@lru_cache(maxsize=None)
def _cached_plan(kind: TransformKind, n_points: int) -> TransformPlan:
    n_transform, n_logical = _sizes(kind, n_points)
    plan = TransformPlan(kind, n_points, n_transform, n_logical)
    validate_plan(plan)
    logger.debug(f"Built {kind.value} plan: N={n_points}, N_T={n_transform}, N_FT={n_logical}")
    return plan


def make_plan(kind: KindLike, n_points: int) -> TransformPlan:
    """
    Get the cached plan for a transform over a lattice of n_points physical points.

    Raises:
        InvalidPlanError: if the lattice is too small for the transform
    """
    return _cached_plan(TransformKind(kind), int(n_points))


def plan_for_length(kind: KindLike, n_transform: int) -> TransformPlan:
    """Plan whose transformed length is n_transform."""
    kind = TransformKind(kind)
    if kind == TransformKind.DST1:
        return make_plan(kind, n_transform + 2)
    if kind in (TransformKind.DCT1, TransformKind.FFT):
        return make_plan(kind, n_transform)
    return make_plan(kind, n_transform + 1)


def kind_for_boundaries(kind_a: BoundaryKind, kind_b: BoundaryKind) -> TransformKind:
    label = BoundaryKind(kind_a).value + BoundaryKind(kind_b).value
    try:
        return _BOUNDARY_KINDS[label]
    except KeyError:
        raise ValueError(f"Unsupported boundary pair: {label}") from None


def plan_for_boundaries(kind_a: BoundaryKind, kind_b: BoundaryKind, n_points: int) -> TransformPlan:
    return make_plan(kind_for_boundaries(kind_a, kind_b), n_points)


def transform_slice(kind: KindLike, n_points: int) -> slice:
    """Lattice points carried by a transform; the others are homogeneous Dirichlet ends."""
    kind = TransformKind(kind)
    if kind == TransformKind.DST1:
        return slice(1, n_points - 1)
    if kind in (TransformKind.DST2, TransformKind.DST3):
        return slice(1, n_points)
    if kind in (TransformKind.DCT2, TransformKind.DCT3):
        return slice(0, n_points - 1)
    return slice(0, n_points)


# FFT embeddings, all acting on the last axis

def _empty(a: np.ndarray, length: int) -> np.ndarray:
    return np.zeros(a.shape[:-1] + (length,), dtype=complex)


def _dst1(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    z = _empty(a, 2 * (m + 1))
    z[..., 1:m + 1] = a
    z[..., m + 2:] = -a[..., ::-1]
    return 1j * np.fft.fft(z)[..., 1:m + 1]


def _dct1(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    z = np.concatenate([a, a[..., -2:0:-1]], axis=-1).astype(complex)
    return np.fft.fft(z)[..., :m]


def _dst2(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    z = _empty(a, 4 * m)
    z[..., 1:2 * m:2] = a
    z[..., 2 * m + 1::2] = -a[..., ::-1]
    return 1j * np.fft.fft(z)[..., 1:m + 1]


def _dst3(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    w = np.array(a, dtype=complex)
    w[..., -1] *= 0.5
    z = _empty(a, 4 * m)
    z[..., 1:m + 1] = w
    z[..., 3 * m:] = -w[..., ::-1]
    return 1j * np.fft.fft(z)[..., 1:2 * m:2]


def _dct2(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    z = _empty(a, 4 * m)
    z[..., 1:2 * m:2] = a
    z[..., 2 * m + 1::2] = a[..., ::-1]
    return np.fft.fft(z)[..., :m]


def _dct3(a: np.ndarray) -> np.ndarray:
    m = a.shape[-1]
    z = _empty(a, 4 * m)
    z[..., :m] = a
    z[..., 3 * m + 1:] = a[..., m - 1:0:-1]
    return np.fft.fft(z)[..., 1:2 * m:2]


_EMBEDDINGS: Dict[TransformKind, Callable[[np.ndarray], np.ndarray]] = {
    TransformKind.DST1: _dst1,
    TransformKind.DCT1: _dct1,
    TransformKind.DST2: _dst2,
    TransformKind.DST3: _dst3,
    TransformKind.DCT2: _dct2,
    TransformKind.DCT3: _dct3,
}


def _check_length(a: np.ndarray, plan: TransformPlan, axis: int) -> None:
    if a.ndim == 0 or a.shape[axis] != plan.n_transform:
        length = a.shape[axis] if a.ndim else 0
        raise InvalidPlanError(
            f"Length {length} along axis {axis} does not match {plan.kind.value} plan size {plan.n_transform}"
        )


def forward(a: np.ndarray, plan: TransformPlan, axis: int = -1) -> np.ndarray:
    """Forward transform of every 1D slice along axis."""
    a = np.asarray(a)
    _check_length(a, plan, axis)
    moved = np.moveaxis(a, axis, -1)
    if plan.kind == TransformKind.FFT:
        out = np.fft.fft(moved)
    else:
        out = _EMBEDDINGS[plan.kind](moved)
    return np.moveaxis(out, -1, axis)


def inverse(c: np.ndarray, plan: TransformPlan, axis: int = -1) -> np.ndarray:
    """Inverse transform: the partner transform scaled by 1/N_FT."""
    c = np.asarray(c)
    _check_length(c, plan, axis)
    moved = np.moveaxis(c, axis, -1)
    if plan.kind == TransformKind.FFT:
        out = np.fft.ifft(moved)
    else:
        out = _EMBEDDINGS[_PARTNER[plan.kind]](moved) / plan.n_logical
    return np.moveaxis(out, -1, axis)


def fft_forward(a: np.ndarray, plan: TransformPlan, axis: int = -1) -> np.ndarray:
    _require(plan, TransformKind.FFT)
    return forward(a, plan, axis)


def fft_inverse(c: np.ndarray, plan: TransformPlan, axis: int = -1) -> np.ndarray:
    _require(plan, TransformKind.FFT)
    return inverse(c, plan, axis)


# Naive definitional sums, used as oracles

def naive_matrix(kind: KindLike, m: int) -> np.ndarray:
    """O(N^2) kernel K with a~ = K a for a transform of m points."""
    kind = TransformKind(kind)
    n = np.arange(m)[:, None]
    j = np.arange(m)[None, :]
    if kind == TransformKind.FFT:
        return np.exp(-2j * np.pi * n * j / m)
    if kind == TransformKind.DST1:
        return 2 * np.sin(np.pi * (n + 1) * (j + 1) / (m + 1))
    if kind == TransformKind.DCT1:
        weights = np.full(m, 2.0)
        weights[0] = weights[-1] = 1.0
        return weights * np.cos(np.pi * n * j / (m - 1))
    if kind == TransformKind.DST2:
        return 2 * np.sin(np.pi * (n + 1) * (2 * j + 1) / (2 * m))
    if kind == TransformKind.DST3:
        weights = np.full(m, 2.0)
        weights[-1] = 1.0
        return weights * np.sin(np.pi * (2 * n + 1) * (j + 1) / (2 * m))
    if kind == TransformKind.DCT2:
        return 2 * np.cos(np.pi * n * (2 * j + 1) / (2 * m))
    weights = np.full(m, 2.0)
    weights[0] = 1.0
    return weights * np.cos(np.pi * (2 * n + 1) * j / (2 * m))


def naive_forward(a: np.ndarray, plan: TransformPlan) -> np.ndarray:
    a = np.asarray(a)
    _check_length(a, plan, -1)
    return a @ naive_matrix(plan.kind, plan.n_transform).T


def naive_inverse(c: np.ndarray, plan: TransformPlan) -> np.ndarray:
    c = np.asarray(c)
    _check_length(c, plan, -1)
    if plan.kind == TransformKind.FFT:
        kernel = np.conj(naive_matrix(plan.kind, plan.n_transform))
    else:
        kernel = naive_matrix(_PARTNER[plan.kind], plan.n_transform)
    return c @ kernel.T / plan.n_logical


# Typed operations on SpectralCoefficients

def _require(plan: TransformPlan, *kinds: TransformKind) -> None:
    if plan.kind not in kinds:
        expected = "/".join(k.value for k in kinds)
        raise InvalidPlanError(f"Expected a {expected} plan, got {plan.kind.value}")


def dst1_forward(a: np.ndarray, plan: TransformPlan) -> SpectralCoefficients:
    """DST-I of interior points (boundaries excluded)."""
    _require(plan, TransformKind.DST1)
    return SpectralCoefficients(forward(a, plan), plan)


def dst1_inverse(c: SpectralCoefficients) -> np.ndarray:
    _require(c.plan, TransformKind.DST1)
    return inverse(c.values, c.plan, c.axis)


def dct1_forward(a: np.ndarray, plan: TransformPlan) -> SpectralCoefficients:
    """DCT-I of all points, both boundaries included."""
    _require(plan, TransformKind.DCT1)
    return SpectralCoefficients(forward(a, plan), plan)


def dct1_inverse(c: SpectralCoefficients) -> np.ndarray:
    _require(c.plan, TransformKind.DCT1)
    return inverse(c.values, c.plan, c.axis)


def dst23_forward(a: np.ndarray, plan: TransformPlan) -> SpectralCoefficients:
    _require(plan, TransformKind.DST2, TransformKind.DST3)
    return SpectralCoefficients(forward(a, plan), plan)


def dst23_inverse(c: SpectralCoefficients) -> np.ndarray:
    _require(c.plan, TransformKind.DST2, TransformKind.DST3)
    return inverse(c.values, c.plan, c.axis)


def dct23_forward(a: np.ndarray, plan: TransformPlan) -> SpectralCoefficients:
    _require(plan, TransformKind.DCT2, TransformKind.DCT3)
    return SpectralCoefficients(forward(a, plan), plan)


def dct23_inverse(c: SpectralCoefficients) -> np.ndarray:
    _require(c.plan, TransformKind.DCT2, TransformKind.DCT3)
    return inverse(c.values, c.plan, c.axis)


def apply_along_dimension(field: np.ndarray, dim: int, plan: TransformPlan, direction: str = "forward") -> np.ndarray:
    """
    Transform every 1D slice of field along spatial dimension dim.

    Args:
        field: Lattice field (any leading component/trajectory axes)
        dim: Array axis of the dimension to transform
        plan: Plan matching field.shape[dim]
        direction: "forward" or "inverse"

    Returns:
        Transformed array, other axes untouched
    """
    if direction == "forward":
        return forward(field, plan, axis=dim)
    if direction == "inverse":
        return inverse(field, plan, axis=dim)
    raise ValueError(f"Unsupported transform direction: {direction}")
