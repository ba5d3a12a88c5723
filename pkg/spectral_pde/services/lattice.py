import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.boundary import BoundarySpec
from ..models.grid import Axis, Grid
from ..models.transform import TransformKind
from .trig_transforms import KindLike, kind_for_boundaries

logger = logging.getLogger(__name__)


def build_wavenumbers(kind: KindLike, n_points: int, dx: float, length: Optional[float] = None) -> np.ndarray:
    """
    Wavenumbers in the coefficient order of the transform.

    Args:
        kind: Transform kind of the dimension
        n_points: Physical grid points N
        dx: Grid step
        length: Interval length, (N - 1) * dx when omitted

    Returns:
        DST1: k_n = n dk for n = 1..N-2, DCT1: n dk for n = 0..N-1, with dk = pi/((N-1) dx);
        mixed kinds: (n - 1/2) pi / L for n = 1..N-1; FFT: standard wrapped order
    """
    kind = TransformKind(kind)
    if n_points < 4:
        raise ValueError(f"Need at least 4 grid points, got {n_points}")
    if length is None:
        length = (n_points - 1) * dx
    dk = np.pi / ((n_points - 1) * dx)
    if kind == TransformKind.DST1:
        return dk * np.arange(1, n_points - 1)
    if kind == TransformKind.DCT1:
        return dk * np.arange(n_points)
    if kind.is_mixed:
        return (np.arange(n_points - 1) + 0.5) * np.pi / length
    if kind == TransformKind.FFT:
        return 2 * np.pi * np.fft.fftfreq(n_points, d=dx)
    raise ValueError(f"Unsupported transform kind: {kind}")


def fft_index(k: np.ndarray, n_points: int, dx: float) -> np.ndarray:
    """Inverse of the FFT wavenumber ordering: mode index of each wavenumber."""
    return np.rint(np.asarray(k) * n_points * dx / (2 * np.pi)).astype(int) % n_points


def build_grid(
    intervals: Sequence[Tuple[float, float]],
    points: Union[int, Sequence[int]],
    boundary: BoundarySpec,
) -> Grid:
    """
    Build the lattice of a problem.

    Args:
        intervals: (x_a, x_b) per dimension
        points: Point count N, shared or per dimension
        boundary: Boundary conditions fixing the transform of each component and dimension

    Returns:
        Grid with kinds and wavenumbers filled in
    """
    if isinstance(points, (int, np.integer)):
        points = [int(points)] * len(intervals)
    if len(points) != len(intervals):
        raise ValueError(f"Got {len(points)} point counts for {len(intervals)} dimensions")
    if boundary.dimensions != len(intervals):
        raise ValueError(f"Boundary spec has {boundary.dimensions} dimensions, grid has {len(intervals)}")

    axes = [Axis(float(x_a), float(x_b), int(n)) for (x_a, x_b), n in zip(intervals, points)]
    kinds: List[List[TransformKind]] = []
    wavenumbers: List[List[np.ndarray]] = []
    for c in range(boundary.components):
        component_kinds = []
        component_ks = []
        for i, axis in enumerate(axes):
            end_a, end_b = boundary.ends(c, i)
            kind = kind_for_boundaries(end_a.kind, end_b.kind)
            component_kinds.append(kind)
            component_ks.append(build_wavenumbers(kind, axis.points, axis.spacing, axis.length))
        kinds.append(component_kinds)
        wavenumbers.append(component_ks)

    grid = Grid(axes=axes, kinds=kinds, wavenumbers=wavenumbers)
    logger.debug(f"Built grid {grid.field_shape} with kinds {[[k.value for k in ks] for ks in kinds]}")
    return grid


def half_shifted_points(n: int, length: float) -> np.ndarray:
    """Cell-centred lattice x_m = (m - 1/2) L / n for m = 1..n."""
    return (np.arange(1, n + 1) - 0.5) * length / n
