from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import DEFAULT_ITERATIONS, DEFAULT_SEED
from .boundary import BoundarySpec
from .grid import Grid, TimeGrid
from .transform import TransformPlan


@dataclass
class LinearCoefficients:
    """D^(2) coefficients, values[c, i] multiplies the second derivative of component c along dimension i."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=complex))
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"Linear coefficients must be finite: {self.values}")

    @property
    def components(self) -> int:
        return self.values.shape[0]

    @property
    def dimensions(self) -> int:
        return self.values.shape[1]

    def of(self, component: int, dim: int = 0) -> complex:
        return complex(self.values[component, dim])


@dataclass
class Propagator:
    factors: List[np.ndarray]
    tau: float
    plans: List[Tuple[TransformPlan, ...]]


# g(u, t, x, du): x holds coordinate arrays broadcastable over space, du the first derivatives
# along each dimension (None unless the problem asks for them)
Drift = Callable[[np.ndarray, float, Sequence[np.ndarray], Optional[List[np.ndarray]]], np.ndarray]
# B(u, t, x) w
Noise = Callable[[np.ndarray, float, Sequence[np.ndarray], np.ndarray], np.ndarray]
Exact = Callable[[float, np.ndarray], np.ndarray]
Observable = Callable[[np.ndarray], np.ndarray]


def _identity(u: np.ndarray) -> np.ndarray:
    return u


@dataclass
class Problem:
    """
    Evolution equation du/dt = g(u, t, x, du) + sum_i D_i d^2u/dx_i^2 + B(u, t, x) w.

    Fields are arrays of shape (..., components, N_1, ..., N_d). drift and noise act
    on such arrays; initial(grid) returns (components, N_1, ..., N_d) and exact(t, x)
    returns (components, N) for a 1D coordinate array. With needs_gradient the drift
    receives the first derivatives of the field along every dimension.
    """
    name: str
    components: int
    coefficients: LinearCoefficients
    drift: Drift
    initial: Callable[[Grid], np.ndarray]
    boundary: BoundarySpec
    interval: List[Tuple[float, float]]
    time_window: Tuple[float, float]
    default_points: int
    default_steps: int
    noise: Optional[Noise] = None
    noise_components: int = 0
    exact: Optional[Exact] = None
    observable: Observable = _identity
    integrate_observable: bool = False
    exact_observable: Optional[Callable[[np.ndarray], np.ndarray]] = None
    # Ensemble expectation of the observable under the FIP midpoint recursion, (times, grid, dt)
    lattice_observable: Optional[Callable[[np.ndarray, Grid, float], np.ndarray]] = None
    normalization: Optional[float] = None
    needs_gradient: bool = False

    @property
    def dimensions(self) -> int:
        return len(self.interval)

    @property
    def stochastic(self) -> bool:
        return self.noise is not None and self.noise_components > 0


class Method(str, Enum):
    FIP = "fip"
    FSD = "fsd"
    FD = "fd"


@dataclass
class MethodConfig:
    method: Method
    time: TimeGrid
    iterations: int = DEFAULT_ITERATIONS
    ensemble_size: int = 1
    rng_seed: int = DEFAULT_SEED
    threads: int = 1

    def __post_init__(self):
        self.method = Method(self.method)
        if self.iterations < 1:
            raise ValueError(f"Midpoint iterations must be at least 1: {self.iterations}")
        if self.ensemble_size < 1:
            raise ValueError(f"Ensemble size must be at least 1: {self.ensemble_size}")


@dataclass
class NoiseSample:
    w: np.ndarray
    variance: float


@dataclass
class Trajectory:
    times: np.ndarray
    fields: np.ndarray
    observables: np.ndarray
    final: np.ndarray
    sampling_error: Optional[np.ndarray] = None
    wall_seconds: float = 0.0
    trajectories: int = 1
    diverged_step: Optional[int] = None

    @property
    def diverged(self) -> bool:
        return self.diverged_step is not None
