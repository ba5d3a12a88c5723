from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .transform import TransformKind


@dataclass(frozen=True)
class Axis:
    x_a: float
    x_b: float
    points: int

    @property
    def length(self) -> float:
        return self.x_b - self.x_a

    @property
    def spacing(self) -> float:
        """Grid step (x_b - x_a)/(N - 1)."""
        return (self.x_b - self.x_a) / (self.points - 1)

    def coordinates(self) -> np.ndarray:
        return self.x_a + self.spacing * np.arange(self.points)


@dataclass
class Grid:
    """
    Uniform spatial lattice with the transform kind and wavenumbers
    of every (component, dimension) pair.

    kinds[c][i] and wavenumbers[c][i] refer to component c along dimension i.
    """
    axes: List[Axis]
    kinds: List[List[TransformKind]] = field(default_factory=list)
    wavenumbers: List[List[np.ndarray]] = field(default_factory=list)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def components(self) -> int:
        return len(self.kinds)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(axis.points for axis in self.axes)

    @property
    def field_shape(self) -> Tuple[int, ...]:
        return (self.components,) + self.shape

    @property
    def spacings(self) -> Tuple[float, ...]:
        return tuple(axis.spacing for axis in self.axes)

    @property
    def volume_element(self) -> float:
        return float(np.prod(self.spacings))

    def coordinates(self, dim: int = 0) -> np.ndarray:
        return self.axes[dim].coordinates()

    def mesh(self) -> List[np.ndarray]:
        """Coordinate arrays broadcastable against the spatial shape."""
        return np.meshgrid(*[axis.coordinates() for axis in self.axes], indexing="ij", sparse=True)


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    steps: int
    observe_every: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"Step count must be positive: {self.steps}")
        if not self.t_end > self.t_start:
            raise ValueError(f"Empty time window: [{self.t_start}, {self.t_end}]")
        if self.observe_every < 1 or self.steps % self.observe_every:
            raise ValueError(f"observe_every={self.observe_every} must divide steps={self.steps}")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    @property
    def times(self) -> np.ndarray:
        """All step times t_0 ... t_J."""
        return self.t_start + self.dt * np.arange(self.steps + 1)

    @property
    def observation_times(self) -> np.ndarray:
        return self.times[::self.observe_every]
