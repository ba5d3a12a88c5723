from dataclasses import dataclass
from enum import Enum

import numpy as np


class TransformKind(str, Enum):
    FFT = "fft"
    DST1 = "dst1"
    DCT1 = "dct1"
    DST2 = "dst2"
    DST3 = "dst3"
    DCT2 = "dct2"
    DCT3 = "dct3"

    @property
    def is_mixed(self) -> bool:
        """True for the half-mode transforms used with mixed boundaries."""
        return self in (TransformKind.DST2, TransformKind.DST3, TransformKind.DCT2, TransformKind.DCT3)


@dataclass(frozen=True)
class TransformPlan:
    kind: TransformKind
    n_points: int
    n_transform: int
    n_logical: int


@dataclass
class SpectralCoefficients:
    values: np.ndarray
    plan: TransformPlan
    axis: int = -1

    def __post_init__(self):
        if self.values.shape[self.axis] != self.plan.n_transform:
            raise ValueError(
                f"Coefficient length {self.values.shape[self.axis]} does not match "
                f"plan size {self.plan.n_transform}"
            )
