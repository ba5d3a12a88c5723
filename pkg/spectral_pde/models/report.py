from dataclasses import dataclass, field
from typing import Dict, Optional

from ..config.settings import DEFAULT_ITERATIONS, DEFAULT_SEED, ERROR_NORMALIZATION, SUPPORTED_NORMALIZATIONS


@dataclass
class ErrorReport:
    problem: str
    method: str
    boundary: str
    dt: float
    dx: float
    error: float
    seconds: float
    diverged: bool = False

    def __post_init__(self):
        if self.diverged:
            self.error = float("inf")
        elif self.error < 0:
            raise ValueError(f"Comparison error cannot be negative: {self.error}")


@dataclass
class RunConfig:
    problem: str
    method: str = "fip"
    boundary: Optional[str] = None
    points: Optional[int] = None
    steps: Optional[int] = None
    iterations: int = DEFAULT_ITERATIONS
    ensemble: int = 1
    seed: int = DEFAULT_SEED
    observe_every: int = 1
    report_path: Optional[str] = None
    surface_path: Optional[str] = None
    normalization: str = ERROR_NORMALIZATION

    def __post_init__(self):
        for name in ("points", "steps"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive: {value}")
        if self.iterations < 1 or self.ensemble < 1 or self.observe_every < 1:
            raise ValueError(
                f"Counts must be positive: iterations={self.iterations}, "
                f"ensemble={self.ensemble}, observe_every={self.observe_every}"
            )
        if self.normalization not in SUPPORTED_NORMALIZATIONS:
            raise ValueError(f"Unsupported normalization: {self.normalization}")


@dataclass
class BenchRow:
    """
    One row of a reproduced table: a run configuration plus its published error.

    statistics holds the ensemble columns of stochastic rows (sampling_error, step_error, sigma_deviation).
    """
    table: int
    row: str
    config: RunConfig
    dt: float = 0.0
    published: Optional[float] = None
    report: Optional[ErrorReport] = field(default=None, compare=False)
    statistics: Dict[str, float] = field(default_factory=dict, compare=False)


@dataclass
class CheckResult:
    name: str
    passed: bool
    seconds: float = 0.0
    detail: str = ""
