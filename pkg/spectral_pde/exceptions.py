from typing import Optional


class InvalidPlanError(ValueError):
    """Raised when an array does not fit a transform plan."""


class ShapeMismatchError(ValueError):
    """Raised when field, grid or patch shapes disagree."""


class NoPatchError(ValueError):
    """Raised when a patch is requested for a periodic dimension."""


class UnknownProblemError(KeyError):
    """Raised for a problem or table id that is not in the catalog."""


class DivergenceError(RuntimeError):
    """
    Raised when the integrated field stops being finite.

    Args:
        step: Index of the step that produced the bad field (1-based)
        time: Time reached by that step
        partial: Trajectory recorded up to the last good observation
    """

    def __init__(self, step: int, time: float, partial: Optional[object] = None):
        super().__init__(f"Field diverged at step {step} (t = {time:.6g})")
        self.step = step
        self.time = time
        self.partial = partial
