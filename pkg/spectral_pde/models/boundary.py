from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple


class BoundaryKind(str, Enum):
    PERIODIC = "P"
    DIRICHLET = "D"
    NEUMANN = "N"


BoundaryValue = Callable[[float], complex]


def _zero(t: float) -> complex:
    return 0.0


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary kind at one end plus its value (Dirichlet) or derivative (Neumann) as a function of t."""
    kind: BoundaryKind
    value: BoundaryValue = _zero

    def at(self, t: float) -> complex:
        if self.kind == BoundaryKind.PERIODIC:
            raise ValueError("Periodic boundaries carry no value")
        return self.value(t)


@dataclass
class BoundarySpec:
    """
    Boundary conditions indexed as conditions[component][dimension] = (end a, end b).
    """
    conditions: List[List[Tuple[BoundaryCondition, BoundaryCondition]]] = field(default_factory=list)

    def __post_init__(self):
        for c, dims in enumerate(self.conditions):
            for i, (end_a, end_b) in enumerate(dims):
                periodic = (end_a.kind == BoundaryKind.PERIODIC, end_b.kind == BoundaryKind.PERIODIC)
                if any(periodic) and not all(periodic):
                    raise ValueError(
                        f"Periodic boundary cannot be mixed with {end_a.kind.value}/{end_b.kind.value} "
                        f"(component {c}, dimension {i})"
                    )

    @property
    def components(self) -> int:
        return len(self.conditions)

    @property
    def dimensions(self) -> int:
        return len(self.conditions[0]) if self.conditions else 0

    def ends(self, component: int, dim: int) -> Tuple[BoundaryCondition, BoundaryCondition]:
        return self.conditions[component][dim]

    def pair_label(self, component: int, dim: int) -> str:
        end_a, end_b = self.ends(component, dim)
        return end_a.kind.value + end_b.kind.value

    def label(self) -> str:
        """Per-component labels joined by ';', dimensions joined by ','."""
        return ";".join(
            ",".join(self.pair_label(c, i) for i in range(self.dimensions))
            for c in range(self.components)
        )


@dataclass(frozen=True)
class Patch:
    """
    Low-order polynomial matching the boundary data of one dimension.

    value_a/value_b hold the Dirichlet value or Neumann derivative at each end,
    following kind_pair. epsilon is the N-N drift rate and t_ref its reference time.
    """
    kind_pair: str
    x_a: float
    x_b: float
    value_a: complex = 0.0
    value_b: complex = 0.0
    epsilon: complex = 0.0
    t_ref: float = 0.0

    @property
    def u_a(self) -> Optional[complex]:
        return self.value_a if self.kind_pair[0] == "D" else None

    @property
    def u_b(self) -> Optional[complex]:
        return self.value_b if self.kind_pair[1] == "D" else None

    @property
    def n_a(self) -> Optional[complex]:
        return self.value_a if self.kind_pair[0] == "N" else None

    @property
    def n_b(self) -> Optional[complex]:
        return self.value_b if self.kind_pair[1] == "N" else None
