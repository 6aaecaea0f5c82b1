"""Configuration of the corner probes."""

from dataclasses import dataclass
from enum import Enum
from itertools import pairwise

import numpy as np
from numpy.typing import ArrayLike

from ..errors import InvalidConfig
from .vector import Vector2, as_vector


class ProbeMode(Enum):
    """Corner criteria available to the smoothness probe."""

    NS = "ns"
    SD = "sd"


@dataclass(frozen=True)
class SmoothnessProbeConfig:
    """Margin ``delta`` and step schedule for the smoothness probe.

    :raises InvalidConfig: If delta or eps0 is not positive, the schedule is
        empty or not strictly decreasing, or a step is not below eps0
    """

    delta: float = 0.1
    eps0: float = 1e-2
    eps_schedule: tuple[float, ...] = (5e-3, 1e-3, 2e-4)

    def __post_init__(self):
        schedule = tuple(float(e) for e in self.eps_schedule)
        object.__setattr__(self, "eps_schedule", schedule)
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise InvalidConfig(f"delta must be positive, got {self.delta!r}")
        if not (np.isfinite(self.eps0) and self.eps0 > 0):
            raise InvalidConfig(f"eps0 must be positive, got {self.eps0!r}")
        if not self.eps_schedule:
            raise InvalidConfig("eps_schedule must not be empty")
        if any(e <= 0 or e >= self.eps0 for e in self.eps_schedule):
            raise InvalidConfig(
                f"every step must lie in (0, eps0={self.eps0!r}), "
                f"got {self.eps_schedule}"
            )
        if any(b >= a for a, b in pairwise(self.eps_schedule)):
            raise InvalidConfig(f"eps_schedule must decrease, got {self.eps_schedule}")


@dataclass(frozen=True, eq=False)
class ChordOptions:
    """The chord endpoints ``a`` and ``b`` required by the sd criterion."""

    a: Vector2
    b: Vector2

    @classmethod
    def of(cls, a: ArrayLike, b: ArrayLike) -> "ChordOptions":
        return cls(as_vector(a, "a"), as_vector(b, "b"))
