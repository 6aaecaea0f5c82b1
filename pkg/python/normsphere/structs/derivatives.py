"""Records for one-sided derivatives, jumps and measured slopes."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .vector import Vector2

FloatOrArray = float | NDArray[np.float64]

# measured jumps may overshoot zero by extrapolation noise
RADIAL_JUMP_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class DerivativePair:
    """Left and right derivatives at one or many parameters.

    ``avg`` is filled from ``minus`` and ``plus``.
    """

    minus: Vector2
    plus: Vector2
    avg: Vector2 = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "avg", 0.5 * (self.minus + self.plus))

    @property
    def difference(self) -> Vector2:
        """``plus - minus``."""
        return self.plus - self.minus


@dataclass(frozen=True)
class JumpData:
    """Radial and tangential jumps, the coordinates of (plus - minus)/2 in
    the basis (r(s), avg)."""

    jr: FloatOrArray
    jt: FloatOrArray

    def __post_init__(self):
        jr, jt = np.asarray(self.jr), np.asarray(self.jt)
        if not np.all(jr <= RADIAL_JUMP_SLACK):
            raise ValueError(f"radial jump must not be positive: {np.max(jr)!r}")
        if not np.all(np.abs(jt) < 1.0):
            raise ValueError(
                f"tangential jump must lie in (-1, 1): {np.max(np.abs(jt))!r}"
            )

    def one_sided(self, point: Vector2, avg: Vector2) -> tuple[Vector2, Vector2]:
        """Rebuild (minus, plus) from the point and the average derivative.

        :return: ``(-jr*r + (1-jt)*avg, jr*r + (1+jt)*avg)``
        """
        jr = np.asarray(self.jr)[..., None]
        jt = np.asarray(self.jt)[..., None]
        minus = -jr * point + (1.0 - jt) * avg
        plus = jr * point + (1.0 + jt) * avg
        return minus, plus

    def slope_split(self, y: float) -> float:
        """Right minus left slope, ``-2*jr*y/(1-jt**2)``."""
        return float(-2.0 * self.jr * y / (1.0 - self.jt**2))


@dataclass(frozen=True)
class SlopeMeasurement:
    """One-sided difference quotients of a distance function at one step."""

    left_slope: float
    right_slope: float
    base_distance: float
    eps_used: float

    def __post_init__(self):
        if not self.base_distance > 0:
            raise ValueError(f"base_distance must be positive: {self.base_distance}")


@dataclass(frozen=True)
class RecoveredDerivatives:
    """Coordinates of r'(s) = x e1 + y e2 and r'(sbar) = xbar e1 + ybar e2."""

    x: float
    y: float
    xbar: float
    ybar: float

    @property
    def signs_ok(self) -> bool:
        return self.y > 0 > self.ybar

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.xbar, self.ybar)


@dataclass(frozen=True)
class LemmaAReport:
    """Measured against predicted one-sided slopes of the chord length
    nu(e) = ||r(b+e) - r(a)||."""

    a: float
    b: float
    s: float
    x: float
    y: float
    jumps: JumpData
    predicted_left: float
    predicted_right: float
    measurements: tuple[SlopeMeasurement, ...]
    extrapolated: SlopeMeasurement

    @staticmethod
    def relative_error(measured: float, predicted: float) -> float:
        # slopes are O(1); below unit scale the error is absolute
        return abs(measured - predicted) / max(abs(predicted), 1.0)

    @property
    def left_error(self) -> float:
        return self.relative_error(self.extrapolated.left_slope, self.predicted_left)

    @property
    def right_error(self) -> float:
        return self.relative_error(self.extrapolated.right_slope, self.predicted_right)

    @property
    def measured_split(self) -> float:
        """Left minus right extrapolated slope."""
        return self.extrapolated.left_slope - self.extrapolated.right_slope

    def passed(self, tol: float = 1e-2) -> bool:
        return self.y > 0 and self.left_error <= tol and self.right_error <= tol
