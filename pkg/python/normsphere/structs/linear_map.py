"""2x2 real matrices acting on plane vectors."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import SingularTransform
from .vector import Vector2, as_vector

DET_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LinearMap2x2:
    """A 2x2 matrix stored row-major.

    Example:
        shear = LinearMap2x2.from_string("2,1,0,1")
        shear.apply((1.0, 1.0))  # array([3., 1.])
    """

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            value = getattr(self, name)
            if not isinstance(value, int | float | np.floating | np.integer):
                raise TypeError(f"{name} must be numeric, got {type(value).__name__}")
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "LinearMap2x2":
        """Build from a 2x2 array."""
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (2, 2):
            raise ValueError(f"matrix must be 2x2, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def from_columns(cls, first: ArrayLike, second: ArrayLike) -> "LinearMap2x2":
        """Build the matrix whose columns are the given vectors."""
        return cls.from_matrix(np.column_stack([as_vector(first), as_vector(second)]))

    @classmethod
    def from_string(cls, text: str) -> "LinearMap2x2":
        """Parse ``a,b,c,d`` (row-major).

        :raises ValueError: If the text does not hold exactly four reals
        """
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"matrix needs 4 comma separated entries, got {text!r}")
        return cls(*(float(p) for p in parts))

    @classmethod
    def identity(cls) -> "LinearMap2x2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, angle: float) -> "LinearMap2x2":
        """Counterclockwise rotation by ``angle`` radians."""
        c, s = float(np.cos(angle)), float(np.sin(angle))
        return cls(c, -s, s, c)

    @property
    def matrix(self) -> NDArray[np.float64]:
        """The matrix as a fresh 2x2 array."""
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def entries(self) -> tuple[float, float, float, float]:
        return (self.a11, self.a12, self.a21, self.a22)

    def is_invertible(self, tol: float = DET_TOLERANCE) -> bool:
        return abs(self.det) > tol

    def apply(self, v: ArrayLike) -> Vector2:
        """Apply the map to a vector or a stack of vectors."""
        return as_vector(v) @ self.matrix.T

    def inverse(self) -> "LinearMap2x2":
        """Matrix inverse.

        :raises SingularTransform: If |det| <= 1e-12
        """
        d = self.det
        if abs(d) <= DET_TOLERANCE:
            raise SingularTransform(f"matrix {self.entries} has determinant {d!r}")
        return LinearMap2x2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def compose(self, other: "LinearMap2x2") -> "LinearMap2x2":
        """Return ``self @ other`` (apply ``other`` first)."""
        return LinearMap2x2.from_matrix(self.matrix @ other.matrix)

    def max_entry_difference(self, other: "LinearMap2x2") -> float:
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def to_string(self) -> str:
        """Row-major entries at 17 significant digits."""
        return ",".join(format(x, ".17g") for x in self.entries)
