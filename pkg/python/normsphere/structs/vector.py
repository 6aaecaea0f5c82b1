"""Helpers for plane vectors stored as numpy arrays of shape (..., 2)."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

Vector2 = NDArray[np.float64]
"""A plane vector, or a stack of them, with a trailing axis of length 2."""


def as_vector(v: ArrayLike, name: str = "v") -> Vector2:
    """Convert input to a float array with trailing axis 2.

    :param v: Vector or stack of vectors
    :type v: ArrayLike
    :param name: Name used in error messages
    :type name: str
    :raises ValueError: If the trailing axis is not 2 or a component is not finite
    :return: Float64 array
    :rtype: Vector2
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError(f"{name} needs a trailing axis of length 2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must have finite components")
    return arr


def det2(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Determinant of the 2x2 matrix with columns a and b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def rot90(v: ArrayLike) -> Vector2:
    """Rotate counterclockwise by a quarter turn."""
    v = np.asarray(v, dtype=np.float64)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def unit_directions(angles: ArrayLike) -> Vector2:
    """Euclidean unit vectors (cos t, sin t)."""
    t = np.asarray(angles, dtype=np.float64)
    return np.stack([np.cos(t), np.sin(t)], axis=-1)


def parse_vector_list(text: str) -> list[tuple[float, float]]:
    """Parse ``x1,y1;x2,y2;...`` into a list of coordinate pairs.

    :raises ValueError: If an item does not hold exactly two reals
    """
    pairs: list[tuple[float, float]] = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = [float(x) for x in item.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected two coordinates, got {item!r}")
        pairs.append((parts[0], parts[1]))
    return pairs
