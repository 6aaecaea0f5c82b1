"""Brute-force references for arc length, intrinsic distance and derivatives.

Nothing here goes through the quadrature tables or the derivative helpers of
the library: lengths are chord sums over uniform parameter grids refined at
the known corners, summed with :func:`math.fsum`, and every gauge call runs at
tolerance 1e-13.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import CoincidentPoints, NotOnHalfSphere, NotOnSphere
from .norms import Norm2D
from .parameterization import BasedSpace, NaturalCurve
from .structs.vector import Vector2, as_vector

logger = logging.getLogger(__name__)

ORACLE_GAUGE_TOLERANCE = 1e-13
POLYLINE_SPHERE_TOLERANCE = 1e-9
HALF_SPHERE_TOLERANCE = 1e-9
MIN_SUBDIVISIONS = 1000
ORACLE_STEP = 1e-5


def _oracle_norm(norm: Norm2D) -> Norm2D:
    if norm.gauge_tolerance <= ORACLE_GAUGE_TOLERANCE:
        return norm
    return norm.with_tolerance(ORACLE_GAUGE_TOLERANCE)


def _check_subdivisions(N: int) -> None:
    if N < MIN_SUBDIVISIONS:
        raise ValueError(f"N must be at least {MIN_SUBDIVISIONS}, got {N}")


def _polar_grid(space: BasedSpace, norm: Norm2D, t0: float, t1: float, N: int):
    """Uniform grid from t0 to t1 with the polar parameters of corners added."""
    t = np.linspace(t0, t1, N + 1)
    corners = np.asarray(norm.corner_points(), dtype=np.float64).reshape(-1, 2)
    if not corners.size:
        return t
    angles = space.angle_of(corners)
    angles = np.concatenate([angles - 2.0 * np.pi, angles, angles + 2.0 * np.pi])
    lo, hi = min(t0, t1), max(t0, t1)
    inside = angles[(angles > lo) & (angles < hi)]
    # a chord across a corner cuts it off at first order in the step
    t = np.unique(np.concatenate([t, inside]))
    return t if t0 <= t1 else t[::-1]


@dataclass(frozen=True, eq=False)
class Polyline:
    """Ordered sphere points joined by chords.

    Build with :meth:`on_sphere`, which checks the points.
    """

    points: Vector2
    closed: bool = False

    @classmethod
    def on_sphere(cls, norm: Norm2D, points: ArrayLike, closed: bool = False):
        """Check and wrap sphere points.

        :raises NotOnSphere: If a point is more than 1e-9 off the sphere
        :raises CoincidentPoints: If two consecutive points coincide
        """
        pts = as_vector(points, "points")
        defect = norm.sphere_defect(pts)
        if defect > POLYLINE_SPHERE_TOLERANCE:
            raise NotOnSphere(f"polyline point off the sphere by {defect!r}")
        steps = np.diff(pts, axis=0)
        if np.any(np.all(steps == 0.0, axis=-1)):
            raise CoincidentPoints("consecutive polyline points coincide")
        return cls(pts, closed)

    def length(self, norm: Norm2D) -> float:
        """Sum of chord lengths in ``norm``, left to right."""
        pts = self.points
        if self.closed:
            pts = np.concatenate([pts, pts[:1]])
        chords = np.asarray(norm.gauge(np.diff(pts, axis=0)))
        return math.fsum(chords.tolist())


def polyline_arclength_oracle(
    n: Norm2D, basis: BasedSpace, t0: float, t1: float, N: int = 1_000_000
) -> float:
    """Length of the polar chain through ``p(t0), ..., p(t1)`` on N uniform steps.

    Polar parameters of the known corners are added to the grid.

    :param n: Norm whose sphere is measured
    :type n: Norm2D
    :param basis: Basis defining the polar parameter
    :type basis: BasedSpace
    :param t0: First polar parameter
    :param t1: Last polar parameter
    :param N: Number of chords, at least 1000
    :raises ValueError: If N < 1000
    :return: The chord sum
    :rtype: float
    """
    _check_subdivisions(N)
    norm = _oracle_norm(n)
    t = _polar_grid(basis, norm, t0, t1, N)
    points = norm.scale_to_sphere(basis.direction(t))
    length = Polyline(points).length(norm)
    logger.debug("polyline length on [%s, %s] with N=%s: %.17g", t0, t1, N, length)
    return length


def _upper_angle(space: BasedSpace, x: Vector2, name: str) -> float:
    xy = space.coordinates(x)
    if xy[1] < -HALF_SPHERE_TOLERANCE:
        raise NotOnHalfSphere(f"{name} = {x.tolist()} is below the e1 axis")
    return float(np.arctan2(max(float(xy[1]), 0.0), xy[0]))


def intrinsic_distance_oracle(
    nc: NaturalCurve, x: ArrayLike, y: ArrayLike, N: int = 100_000
) -> float:
    """Chord sum along the upper half-sphere from ``x`` to ``y``.

    The chain is the monotone polar subdivision of N steps between the two
    points, so its length approaches ``|s_x - s_y|``.

    :raises NotOnHalfSphere: If a point lies below the ``e1`` axis
    :raises NotOnSphere: If a point is off the sphere
    :raises ValueError: If N < 1000
    """
    _check_subdivisions(N)
    space = nc.space
    norm = _oracle_norm(space.norm)
    x = as_vector(x, "x").reshape(2)
    y = as_vector(y, "y").reshape(2)
    for name, p in (("x", x), ("y", y)):
        if abs(float(norm.gauge(p)) - 1.0) > POLYLINE_SPHERE_TOLERANCE:
            raise NotOnSphere(f"{name} = {p.tolist()} is off the sphere")
    tx = _upper_angle(space, x, "x")
    ty = _upper_angle(space, y, "y")
    if tx == ty:
        return 0.0
    t = _polar_grid(space, norm, tx, ty, N)
    return Polyline(norm.scale_to_sphere(space.direction(t))).length(norm)


def richardson_derivative_oracle(
    curve: Callable[[float], ArrayLike], s: float, side: str
) -> Vector2:
    """One-sided derivative of ``curve`` at ``s``.

    ``D(h)`` is the difference quotient over ``[s, s + h]`` (right) or
    ``[s - h, s]`` (left) with ``h = 1e-5``; the result is ``2 D(h/2) - D(h)``.

    :param curve: Map from a parameter to a plane point
    :param s: Parameter
    :param side: ``"left"`` or ``"right"``
    :raises ValueError: If side is neither
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    sign = 1.0 if side == "right" else -1.0
    center = np.asarray(curve(s), dtype=np.float64)

    def quotient(h: float) -> Vector2:
        far = np.asarray(curve(s + sign * h), dtype=np.float64)
        return (far - center) / (sign * h)

    return 2.0 * quotient(0.5 * ORACLE_STEP) - quotient(ORACLE_STEP)
