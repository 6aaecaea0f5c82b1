"""Norms of the plane as gauges of centrally symmetric convex bodies.

A :class:`Norm2D` is built from a :class:`~normsphere.structs.norm_spec.NormSpec`
with :func:`build_from_spec`. Every query is vectorized over arrays of shape
``(..., 2)`` and the object is immutable, so it can be shared across threads.

Example:
    lens = build_from_spec(NormSpec.lens(0.0))
    lens.gauge((0.0, 1.0))  # 2.0
    lens.scale_to_sphere((-1.0, 1.0))  # (1 - sqrt 2) * (1, -1)
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq

from .errors import InvalidSpec, NotOnSphere, SingularTransform, ZeroVector
from .structs.linear_map import DET_TOLERANCE
from .structs.norm_spec import NormSpec, SpecKind
from .structs.vector import Vector2, as_vector, det2, rot90, unit_directions
from .utils.numerics import bisect_monotone, illinois_roots

logger = logging.getLogger(__name__)

DEFAULT_GAUGE_TOLERANCE = 1e-12
MEMBERSHIP_BAND = 1e-9
CORNER_ATOL = 1e-9
SPHERE_TOLERANCE = 1e-8
GAUGE_MAX_ITER = 80
LENS_BETA_BOUND = 1.0 / 3.0
# l1 radius of a ball contained in every lens body with |beta| < 1/3
LENS_L1_INRADIUS = 1.0 / 3.0
SYMMETRY_TOLERANCE = 1e-12

FloatArray = NDArray[np.float64]


class Membership(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class _Body:
    """Gauge, boundary tangents and corners of one body kind."""

    strictly_convex = True
    smooth = True

    def gauge(self, v: FloatArray, tol: float) -> FloatArray:
        raise NotImplementedError

    def tangents(self, x: FloatArray, atol: float) -> tuple[FloatArray, FloatArray]:
        """Arriving and leaving counterclockwise tangents at sphere points.

        Points within ``atol`` of a corner get the two distinct tangents of
        the corner; elsewhere both tangents are equal.
        """
        raise NotImplementedError

    def corners(self) -> FloatArray:
        return np.zeros((0, 2))


class _PNormBody(_Body):
    def __init__(self, p: float):
        self.p = p

    def gauge(self, v, tol):
        return np.linalg.norm(v, ord=self.p, axis=-1)

    def tangents(self, x, atol):
        g = np.sign(x) * np.abs(x) ** (self.p - 1.0)
        t = rot90(g)
        return t, t


class _PolygonBody(_Body):
    strictly_convex = False
    smooth = False

    def __init__(self, vertices: FloatArray):
        self.vertices = vertices
        rows = np.stack([vertices, np.roll(vertices, -1, axis=0)], axis=1)
        # edge k carries the functional n_k with n_k . v_k = n_k . v_{k+1} = 1
        self.normals = np.linalg.solve(rows, np.ones((len(vertices), 2, 1)))[..., 0]

    def gauge(self, v, tol):
        return np.maximum(np.max(v @ self.normals.T, axis=-1), 0.0)

    def tangents(self, x, atol):
        v = self.vertices
        k = len(v)
        dist = np.linalg.norm(x[..., None, :] - v, axis=-1)
        nearest = np.argmin(dist, axis=-1)
        at_vertex = (np.min(dist, axis=-1) < atol)[..., None]
        edge = np.argmax(x @ self.normals.T, axis=-1)
        along = v[(edge + 1) % k] - v[edge]
        arriving = v[nearest] - v[(nearest - 1) % k]
        leaving = v[(nearest + 1) % k] - v[nearest]
        return np.where(at_vertex, arriving, along), np.where(at_vertex, leaving, along)

    def corners(self):
        return self.vertices.copy()


class _LensBody(_Body):
    """Body between y = f(x) and y = -f(-x), f(x) = (1 - x^2)(1 + beta x)/2."""

    smooth = False

    def __init__(self, beta: float):
        self.beta = beta

    def upper(self, x):
        return 0.5 * (1.0 - x * x) * (1.0 + self.beta * x)

    def upper_slope(self, x):
        return -x * (1.0 + self.beta * x) + 0.5 * self.beta * (1.0 - x * x)

    def contains(self, w):
        x, y = w[..., 0], w[..., 1]
        return (np.abs(x) <= 1.0) & (y <= self.upper(x)) & (y >= -self.upper(-x))

    def gauge(self, v, tol):
        return _ray_gauge(self.contains, v, tol)

    def tangents(self, x, atol):
        px, py = x[..., 0], x[..., 1]
        upper = np.stack([-np.ones_like(px), -self.upper_slope(px)], axis=-1)
        lower = np.stack([np.ones_like(px), self.upper_slope(-px)], axis=-1)
        smooth = np.where((py >= 0.0)[..., None], upper, lower)
        b = self.beta
        right = np.linalg.norm(x - np.array([1.0, 0.0]), axis=-1) < atol
        left = np.linalg.norm(x + np.array([1.0, 0.0]), axis=-1) < atol
        arriving = np.where(right[..., None], [1.0, 1.0 - b], smooth)
        arriving = np.where(left[..., None], [-1.0, -(1.0 - b)], arriving)
        leaving = np.where(right[..., None], [-1.0, 1.0 + b], smooth)
        leaving = np.where(left[..., None], [1.0, -(1.0 + b)], leaving)
        return arriving, leaving

    def corners(self):
        return np.array([[1.0, 0.0], [-1.0, 0.0]])


class _DoubleLensBody(_Body):
    """Intersection of lens(0) with its quarter-turn rotation."""

    smooth = False

    def __init__(self):
        self.lens = _LensBody(0.0)
        a = np.sqrt(2.0) - 1.0
        signs = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
        self._corners = a * signs

    @staticmethod
    def _unrotate(w):
        return np.stack([w[..., 1], -w[..., 0]], axis=-1)

    def contains(self, w):
        return self.lens.contains(w) & self.lens.contains(self._unrotate(w))

    def gauge(self, v, tol):
        return _ray_gauge(self.contains, v, tol)

    def _piece_tangents(self, x):
        flat, _ = self.lens.tangents(x, 0.0)
        turned, _ = self.lens.tangents(self._unrotate(x), 0.0)
        return flat, rot90(turned)

    def tangents(self, x, atol):
        dist = np.linalg.norm(x[..., None, :] - self._corners, axis=-1)
        at_corner = (np.min(dist, axis=-1) < atol)[..., None]
        flat, turned = self._piece_tangents(x)
        # the rotated piece bounds the body in the sectors around the x axis
        near_x_axis = np.abs(x[..., 0]) > np.abs(x[..., 1])
        smooth = np.where(near_x_axis[..., None], turned, flat)
        c = self._corners[np.argmin(dist, axis=-1)]
        c_flat, c_turned = self._piece_tangents(c)
        ccw = (det2(c_turned, c_flat) > 0.0)[..., None]
        arriving = np.where(ccw, c_turned, c_flat)
        leaving = np.where(ccw, c_flat, c_turned)
        return (
            np.where(at_corner, arriving, smooth),
            np.where(at_corner, leaving, smooth),
        )

    def corners(self):
        return self._corners.copy()


class _TransformBody(_Body):
    """Image A(B) of a base body; its gauge is v -> gauge_B(A^-1 v)."""

    def __init__(self, base: _Body, matrix: FloatArray):
        self.base = base
        self.matrix = matrix
        self.inverse = np.linalg.inv(matrix)
        self.flips = np.linalg.det(matrix) < 0
        self.strictly_convex = base.strictly_convex
        self.smooth = base.smooth

    def gauge(self, v, tol):
        return self.base.gauge(v @ self.inverse.T, tol)

    def tangents(self, x, atol):
        arriving, leaving = self.base.tangents(x @ self.inverse.T, atol)
        arriving, leaving = arriving @ self.matrix.T, leaving @ self.matrix.T
        if self.flips:
            return -leaving, -arriving
        return arriving, leaving

    def corners(self):
        return self.base.corners() @ self.matrix.T


def _ray_gauge(contains, v: FloatArray, tol: float) -> FloatArray:
    """Gauge by bisection on the scale lambda of the ray test v/lambda in B."""
    l1 = np.sum(np.abs(v), axis=-1)
    zero = l1 == 0.0
    hi = np.where(zero, 1.0, 2.0 * l1 / LENS_L1_INRADIUS)
    vv = np.where(zero[..., None], 1.0, v)

    def inside(lam):
        return contains(vv / lam[..., None])

    result = bisect_monotone(inside, np.zeros_like(hi), hi, tol, GAUGE_MAX_ITER)
    return np.where(zero, 0.0, result)


@dataclass(frozen=True)
class ChordMate:
    """Second intersection of a line through a sphere point with the sphere.

    ``offset`` is the signed distance along the normalized direction, so
    ``point = x + offset * direction / ||direction||``. A supporting line has
    no second intersection: ``point`` is then ``x`` and ``degenerate`` is set.
    """

    point: tuple[float, float]
    degenerate: bool
    offset: float

    @property
    def vector(self) -> Vector2:
        return np.array(self.point)


@dataclass(frozen=True)
class AxiomReport:
    """Largest violation of each norm axiom on a sampled grid."""

    grid_size: int
    homogeneity: float
    symmetry: float
    triangle: float
    convexity: float

    def violations(self) -> dict[str, float]:
        return {
            "homogeneity": self.homogeneity,
            "symmetry": self.symmetry,
            "triangle": self.triangle,
            "convexity": self.convexity,
        }

    def passed(self, tol: float = 1e-8) -> bool:
        return all(v <= tol for v in self.violations().values())


@dataclass(frozen=True)
class Norm2D:
    """A norm of the plane given as the gauge of a convex body.

    Build instances with :func:`build_from_spec`.
    """

    spec: NormSpec
    gauge_tolerance: float = DEFAULT_GAUGE_TOLERANCE
    strictly_convex: bool = field(default=True, compare=False)
    smooth: bool = field(default=True, compare=False)
    _body: _Body = field(default_factory=_Body, repr=False, compare=False)

    def gauge(self, v: ArrayLike) -> FloatArray | float:
        """Minkowski functional of the body.

        :param v: Vector or stack of vectors
        :type v: ArrayLike
        :return: A float for a single vector, an array for a stack
        """
        arr = as_vector(v)
        out = np.asarray(self._body.gauge(arr, self.gauge_tolerance), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def membership(self, v: ArrayLike) -> Membership:
        """Classify a vector against the unit sphere with band 1e-9."""
        g = float(self.gauge(as_vector(v).reshape(2)))
        if g < 1.0 - MEMBERSHIP_BAND:
            return Membership.INTERIOR
        if g > 1.0 + MEMBERSHIP_BAND:
            return Membership.EXTERIOR
        return Membership.BOUNDARY

    def scale_to_sphere(self, v: ArrayLike) -> Vector2:
        """Return ``v / gauge(v)``.

        :raises ZeroVector: If any input vector is zero
        """
        arr = as_vector(v)
        g = np.asarray(self._body.gauge(arr, self.gauge_tolerance))
        if np.any(g == 0.0):
            raise ZeroVector("cannot scale the zero vector onto the sphere")
        return arr / g[..., None]

    def tangents(
        self, x: ArrayLike, corner_atol: float = CORNER_ATOL
    ) -> tuple[Vector2, Vector2]:
        """Counterclockwise one-sided tangent directions at sphere points.

        The vectors are not normalized. At a corner (within ``corner_atol``)
        the first is the arriving and the second the leaving direction.
        """
        return self._body.tangents(as_vector(x), corner_atol)

    def corner_points(self) -> Vector2:
        """Non-smooth points of the sphere that the body kind knows of."""
        return self._body.corners()

    def sphere_defect(self, x: ArrayLike) -> float:
        """Largest |gauge(x) - 1| over the given points."""
        return float(np.max(np.abs(np.asarray(self.gauge(x)) - 1.0)))

    def chord_mate(self, x: ArrayLike, direction: ArrayLike) -> ChordMate:
        """Second intersection of the line ``x + R direction`` with the sphere.

        The sign change of ``gauge(x + l d) - 1`` is bracketed on a geometric
        grid of offsets ``+-4 * 2**-k`` and refined with Brent's method to 1e-12.

        :raises NotOnSphere: If ``|gauge(x) - 1| > 1e-8``
        :raises ZeroVector: If ``direction`` is zero
        """
        x = as_vector(x, "x").reshape(2)
        if abs(float(self.gauge(x)) - 1.0) > SPHERE_TOLERANCE:
            raise NotOnSphere(f"point {x.tolist()} has gauge {self.gauge(x)!r}")
        d = self.scale_to_sphere(as_vector(direction, "direction").reshape(2))
        steps = 4.0 * 2.0 ** -np.arange(61)
        offsets = np.concatenate([steps, -steps])
        phi = np.asarray(self.gauge(x + offsets[:, None] * d)) - 1.0
        threshold = -max(10.0 * self.gauge_tolerance, 1e-14)
        inside = np.flatnonzero(phi < threshold)
        if inside.size == 0:
            return ChordMate((float(x[0]), float(x[1])), True, 0.0)
        lam_in = offsets[inside[np.argmax(np.abs(offsets[inside]))]]
        lam_out = 2.0 * lam_in

        def excess(lam: float) -> float:
            return float(self.gauge(x + lam * d)) - 1.0

        if excess(lam_out) > 0.0:
            lam = brentq(excess, lam_in, lam_out, xtol=1e-12)
        else:
            lam = lam_out
        mate = x + lam * d
        return ChordMate((float(mate[0]), float(mate[1])), False, float(lam))

    def chord_mates(
        self, x: ArrayLike, direction: ArrayLike
    ) -> tuple[Vector2, NDArray[np.bool_]]:
        """Vectorized :meth:`chord_mate` over a stack of sphere points.

        The offset is refined by the Illinois variant of regula falsi instead
        of Brent's method, to the same 1e-12 step.

        :param x: Sphere points, shape ``(k, 2)``
        :param direction: One direction or one per point
        :raises NotOnSphere: If any ``|gauge(x) - 1| > 1e-8``
        :raises ZeroVector: If a direction is zero
        :return: Mates of shape ``(k, 2)`` and the degenerate mask
        """
        x = as_vector(x, "x").reshape(-1, 2)
        if x.shape[0] and self.sphere_defect(x) > SPHERE_TOLERANCE:
            raise NotOnSphere(f"points off the sphere by {self.sphere_defect(x)!r}")
        d = self.scale_to_sphere(as_vector(direction, "direction"))
        d = np.broadcast_to(d, x.shape)
        steps = 4.0 * 2.0 ** -np.arange(61)
        offsets = np.concatenate([steps, -steps])
        line = x[:, None, :] + offsets[None, :, None] * d[:, None, :]
        phi = np.asarray(self._body.gauge(line, self.gauge_tolerance)) - 1.0
        threshold = -max(10.0 * self.gauge_tolerance, 1e-14)
        inside = phi < threshold
        degenerate = ~np.any(inside, axis=1)
        # largest inside offset of each row
        reach = np.where(inside, np.abs(offsets)[None, :], -1.0)
        lam_in = offsets[np.argmax(reach, axis=1)]
        lam_in = np.where(degenerate, 0.0, lam_in)

        def excess(lam, index):
            moved = x[index] + lam[:, None] * d[index]
            return np.asarray(self._body.gauge(moved, self.gauge_tolerance)) - 1.0

        lam = 2.0 * lam_in
        rows = np.arange(len(x))
        crossing = np.flatnonzero(~degenerate & (excess(lam, rows) > 0.0))
        if crossing.size:
            lam_at = lam_in[crossing]
            ends = np.stack([lam_at, 2.0 * lam_at])
            lo, hi = ends.min(axis=0), ends.max(axis=0)
            f_lo = excess(lo, crossing)
            f_hi = excess(hi, crossing)
            lam[crossing] = illinois_roots(
                lambda t, index: excess(t, crossing[index]), lo, hi, f_lo, f_hi, 1e-12
            )
        mates = x + lam[:, None] * d
        return np.where(degenerate[:, None], x, mates), degenerate

    def with_tolerance(self, gauge_tolerance: float) -> "Norm2D":
        """The same norm with another gauge tolerance."""
        return build_from_spec(self.spec, gauge_tolerance=gauge_tolerance)

    def validate_axioms(self, grid_size: int = 256) -> AxiomReport:
        """Sample the norm axioms on a direction grid.

        Homogeneity uses scalars -2, -0.5 and 3; the triangle inequality runs
        over boundary pairs at several index offsets; convexity checks the
        midpoints of adjacent boundary samples.

        :param grid_size: Number of directions, at least 8
        :type grid_size: int
        :raises ValueError: If grid_size < 8
        """
        if grid_size < 8:
            raise ValueError(f"grid_size must be at least 8, got {grid_size}")
        v = unit_directions(2.0 * np.pi * np.arange(grid_size) / grid_size)
        g = np.asarray(self.gauge(v))
        homogeneity = 0.0
        for lam in (-2.0, -0.5, 3.0):
            scaled = np.asarray(self.gauge(lam * v))
            error = np.abs(scaled - abs(lam) * g) / (abs(lam) * g)
            homogeneity = max(homogeneity, float(np.max(error)))
        symmetry = float(np.max(np.abs(np.asarray(self.gauge(-v)) - g) / g))
        b = v / g[:, None]
        triangle = 0.0
        shifts = {1, 2, 5, grid_size // 8, grid_size // 4, grid_size // 2 - 1}
        for shift in sorted(shifts):
            other = np.roll(b, -shift, axis=0)
            excess = np.asarray(self.gauge(b + other)) - 2.0
            triangle = max(triangle, float(np.max(excess)))
        mid = 0.5 * (b + np.roll(b, -1, axis=0))
        convexity = float(np.max(np.asarray(self.gauge(mid)) - 1.0))
        report = AxiomReport(
            grid_size, homogeneity, symmetry, max(triangle, 0.0), max(convexity, 0.0)
        )
        logger.debug("axioms of %s: %s", self.spec.describe(), report)
        return report


def _build_body(spec: NormSpec, validate: bool) -> _Body:
    match spec.kind:
        case SpecKind.PNORM:
            p = spec.p
            if p is None or not np.isfinite(p) or p < 1.0:
                raise InvalidSpec(f"p must be a finite real >= 1, got {p!r}", "pnorm.p")
            if p == 1.0:
                square = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
                return _PolygonBody(square)
            return _PNormBody(p)
        case SpecKind.POLYGON:
            vertices = np.array(spec.vertices, dtype=np.float64).reshape(-1, 2)
            if validate:
                _check_polygon(vertices)
            return _PolygonBody(vertices)
        case SpecKind.LENS:
            beta = spec.beta
            if beta is None or not np.isfinite(beta) or abs(beta) >= LENS_BETA_BOUND:
                raise InvalidSpec(f"lens needs |beta| < 1/3, got {beta!r}", "lens.beta")
            return _LensBody(beta)
        case SpecKind.DOUBLE_LENS:
            return _DoubleLensBody()
        case SpecKind.TRANSFORM:
            if spec.base is None or spec.matrix is None:
                raise InvalidSpec("transform needs a base and a matrix", "transform")
            if not spec.matrix.is_invertible(DET_TOLERANCE):
                raise SingularTransform(
                    f"transform matrix {spec.matrix.entries} has |det| <= 1e-12"
                )
            return _TransformBody(_build_body(spec.base, validate), spec.matrix.matrix)
    raise InvalidSpec(f"unknown kind {spec.kind!r}", "kind")


def _check_polygon(v: FloatArray) -> None:
    if len(v) < 4 or len(v) % 2:
        raise InvalidSpec(
            f"a centrally symmetric polygon needs an even number >= 4 of vertices, "
            f"got {len(v)}",
            "polygon.symmetric",
        )
    if not np.all(np.isfinite(v)):
        raise InvalidSpec("polygon vertices must be finite", "polygon.finite")
    following = np.roll(v, -1, axis=0)
    if np.any(det2(v, following) <= 0.0):
        raise InvalidSpec(
            "vertices must wind counterclockwise around the origin",
            "polygon.origin_interior",
        )
    edges = following - v
    if np.any(det2(edges, np.roll(edges, -1, axis=0)) <= 0.0):
        raise InvalidSpec("polygon must turn left at each vertex", "polygon.convex")
    # every -v must also be a vertex
    gap = np.min(np.linalg.norm(v[:, None, :] + v[None, :, :], axis=-1), axis=1)
    if np.max(gap) > SYMMETRY_TOLERANCE:
        raise InvalidSpec("vertex set is not centrally symmetric", "polygon.symmetric")


def build_from_spec(
    spec: NormSpec,
    gauge_tolerance: float = DEFAULT_GAUGE_TOLERANCE,
    validate: bool = True,
) -> Norm2D:
    """Build the norm described by a spec.

    ``validate=False`` skips the polygon shape checks so that deliberately
    broken bodies can be fed to :meth:`Norm2D.validate_axioms`.

    :param spec: Body description
    :type spec: NormSpec
    :param gauge_tolerance: Relative tolerance of bisection gauges
    :type gauge_tolerance: float
    :param validate: Enforce the polygon invariants
    :type validate: bool
    :raises InvalidSpec: If an invariant of the spec is violated
    :raises SingularTransform: If a transform matrix is not invertible
    :return: The norm
    :rtype: Norm2D
    """
    if not (gauge_tolerance > 0):
        raise InvalidSpec(
            f"gauge_tolerance must be positive, got {gauge_tolerance!r}", "tolerance"
        )
    body = _build_body(spec, validate)
    norm = Norm2D(
        spec,
        gauge_tolerance,
        strictly_convex=body.strictly_convex,
        smooth=body.smooth,
        _body=body,
    )
    logger.debug(
        "built %s strictly_convex=%s smooth=%s",
        spec.describe(),
        norm.strictly_convex,
        norm.smooth,
    )
    return norm
