"""Polar and natural (arc-length) parameterizations of the unit sphere.

Given a norm and a counterclockwise basis ``(e1, e2)`` with ``||e1|| = 1``
the polar curve is ``p(t) = e(t) / ||e(t)||`` with
``e(t) = cos t e1 + sin t e2``. Its arc length ``s(t)`` is measured in the
norm itself, ``L = s(pi)`` is the half-length of the sphere and the natural
curve is ``r = p o t`` where ``t`` inverts ``s``.

Example:
    space = BasedSpace.create(build_from_spec(NormSpec.lens(0.0)))
    curve = NaturalCurve(space)
    curve.half_length()
    curve.natural_derivatives(0.0).plus  # (sqrt 2 - 1) * (-1, 1)
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize_scalar

from .errors import InvalidBasis
from .norms import CORNER_ATOL, Norm2D
from .structs.derivatives import DerivativePair
from .structs.vector import Vector2, as_vector, det2
from .utils.numerics import adaptive_simpson, richardson_one_sided

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
EXTREMA_GRID = 4096
EXTREMA_TOLERANCE = 1e-10
BASIS_TOLERANCE = 1e-9
DEFAULT_CELLS = 8192
QUADRATURE_TOLERANCE = 1e-10
# uniform nodes closer than this to a kink are replaced by the kink
KINK_NODE_GAP = 1e-7
INVERSION_STEPS = 60
RICHARDSON_STEP = 1e-5

FloatArray = NDArray[np.float64]


def _extremum(values, sign: float) -> float:
    grid = np.arange(EXTREMA_GRID) * (TWO_PI / EXTREMA_GRID)
    sampled = sign * values(grid)
    k = int(np.argmin(sampled))
    h = TWO_PI / EXTREMA_GRID
    best = float(sampled[k])
    try:
        res = minimize_scalar(
            lambda t: sign * float(values(np.array([t]))[0]),
            bracket=(grid[k] - h, grid[k], grid[k] + h),
            method="golden",
            options={"xtol": EXTREMA_TOLERANCE},
        )
        best = min(best, float(res.fun))
    except ValueError:
        # flat stretches (polygon edges) leave no strict bracket
        pass
    return sign * best


@dataclass(frozen=True, eq=False)
class BasedSpace:
    """A normed plane with a counterclockwise basis ``(e1, e2)``.

    ``c`` and ``C`` are the minimum and maximum of ``||cos t e1 + sin t e2||``.
    Build with :meth:`create`.
    """

    norm: Norm2D
    e1: Vector2
    e2: Vector2
    c: float
    C: float

    @classmethod
    def create(
        cls,
        norm: Norm2D,
        e1: ArrayLike | None = None,
        e2: ArrayLike | None = None,
    ) -> "BasedSpace":
        """Attach a basis to a norm.

        :param norm: The norm
        :type norm: Norm2D
        :param e1: First basis vector, on the sphere; defaults to (1, 0)
            scaled onto the sphere
        :param e2: Second basis vector; defaults to (0, 1)
        :raises InvalidBasis: If ``|gauge(e1) - 1| > 1e-9`` or ``det(e1, e2) <= 0``
        :return: The based space with ``c`` and ``C`` computed
        :rtype: BasedSpace
        """
        if e1 is None:
            e1 = norm.scale_to_sphere((1.0, 0.0))
        if e2 is None:
            e2 = (0.0, 1.0)
        e1 = as_vector(e1, "e1").reshape(2).copy()
        e2 = as_vector(e2, "e2").reshape(2).copy()
        if abs(float(norm.gauge(e1)) - 1.0) > BASIS_TOLERANCE:
            raise InvalidBasis(f"e1 has gauge {float(norm.gauge(e1))!r}, expected 1")
        if not det2(e1, e2) > 1e-12:
            raise InvalidBasis(f"det(e1, e2) = {float(det2(e1, e2))!r} is not positive")

        def values(t):
            u = np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)
            return np.asarray(norm.gauge(u))

        c = _extremum(values, 1.0)
        C = _extremum(values, -1.0)
        logger.debug(
            "based %s: e1=%s e2=%s c=%.17g C=%.17g",
            norm.spec.describe(),
            e1,
            e2,
            c,
            C,
        )
        return cls(norm, e1, e2, c, C)

    def rebase(
        self, e1: ArrayLike | None = None, e2: ArrayLike | None = None
    ) -> "BasedSpace":
        """The same norm with some basis vectors replaced."""
        return BasedSpace.create(
            self.norm,
            self.e1 if e1 is None else e1,
            self.e2 if e2 is None else e2,
        )

    @property
    def basis(self) -> FloatArray:
        """Matrix with columns e1 and e2."""
        return np.column_stack([self.e1, self.e2])

    @property
    def orientation(self) -> float:
        """``det(e1, e2)``, positive."""
        return float(det2(self.e1, self.e2))

    def direction(self, t: ArrayLike) -> Vector2:
        """``cos t e1 + sin t e2``."""
        t = np.asarray(t, dtype=np.float64)
        return np.cos(t)[..., None] * self.e1 + np.sin(t)[..., None] * self.e2

    def coordinates(self, x: ArrayLike) -> Vector2:
        """Coordinates of vectors in the basis."""
        return as_vector(x) @ np.linalg.inv(self.basis).T

    def angle_of(self, x: ArrayLike) -> FloatArray:
        """Polar parameter in [0, 2 pi) of the ray through ``x``."""
        xy = self.coordinates(x)
        return np.mod(np.arctan2(xy[..., 1], xy[..., 0]), TWO_PI)


@dataclass(frozen=True, eq=False)
class PolarCurve:
    """The polar parameterization ``p(t)`` of the sphere of a based space."""

    space: BasedSpace

    def polar_point(self, t: ArrayLike) -> Vector2:
        """``p(t)``; vectorized over t."""
        return self.space.norm.scale_to_sphere(self.space.direction(t))

    def polar_derivatives(self, t: ArrayLike, method: str = "auto") -> DerivativePair:
        """One-sided derivatives of ``p`` at ``t``.

        With ``method="auto"`` the boundary tangents of the body give
        ``p' = rho det(e1, e2) / det(u, T) * T`` with ``u = e(t)`` and
        ``rho = 1/||u||``. ``method="richardson"`` uses one-sided
        differences at steps 1e-5 and 5e-6 combined to second order.

        :raises ValueError: If the method is unknown
        """
        if method == "richardson":
            return DerivativePair(
                richardson_one_sided(self.polar_point, t, -1, RICHARDSON_STEP),
                richardson_one_sided(self.polar_point, t, 1, RICHARDSON_STEP),
            )
        if method != "auto":
            raise ValueError(f"unknown derivative method {method!r}")
        t = np.asarray(t, dtype=np.float64)
        u = self.space.direction(t)
        rho = 1.0 / np.asarray(self.space.norm.gauge(u))
        point = u * rho[..., None]
        arriving, leaving = self.space.norm.tangents(point, CORNER_ATOL)
        scale = rho[..., None] * self.space.orientation
        return DerivativePair(
            arriving * scale / det2(u, arriving)[..., None],
            leaving * scale / det2(u, leaving)[..., None],
        )

    def speed(self, t: ArrayLike, side: ArrayLike) -> FloatArray:
        """``||p'(t)||`` from the right (side +1), left (-1) or either (0).

        Side 0 reads the smooth branch of the body without corner detection;
        exactly at a kink it returns one of the two one-sided speeds.
        """
        t = np.asarray(t, dtype=np.float64)
        side = np.broadcast_to(np.asarray(side), t.shape)
        norm = self.space.norm
        u = self.space.direction(t)
        g_u = np.asarray(norm.gauge(u))
        point = u / g_u[..., None]
        tangent = np.empty_like(point)
        plain = side == 0
        if np.any(plain):
            tangent[plain] = norm.tangents(point[plain], 0.0)[1]
        if not np.all(plain):
            arriving, leaving = norm.tangents(point[~plain], CORNER_ATOL)
            left = (side[~plain] < 0)[..., None]
            tangent[~plain] = np.where(left, arriving, leaving)
        g_t = np.asarray(norm.gauge(tangent))
        return self.space.orientation * g_t / (g_u * det2(u, tangent))


class NaturalCurve:
    """Arc-length parameterization ``r(s)`` of the sphere of a based space.

    The arc length is tabulated once at construction on ``cells`` uniform
    polar cells, split at the kinks of the body; all queries afterwards
    are read-only, so one curve may serve many threads.

    :param space: Based space to parameterize
    :type space: BasedSpace
    :param cells: Number of uniform table cells
    :type cells: int
    :raises QuadratureFailure: If a table cell does not converge
    """

    def __init__(self, space: BasedSpace, cells: int = DEFAULT_CELLS):
        if cells < 16:
            raise ValueError(f"cells must be at least 16, got {cells}")
        self.space = space
        self.polar = PolarCurve(space)
        self.cells = cells
        corners = space.norm.corner_points()
        angles = space.angle_of(corners) if len(corners) else np.zeros(0)
        kinks = np.unique(np.where(angles >= TWO_PI, 0.0, angles))
        uniform = np.linspace(0.0, TWO_PI, cells + 1)
        wrapped = np.concatenate([kinks, kinks + TWO_PI, kinks - TWO_PI])
        if kinks.size:
            gap = np.min(np.abs(uniform[:, None] - wrapped[None, :]), axis=1)
            interior = np.arange(cells + 1) % cells != 0
            uniform = uniform[~(interior & (gap < KINK_NODE_GAP))]
        nodes = np.unique(np.concatenate([uniform, kinks]))
        is_kink = np.zeros(nodes.size, dtype=bool)
        if kinks.size:
            is_kink = np.min(np.abs(nodes[:, None] - wrapped[None, :]), axis=1) < 1e-14
        self._t_nodes = nodes
        self._kink_nodes = is_kink
        self._kinks = kinks

        a, b = nodes[:-1], nodes[1:]
        left_side = np.where(is_kink[:-1], 1, 0)
        right_side = np.where(is_kink[1:], -1, 0)
        tol = QUADRATURE_TOLERANCE * (b - a) / TWO_PI
        pieces = adaptive_simpson(self.polar.speed, a, b, tol, left_side, right_side)
        self._s_nodes = np.concatenate([[0.0], np.cumsum(pieces)])
        self._d_right = self.polar.speed(a, left_side)
        self._d_left = self.polar.speed(b, right_side)
        self._total = float(self._s_nodes[-1])
        logger.debug(
            "natural curve of %s: %s nodes, %s kinks, half-length %.17g",
            space.norm.spec.describe(),
            nodes.size,
            kinks.size,
            0.5 * self._total,
        )

    def __repr__(self) -> str:
        return (
            f"NaturalCurve({self.space.norm.spec.describe()}, "
            f"nodes={self._t_nodes.size}, length={self._total!r})"
        )

    @property
    def total_length(self) -> float:
        """Length ``2L`` of the whole sphere."""
        return self._total

    def half_length(self) -> float:
        """``L = s(pi)``."""
        return float(self.arc_length(np.pi))

    def kink_parameters(self) -> FloatArray:
        """Polar parameters in [0, 2 pi) of the known corners."""
        return self._kinks.copy()

    def kink_arc_parameters(self) -> FloatArray:
        """Arc parameters in [0, 2L) of the known corners, sorted."""
        return np.unique(np.mod(self._s_nodes[self._kink_nodes], self._total))

    def arc_length(self, t: ArrayLike) -> FloatArray | float:
        """``s(t) = integral of ||p'(u)|| du`` over [0, t].

        Arguments outside [0, 2 pi) are reduced with ``s(t + 2 pi) = s(t) + 2L``.

        :raises QuadratureFailure: If the partial cell does not converge
        """
        t = np.asarray(t, dtype=np.float64)
        turns = np.floor(t / TWO_PI)
        rest = t - turns * TWO_PI
        last = self._t_nodes.size - 2
        idx = np.clip(np.searchsorted(self._t_nodes, rest, side="right") - 1, 0, last)
        a = self._t_nodes[idx]
        left_side = np.where(self._kink_nodes[idx], 1, 0)
        tol = QUADRATURE_TOLERANCE * np.maximum(rest - a, 0.0) / TWO_PI + 1e-16
        partial = adaptive_simpson(self.polar.speed, a, rest, tol, left_side, 0)
        out = turns * self._total + self._s_nodes[idx] + partial
        return float(out) if out.ndim == 0 else out

    def _hermite(self, idx, tau):
        dt = self._t_nodes[idx + 1] - self._t_nodes[idx]
        sa, sb = self._s_nodes[idx], self._s_nodes[idx + 1]
        da, db = self._d_right[idx], self._d_left[idx]
        tau2 = tau * tau
        tau3 = tau2 * tau
        return (
            (2 * tau3 - 3 * tau2 + 1) * sa
            + (tau3 - 2 * tau2 + tau) * dt * da
            + (-2 * tau3 + 3 * tau2) * sb
            + (tau3 - tau2) * dt * db
        )

    def invert_arclength(self, s: ArrayLike) -> FloatArray | float:
        """The polar parameter ``t`` with ``s(t) = s``.

        The table brackets ``s`` in one cell; 60 bisection steps on the cubic
        Hermite model of the cell and one Newton step on the exact arc length
        follow.
        """
        s = np.asarray(s, dtype=np.float64)
        turns = np.floor(s / self._total)
        sigma = s - turns * self._total
        last = self._t_nodes.size - 2
        idx = np.clip(np.searchsorted(self._s_nodes, sigma, side="right") - 1, 0, last)
        lo = np.zeros_like(sigma)
        hi = np.ones_like(sigma)
        for _ in range(INVERSION_STEPS):
            mid = 0.5 * (lo + hi)
            above = self._hermite(idx, mid) >= sigma
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        ta, tb = self._t_nodes[idx], self._t_nodes[idx + 1]
        t = ta + 0.5 * (lo + hi) * (tb - ta)
        residual = np.asarray(self.arc_length(t)) - sigma
        t = np.clip(t - residual / self.polar.speed(t, 0), ta, tb)
        out = t + turns * TWO_PI
        return float(out) if out.ndim == 0 else out

    def natural_point(self, s: ArrayLike) -> Vector2:
        """``r(s) = p(t(s))``."""
        return self.polar.polar_point(self.invert_arclength(s))

    def _unit_tangents(self, point: Vector2) -> DerivativePair:
        norm = self.space.norm
        arriving, leaving = norm.tangents(point, CORNER_ATOL)
        return DerivativePair(
            norm.scale_to_sphere(arriving), norm.scale_to_sphere(leaving)
        )

    def natural_derivatives(self, s: ArrayLike) -> DerivativePair:
        """One-sided derivatives ``r'_-(s)``, ``r'_+(s)``, both of norm 1."""
        return self._unit_tangents(self.natural_point(s))

    def natural_frame(self, s: ArrayLike) -> tuple[Vector2, DerivativePair]:
        """``r(s)`` together with its one-sided derivatives."""
        point = self.natural_point(s)
        return point, self._unit_tangents(point)

    def parameter_of(self, x: ArrayLike) -> FloatArray | float:
        """Arc parameter in [0, 2L) of a sphere point."""
        out = np.mod(np.asarray(self.arc_length(self.space.angle_of(x))), self._total)
        return float(out) if out.ndim == 0 else out

    def rebased_at(self, s: float) -> "NaturalCurve":
        """The curve of the basis ``(r(s), r'_avg(s))``, starting at ``r(s)``."""
        point, pair = self.natural_frame(float(s))
        return NaturalCurve(self.space.rebase(e1=point, e2=pair.avg), self.cells)
