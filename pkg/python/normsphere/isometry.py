"""Isometries between unit spheres and their linear extensions.

Two routes lead from a sphere isometry ``f: S_X -> S_Y`` to a linear map:

* :func:`build_extension_p2` takes two independent special points ``u, v``
  (corners are special), sets ``L u = f(u)``, ``L v = f(v)`` and verifies
  ``L = f`` on the sphere through chord triangles.
* :func:`reconstruct_two_corner` handles strictly convex spheres with exactly
  two corners by matching the natural parameterizations of both spheres.

Example:
    lens = build_from_spec(NormSpec.lens(0.2))
    f, target = sphere_map_from_linear(LinearMap2x2(2, 1, 0, 1), lens)
    reconstruct_two_corner(f)  # LinearMap2x2(2, 1, 0, 1) up to 1e-6
"""

import logging
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DegenerateComponent,
    HalfLengthMismatch,
    JumpMismatch,
    NoBracket,
    NotInComponent,
    NotIsometric,
    NotOnSphere,
    OnPerpSet,
    SingularPair,
    SingularTransform,
    VerificationFailure,
    WrongCornerCount,
)
from .jumps import jumps_from_limits, lemma_jj_limits, nonsmooth_scan
from .norms import CORNER_ATOL, SPHERE_TOLERANCE, Norm2D, build_from_spec
from .parameterization import BasedSpace, NaturalCurve
from .structs.extension import (
    ExtensionDeviation,
    ExtensionResult,
    SpecialnessReport,
    StageOutcome,
)
from .structs.linear_map import DET_TOLERANCE, LinearMap2x2
from .structs.norm_spec import NormSpec
from .structs.pair_class import PairClass, PairValue
from .structs.vector import Vector2, as_vector, det2, rot90, unit_directions
from .utils.numerics import illinois_roots

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

ISOMETRY_TOLERANCE = 1e-8
ANTIPODAL_TOLERANCE = 1e-8
PERP_TOLERANCE = 1e-7
CONSTANT_TOLERANCE = 1e-6
DEPENDENCE_TOLERANCE = 1e-8
SUPPORT_TOLERANCE = 1e-9
PAIR_GRID = 512
TRIANGLE_GRID = 32
TRIANGLE_TOLERANCE = 1e-8
SAMPLED_ROWS = 4096
KINK_SNAP = 1e-7


def _curve_of(norm: Norm2D) -> NaturalCurve:
    return NaturalCurve(BasedSpace.create(norm))


@dataclass(frozen=True, eq=False)
class SampledTable:
    """Sphere map given by rows ``(s_i, sigma_i)`` of natural parameters.

    ``sigma`` is unwrapped so that it is monotone in ``s``; values between
    rows are interpolated linearly in the parameters and then placed on the
    target sphere, so every interpolated value lies on the sphere.
    """

    source_curve: NaturalCurve
    target_curve: NaturalCurve
    source_params: FloatArray
    target_params: FloatArray

    @property
    def rows(self) -> int:
        return int(self.source_params.size)

    @property
    def source_points(self) -> Vector2:
        return self.source_curve.natural_point(self.source_params)

    @property
    def target_points(self) -> Vector2:
        return self.target_curve.natural_point(self.target_params)

    def evaluate(self, x: ArrayLike) -> Vector2:
        period = self.source_curve.total_length
        turn = self.target_params[-1] - self.target_params[0]
        # one full target turn per source turn, in either direction
        shift = np.sign(turn) * self.target_curve.total_length
        src, dst = self.source_params, self.target_params
        xp = np.concatenate([src - period, src, src + period])
        fp = np.concatenate([dst - shift, dst, dst + shift])
        s = np.mod(np.asarray(self.source_curve.parameter_of(x)), period)
        return self.target_curve.natural_point(np.interp(s, xp, fp))

    def perturbed(self, row: int, delta: float) -> "SampledTable":
        params = self.target_params.copy()
        params[row] += delta
        return replace(self, target_params=params)


@dataclass(frozen=True, eq=False)
class SphereMap:
    """A map from the unit sphere of ``source`` onto that of ``target``.

    Exactly one of ``linear`` and ``table`` is set.
    """

    source: Norm2D
    target: Norm2D
    linear: LinearMap2x2 | None = None
    table: SampledTable | None = None

    def __post_init__(self):
        if (self.linear is None) == (self.table is None):
            raise ValueError("a sphere map needs exactly one of linear and table")

    @classmethod
    def exact(
        cls,
        matrix: LinearMap2x2,
        source: Norm2D,
        target: Norm2D,
        validate: bool = True,
    ) -> "SphereMap":
        """Restriction of a linear map to the sphere.

        :raises SingularTransform: If the matrix is not invertible
        :raises NotIsometric: If ``validate`` and the map is not an isometry
            of the spheres within 1e-8 or does not commute with ``x -> -x``
        """
        if not matrix.is_invertible(DET_TOLERANCE):
            raise SingularTransform(f"matrix {matrix.entries} is singular")
        f = cls(source, target, linear=matrix)
        if validate:
            f.validate()
        return f

    @classmethod
    def sampled_from(
        cls,
        f: "SphereMap",
        rows: int = SAMPLED_ROWS,
        source_curve: NaturalCurve | None = None,
        target_curve: NaturalCurve | None = None,
        validate: bool = True,
    ) -> "SphereMap":
        """Tabulate ``f`` at ``rows`` equally spaced natural parameters.

        :raises ValueError: If rows < 16
        :raises NotIsometric: If ``validate`` and the table is not odd or not
            an isometry within 1e-8
        """
        if rows < 16:
            raise ValueError(f"rows must be at least 16, got {rows}")
        source_curve = source_curve or _curve_of(f.source)
        target_curve = target_curve or _curve_of(f.target)
        s = np.arange(rows) * (source_curve.total_length / rows)
        images = f(source_curve.natural_point(s))
        sigma = np.asarray(target_curve.parameter_of(images))
        sigma = np.unwrap(sigma, period=target_curve.total_length)
        table = SampledTable(source_curve, target_curve, s, sigma)
        logger.debug("tabulated sphere map with %s rows", rows)
        sampled = cls(f.source, f.target, table=table)
        if validate:
            sampled.validate()
        return sampled

    @property
    def is_linear(self) -> bool:
        return self.linear is not None

    def __call__(self, x: ArrayLike) -> Vector2:
        x = as_vector(x)
        if self.linear is not None:
            return self.linear.apply(x)
        if self.table is None:
            raise ValueError("sphere map has no representation")
        return self.table.evaluate(x)

    def with_row_perturbed(self, row: int, delta: float) -> "SphereMap":
        """Copy of a sampled map with one target parameter shifted by delta.

        :raises ValueError: If the map is not sampled
        """
        if self.table is None:
            raise ValueError("only sampled maps have rows")
        return replace(self, table=self.table.perturbed(row, delta))

    def _sample_points(self, samples: int) -> Vector2:
        angles = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
        return self.source.scale_to_sphere(unit_directions(angles))

    def isometry_defect(self, samples: int = 256) -> float:
        """Largest ``| ||f(x)-f(y)||_Y - ||x-y||_X |`` over sampled pairs."""
        x = self._sample_points(samples)
        rng = np.random.default_rng(0)
        y = x[rng.permutation(samples)]
        fx, fy = self(x), self(y)
        gap = np.asarray(self.target.gauge(fx - fy)) - np.asarray(
            self.source.gauge(x - y)
        )
        return float(np.max(np.abs(gap)))

    def antipodality_defect(self, samples: int = 256) -> float:
        """Largest ``||f(-x) + f(x)||_Y`` over sampled points."""
        x = self._sample_points(samples)
        return float(np.max(np.asarray(self.target.gauge(self(-x) + self(x)))))

    def validate(self) -> None:
        """Require ``f(-x) = -f(x)`` and the isometry property within 1e-8.

        :raises NotIsometric: Naming the stage ``antipodality`` or ``isometry``
        """
        antipodal = self.antipodality_defect()
        if antipodal > ANTIPODAL_TOLERANCE:
            raise NotIsometric(
                f"sphere map is not odd (defect {antipodal!r})",
                "antipodality",
                antipodal,
            )
        defect = self.isometry_defect()
        if defect > ISOMETRY_TOLERANCE:
            raise NotIsometric(
                f"sphere map is not an isometry (defect {defect!r})",
                "isometry",
                defect,
            )


def sphere_map_from_linear(A: LinearMap2x2, X: Norm2D) -> tuple[SphereMap, Norm2D]:
    """Push the norm of X forward along A.

    The returned norm is ``Y = transform(X, A)`` with
    ``gauge_Y(v) = gauge_X(A^-1 v)``, so A maps ``S_X`` onto ``S_Y``
    isometrically.

    :raises SingularTransform: If ``|det A| <= 1e-12``
    :return: The exact sphere map and the target norm
    """
    if not A.is_invertible(DET_TOLERANCE):
        raise SingularTransform(f"matrix {A.entries} has |det| <= 1e-12")
    spec = NormSpec.transform(X.spec, A)
    Y = build_from_spec(spec, gauge_tolerance=X.gauge_tolerance)
    return SphereMap(X, Y, linear=A), Y


def _theta(norm: Norm2D, x: Vector2, c: Vector2) -> Vector2:
    mate = norm.chord_mate(x, c)
    if mate.degenerate or np.linalg.norm(mate.vector - x) < PERP_TOLERANCE:
        raise OnPerpSet(f"the line through {x.tolist()} along c supports the sphere")
    if mate.offset > 0:
        raise NotInComponent(f"{x.tolist()} lies in the component of -c")
    return mate.vector


def theta_map(nc: NaturalCurve, x: ArrayLike, c: ArrayLike) -> Vector2:
    """The point ``y`` with ``x - y = ||x - y|| c``.

    :param nc: Natural curve of the sphere
    :type nc: NaturalCurve
    :param x: Sphere point in the component of ``c``
    :param c: Chord direction
    :raises OnPerpSet: If the line ``x + R c`` supports the sphere
    :raises NotInComponent: If ``x`` lies in the component of ``-c``
    :raises NotOnSphere: If ``x`` is off the sphere
    """
    x = as_vector(x, "x").reshape(2)
    return _theta(nc.space.norm, x, as_vector(c, "c").reshape(2))


def specialness_check(
    f: SphereMap, c: ArrayLike, samples: int = 256
) -> SpecialnessReport:
    """Check that ``g(x) = (f(x) - f(theta x)) / ||f(x) - f(theta x)||`` is constant.

    ``x`` runs over ``samples`` polar directions of the source sphere that lie
    in the component of ``c``.

    :raises ValueError: If samples < 16
    :raises NotOnSphere: If ``c`` is off the source sphere
    :raises DegenerateComponent: If no sample lies in the component
    """
    if samples < 16:
        raise ValueError(f"samples must be at least 16, got {samples}")
    norm = f.source
    c = as_vector(c, "c").reshape(2)
    if abs(float(norm.gauge(c)) - 1.0) > SPHERE_TOLERANCE:
        raise NotOnSphere(f"c = {c.tolist()} is off the sphere")
    angles = 2 * np.pi * np.arange(samples) / samples
    points = norm.scale_to_sphere(unit_directions(angles))
    pairs = []
    for x in points:
        try:
            pairs.append((x, _theta(norm, x, c)))
        except (OnPerpSet, NotInComponent):
            continue
    if not pairs:
        raise DegenerateComponent(f"no sample lies in the component of {c.tolist()}")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    chords = f(xs) - f(ys)
    g = chords / np.asarray(f.target.gauge(chords))[:, None]
    spread = np.asarray(f.target.gauge(g[:, None, :] - g[None, :, :]))
    deviation = float(np.max(spread))
    common = None
    if deviation <= CONSTANT_TOLERANCE:
        mean = np.mean(g, axis=0)
        common = f.target.scale_to_sphere(mean)
    logger.debug("g over %s samples: spread %.3g", len(pairs), deviation)
    return SpecialnessReport(deviation, common, len(pairs))


def _enters(arriving: Vector2, leaving: Vector2, d: Vector2) -> NDArray[np.bool_]:
    return (det2(leaving, d) > SUPPORT_TOLERANCE) & (
        det2(arriving, d) > SUPPORT_TOLERANCE
    )


def _supports(arriving: Vector2, leaving: Vector2, d: Vector2) -> NDArray[np.bool_]:
    return ~_enters(arriving, leaving, d) & ~_enters(arriving, leaving, -d)


def pair_classify(nc: NaturalCurve, u: ArrayLike, v: ArrayLike) -> PairClass:
    """Classify ``(u, v)`` as regular or singular.

    The pair is singular when ``u = +-v`` or some sphere point ``z`` has both
    lines ``z + R u`` and ``z + R v`` supporting the sphere. Candidates ``z``
    are a 512 point grid plus the corners; a candidate is confirmed by
    degenerate chord mates in both directions.
    """
    norm = nc.space.norm
    u = as_vector(u, "u").reshape(2)
    v = as_vector(v, "v").reshape(2)
    if min(float(norm.gauge(u - v)), float(norm.gauge(u + v))) < DEPENDENCE_TOLERANCE:
        return PairClass(PairValue.SINGULAR)
    grid = np.arange(PAIR_GRID) * (nc.total_length / PAIR_GRID)
    params = np.concatenate([nc.kink_arc_parameters(), grid])
    z = nc.natural_point(params)
    arriving, leaving = norm.tangents(z, CORNER_ATOL)
    arriving = arriving / np.linalg.norm(arriving, axis=-1, keepdims=True)
    leaving = leaving / np.linalg.norm(leaving, axis=-1, keepdims=True)
    hits = _supports(arriving, leaving, u) & _supports(arriving, leaving, v)
    for candidate in z[hits]:
        if norm.chord_mate(candidate, u).degenerate and norm.chord_mate(
            candidate, v
        ).degenerate:
            logger.debug("pair %s, %s is singular at %s", u, v, candidate)
            return PairClass(PairValue.SINGULAR, candidate.copy())
    return PairClass(PairValue.REGULAR)


def _chord_end(norm: Norm2D, z: Vector2, d: Vector2) -> Vector2:
    return norm.chord_mate(z, d).vector


def solve_chord_triangle(
    nc: NaturalCurve, u: ArrayLike, v: ArrayLike, w: ArrayLike
) -> tuple[Vector2, Vector2, Vector2]:
    """Find ``z`` on the sphere whose chords along ``u`` and ``v`` end in
    ``x`` and ``y`` with ``x - y`` a positive multiple of ``w``.

    ``phi(z) = x(z) - y(z)`` is odd in ``z``, so the angular defect
    ``det(w, phi(z(t)))`` changes sign on the polar half turn ``[0, pi]``; the
    root is refined by regula falsi and ``z`` is replaced by ``-z`` when
    ``phi(z)`` points along ``-w``. ``w`` may be a stack of targets.

    :raises SingularPair: If ``(u, v)`` is singular
    :raises NoBracket: If no sign change is found, or ``x - y`` is not a
        positive multiple of ``w`` within angular tolerance 1e-8
    :return: ``(x, y, z)``, each shaped like ``w``
    """
    u = as_vector(u, "u").reshape(2)
    v = as_vector(v, "v").reshape(2)
    if not pair_classify(nc, u, v).is_regular:
        raise SingularPair(f"pair {u.tolist()}, {v.tolist()} is singular")
    return _ChordTriangles(nc, u, v).solve(w)


class _ChordTriangles:
    """Chord triangles of one regular pair over many target directions."""

    def __init__(self, nc: NaturalCurve, u: Vector2, v: Vector2):
        self.nc = nc
        self.u = u
        self.v = v
        self.ts = np.linspace(0.0, np.pi, TRIANGLE_GRID + 1)
        self.phis = self.phi(self.ts)

    def ends(self, t: FloatArray) -> tuple[Vector2, Vector2, Vector2]:
        norm = self.nc.space.norm
        z = self.nc.polar.polar_point(t).reshape(-1, 2)
        return norm.chord_mates(z, self.u)[0], norm.chord_mates(z, self.v)[0], z

    def phi(self, t: FloatArray) -> Vector2:
        x, y, _ = self.ends(t)
        return x - y

    def solve(self, w: ArrayLike) -> tuple[Vector2, Vector2, Vector2]:
        """``(x, y, z)`` for each row of ``w``, shaped like ``w``.

        :raises NoBracket: If a defect has no sign change on [0, pi] or a
            solution is not along its target
        """
        w = as_vector(w, "w")
        ws = w.reshape(-1, 2)
        ts = self.ts
        values = det2(ws[:, None, :], self.phis[None, :, :])
        change = (values[:, :-1] == 0.0) | (
            np.sign(values[:, :-1]) * np.sign(values[:, 1:]) < 0.0
        )
        if not np.all(np.any(change, axis=1)):
            bad = int(np.flatnonzero(~np.any(change, axis=1))[0])
            raise NoBracket(
                "angular defect has no sign change on [0, pi]",
                {"t": ts.tolist(), "defect": values[bad].tolist()},
            )
        k = np.argmax(change, axis=1)
        rows = np.arange(len(ws))
        f_lo, f_hi = values[rows, k], values[rows, k + 1]
        exact = f_lo == 0.0
        t_root = ts[k].copy()
        if not np.all(exact):
            open_ = np.flatnonzero(~exact)

            def defect(t, index):
                return det2(ws[open_[index]], self.phi(t))

            t_root[open_] = illinois_roots(
                defect,
                ts[k[open_]],
                ts[k[open_] + 1],
                f_lo[open_],
                f_hi[open_],
                xtol=1e-13,
            )
        x, y, z = self.ends(t_root)
        # phi is odd, so -z carries the triangle pointing along w
        flip = (np.einsum("ij,ij->i", x - y, ws) < 0.0)[:, None]
        x, y, z = (np.where(flip, -p, p) for p in (x, y, z))
        gap = x - y
        scale = np.linalg.norm(gap, axis=-1) * np.linalg.norm(ws, axis=-1)
        skew = np.abs(det2(ws, gap))
        along = np.einsum("ij,ij->i", gap, ws)
        bad = ~((scale > 0.0) & (skew <= TRIANGLE_TOLERANCE * scale) & (along > 0.0))
        if np.any(bad):
            first = int(np.flatnonzero(bad)[0])
            raise NoBracket(
                f"chord triangle side is not along w (skew {skew[first]!r})",
                {"t": float(t_root[first]), "skew": float(skew[first])},
            )
        return x.reshape(w.shape), y.reshape(w.shape), z.reshape(w.shape)


def _map_from_pair(f: SphereMap, u: Vector2, v: Vector2) -> LinearMap2x2:
    images = f(np.stack([u, v]))
    source = np.column_stack([u, v])
    return LinearMap2x2.from_matrix(images.T @ np.linalg.inv(source))


def _regular_substitute(nc: NaturalCurve, u: Vector2, v: Vector2):
    cls = pair_classify(nc, u, v)
    if cls.is_regular:
        return u, v
    if cls.witness is None:
        raise SingularPair("u and v are dependent")
    # the witness is a corner, so it is special and may replace either point
    for pair in ((cls.witness, v), (u, cls.witness)):
        a, b = pair
        if abs(float(det2(a, b))) > DEPENDENCE_TOLERANCE and pair_classify(
            nc, a, b
        ).is_regular:
            logger.info("replaced singular pair by %s, %s", a, b)
            return a, b
    raise SingularPair("no regular pair found around the singularity witness")


def build_extension_p2(
    f: SphereMap,
    u: ArrayLike,
    v: ArrayLike,
    curve: NaturalCurve | None = None,
    samples: int = 256,
    grid: int = 512,
    triangle_samples: int = 256,
    tol: float = 1e-6,
) -> LinearMap2x2:
    """Extend ``f`` linearly from two independent special points.

    ``L`` is fixed by ``L u = f(u)`` and ``L v = f(v)``; a singular pair is
    first replaced by a regular one through its witness corner. The sweep
    checks ``||L w||_Y = 1`` at ``samples`` points, ``f(x) - f(y) = L(x - y)``
    on ``triangle_samples`` chord triangles and ``L r(s) = f(r(s))`` on a
    ``grid`` of natural parameters.

    :raises SingularPair: If u and v are dependent or no regular pair exists
    :raises NotIsometric: If a sweep stage exceeds ``tol``
    :return: The linear extension
    :rtype: LinearMap2x2
    """
    norm = f.source
    u = as_vector(u, "u").reshape(2)
    v = as_vector(v, "v").reshape(2)
    for name, p in (("u", u), ("v", v)):
        if abs(float(norm.gauge(p)) - 1.0) > SPHERE_TOLERANCE:
            raise NotOnSphere(f"{name} = {p.tolist()} is off the sphere")
    if abs(float(det2(u, v))) <= DEPENDENCE_TOLERANCE:
        raise SingularPair("u and v are linearly dependent")
    curve = curve or _curve_of(norm)
    u, v = _regular_substitute(curve, u, v)
    L = _map_from_pair(f, u, v)

    w = f._sample_points(samples)
    norm_dev = float(np.max(np.abs(np.asarray(f.target.gauge(L.apply(w))) - 1.0)))
    if norm_dev > tol:
        raise NotIsometric(f"||L w|| deviates from 1 by {norm_dev!r}", "norm", norm_dev)
    triangle_dev = 0.0
    triangles = _ChordTriangles(curve, u, v)
    for target in f._sample_points(triangle_samples):
        x, y, _ = triangles.solve(target)
        gap = f(x) - f(y) - L.apply(x - y)
        triangle_dev = max(triangle_dev, float(f.target.gauge(gap)))
    if triangle_dev > tol:
        raise NotIsometric(
            f"chord triangles deviate by {triangle_dev!r}", "triangle", triangle_dev
        )
    points = curve.natural_point(np.arange(grid) * (curve.total_length / grid))
    grid_dev = float(np.max(np.asarray(f.target.gauge(L.apply(points) - f(points)))))
    if grid_dev > tol:
        message = f"L r(s) deviates from f(r(s)) by {grid_dev!r}"
        raise NotIsometric(message, "grid", grid_dev)
    logger.info(
        "extension from special pair: norm %.3g triangle %.3g grid %.3g",
        norm_dev,
        triangle_dev,
        grid_dev,
    )
    return L


def find_regular_special_pair(nc: NaturalCurve) -> tuple[Vector2, Vector2]:
    """Two independent corners of the sphere forming a regular pair.

    :raises SingularPair: If the sphere has fewer than two independent corners
        or every corner pair is singular
    """
    corners = nc.natural_point(nc.kink_arc_parameters())
    for i, j in combinations(range(len(corners)), 2):
        u, v = corners[i], corners[j]
        if abs(float(det2(u, v))) <= DEPENDENCE_TOLERANCE:
            continue
        try:
            return _regular_substitute(nc, u, v)
        except SingularPair:
            continue
    raise SingularPair(f"no regular pair among {len(corners)} corners")


def verify_extension(
    f: SphereMap, M: LinearMap2x2, grid: int = 512
) -> ExtensionDeviation:
    """Compare ``M`` with ``f`` on a grid of source sphere points.

    Sampled maps are also compared at their table rows.

    :raises ValueError: If grid < 64
    """
    if grid < 64:
        raise ValueError(f"grid must be at least 64, got {grid}")
    points = f._sample_points(grid)
    if f.table is not None:
        points = np.concatenate([points, f.table.source_points])
    images = f(points)
    linear = M.apply(points)
    max_dev = float(np.max(np.asarray(f.target.gauge(linear - images))))
    norm_dev = float(np.max(np.abs(np.asarray(f.target.gauge(linear)) - 1.0)))
    antipodal = float(np.max(np.asarray(f.target.gauge(f(-points) + images))))
    ok = antipodal <= ANTIPODAL_TOLERANCE
    if not ok:
        logger.warning("sphere map is not odd: ||f(-x) + f(x)|| up to %.3g", antipodal)
    return ExtensionDeviation(max_dev, norm_dev, antipodal, ok, len(points))


def _snap_to_kink(nc: NaturalCurve, s: float) -> float:
    kinks = nc.kink_arc_parameters()
    if len(kinks) == 0:
        return s
    # distance on the circle of length 2L
    gaps = np.abs(np.mod(kinks - s + 0.5 * nc.total_length, nc.total_length))
    gaps = np.abs(gaps - 0.5 * nc.total_length)
    nearest = int(np.argmin(gaps))
    return float(kinks[nearest]) if gaps[nearest] < KINK_SNAP else s


class TwoCornerReconstruction:
    """Recover the linear extension of an isometry of a two-corner sphere.

    Each stage records a :class:`StageOutcome`; the first failing stage raises
    the matching :class:`~normsphere.errors.PipelineError`.

    :param f: Sphere isometry
    :type f: SphereMap
    :param scan_resolution: Coarse cells of the corner scan
    :param grid: Points of the identity sweeps
    """

    EPS_ORIENTATION = 1e-3
    HALF_LENGTH_TOLERANCE = 1e-6
    JUMP_TOLERANCE = 1e-3
    IDENTITY_TOLERANCE = 1e-6
    EXTENSION_TOLERANCE = 1e-5

    def __init__(self, f: SphereMap, scan_resolution: int = 1024, grid: int = 512):
        self.f = f
        self.scan_resolution = scan_resolution
        self.grid = grid
        self.stages: list[StageOutcome] = []

    def _record(self, name: str, deviation: float, tol: float, error) -> None:
        passed = bool(deviation <= tol)
        self.stages.append(StageOutcome(name, passed, float(deviation)))
        logger.info("stage %s\t%s\t%.3g", name, "ok" if passed else "fail", deviation)
        if not passed:
            raise error(f"stage {name}: deviation {deviation!r} above {tol!r}", name)

    def run(self) -> ExtensionResult:
        """Run every stage.

        :raises WrongCornerCount: If the source sphere does not have two corners
        :raises HalfLengthMismatch: If the half-lengths differ by more than 1e-6
        :raises JumpMismatch: If the corner jumps differ by more than 1e-3
        :raises VerificationFailure: If an identity sweep fails
        """
        f = self.f
        self.stages = []
        source = _curve_of(f.source)
        corners = nonsmooth_scan(source, self.scan_resolution, 1e-3)
        count = len(corners)
        self.stages.append(StageOutcome("corners", count == 2, float(count)))
        if count != 2:
            raise WrongCornerCount(f"found {count} corners, expected 2", "corners")
        nc = source.rebased_at(_snap_to_kink(source, float(corners[0])))
        e1, e2 = nc.space.e1, nc.space.e2

        f_e1 = f(e1)
        provisional = NaturalCurve(
            BasedSpace.create(f.target, f_e1, rot90(f_e1)), nc.cells
        )
        target = provisional.rebased_at(0.0)
        probe = f(nc.natural_point(self.EPS_ORIENTATION))
        orientation = 1.0 if float(det2(target.space.e1, probe)) > 0 else -1.0
        e1_t, e2_t = target.space.e1, orientation * target.space.e2
        logger.info("target orientation %+d", int(orientation))

        half = nc.half_length()
        self._record(
            "half_length",
            abs(half - target.half_length()),
            self.HALF_LENGTH_TOLERANCE,
            HalfLengthMismatch,
        )
        jump_x = jumps_from_limits(*lemma_jj_limits(nc))
        jump_y = jumps_from_limits(*lemma_jj_limits(target))
        # reversing the traversal flips the sign of the tangential jump
        jt_y = orientation * jump_y.jt
        self._record(
            "jumps",
            max(abs(jump_x.jr - jump_y.jr), abs(jump_x.jt - jt_y)),
            self.JUMP_TOLERANCE,
            JumpMismatch,
        )
        gap = f.target.gauge
        s = np.arange(self.grid + 1) * (half / self.grid)
        images = f(nc.natural_point(s))
        identity = np.max(gap(images - target.natural_point(orientation * s)))
        self._record(
            "identity", float(identity), self.IDENTITY_TOLERANCE, VerificationFailure
        )
        extension = LinearMap2x2.from_matrix(
            np.column_stack([e1_t, e2_t]) @ np.linalg.inv(np.column_stack([e1, e2]))
        )
        interior = s[1:-1]
        moved = extension.apply(nc.natural_derivatives(interior).avg)
        expected = orientation * target.natural_derivatives(orientation * interior).avg
        self._record(
            "derivatives",
            float(np.max(gap(moved - expected))),
            self.EXTENSION_TOLERANCE,
            VerificationFailure,
        )
        full = np.arange(2 * self.grid) * (nc.total_length / (2 * self.grid))
        moved = extension.apply(nc.natural_point(full))
        deviation = np.max(gap(moved - target.natural_point(orientation * full)))
        self._record(
            "extension", float(deviation), self.EXTENSION_TOLERANCE, VerificationFailure
        )
        return ExtensionResult(
            extension, verify_extension(f, extension, self.grid), tuple(self.stages)
        )


def reconstruct_two_corner(f: SphereMap) -> LinearMap2x2:
    """Linear extension of an isometry of a sphere with exactly two corners.

    :raises PipelineError: Naming the stage that failed
    """
    return TwoCornerReconstruction(f).run().matrix
