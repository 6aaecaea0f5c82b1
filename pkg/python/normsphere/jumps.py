"""Jumps of the one-sided derivatives, corner detection and the metric
expansions around corners.

The jumps at ``s`` are the coordinates ``(jr, jt)`` of
``(r'_+(s) - r'_-(s)) / 2`` in the basis ``(r(s), r'_avg(s))``. They vanish
exactly at smooth points, and near a corner they govern the one-sided
slopes of chord lengths, which is what the checks below measure.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from .errors import (
    BadChordAlignment,
    CoincidentPoints,
    DegenerateBasis,
    InvalidConfig,
    NotACorner,
    NotDifferentiableAtB,
    NotOnSphere,
    SingularSystem,
    WrongOrientation,
)
from .norms import SPHERE_TOLERANCE, ChordMate
from .parameterization import NaturalCurve
from .structs.derivatives import (
    DerivativePair,
    JumpData,
    LemmaAReport,
    RecoveredDerivatives,
    SlopeMeasurement,
)
from .structs.probe_config import ChordOptions, ProbeMode, SmoothnessProbeConfig
from .structs.vector import Vector2, as_vector, det2

logger = logging.getLogger(__name__)

BASIS_DET_TOLERANCE = 1e-10
DIFFERENTIABLE_GAP = 1e-6
SCAN_SHRINK_WIDTH = 1e-7
SCAN_DEDUPE = 1e-7
CHORD_STEPS = (1e-3, 1e-4, 1e-5)
LIMIT_STEPS = (1e-3, 5e-4, 2.5e-4)
RECOVERY_STEP = 1e-4
ALIGNMENT_TOLERANCE = 1e-8
SINGULAR_JUMP = -1e-4
# offsets stay strictly inside the eps ball around the probed point
PROBE_SHRINK = 0.999


def coordinates_in(point: Vector2, avg: Vector2, v: Vector2) -> tuple:
    """Coordinates of ``v`` in the basis ``(point, avg)`` by Cramer's rule.

    :raises DegenerateBasis: If ``|det(point, avg)| <= 1e-10``
    """
    det = det2(point, avg)
    if np.any(np.abs(det) <= BASIS_DET_TOLERANCE):
        raise DegenerateBasis(f"det(r, r'_avg) = {np.min(np.abs(det))!r}")
    return det2(v, avg) / det, det2(point, v) / det


def jump_gap(nc: NaturalCurve, s: ArrayLike):
    """``||r'_+(s) - r'_-(s)||``, zero exactly at smooth points."""
    pair = nc.natural_derivatives(s)
    return nc.space.norm.gauge(pair.difference)


def _jumps_of(point: Vector2, pair: DerivativePair) -> JumpData:
    jr, jt = coordinates_in(point, pair.avg, 0.5 * pair.difference)
    if np.ndim(jr) == 0:
        return JumpData(float(jr), float(jt))
    return JumpData(jr, jt)


def jumps(nc: NaturalCurve, s: ArrayLike) -> JumpData:
    """Radial and tangential jumps at ``s``; vectorized over ``s``.

    :param nc: Natural curve
    :type nc: NaturalCurve
    :param s: Arc parameters
    :raises DegenerateBasis: If ``r(s)`` and ``r'_avg(s)`` are dependent
    :return: Jumps with ``jr <= 0`` and ``|jt| < 1``
    :rtype: JumpData
    """
    point, pair = nc.natural_frame(s)
    return _jumps_of(point, pair)


def _quotient_jumps(nc: NaturalCurve, lo, width: float, cells: int):
    """Mismatch of the difference quotients of ``r`` across ``cells`` adjacent
    cells of the given width starting at each ``lo``.

    Cell ``k`` scores ``||D_{k+1} - D_{k-1}||``, where ``D_j`` is the
    quotient on the j-th cell and ``D_{-1}``, ``D_cells`` lie just outside.
    """
    total = nc.total_length
    nodes = lo[:, None] + width * np.arange(-1, cells + 2)[None, :]
    points = nc.natural_point(np.mod(nodes, total))
    quotients = np.diff(points, axis=1) / width
    return np.asarray(nc.space.norm.gauge(quotients[:, 2:] - quotients[:, :-2]))


def nonsmooth_scan(
    nc: NaturalCurve, resolution: int = 1024, gap_threshold: float = 1e-3
) -> list[float]:
    """Arc parameters in [0, 2L) of the corners of the sphere.

    Only points of ``r`` are read. The sphere is cut into ``resolution``
    cells and a cell scores the mismatch between the difference quotients
    of ``r`` on its two neighbours; a corner inside the cell shows up as
    ``||r'_+ - r'_-||`` while a smooth stretch scores ``O(width)``. Every
    cell is cut in thirds and shrinks to its best third joined with the better
    neighbour of that third, until its width is below 1e-7; cells whose score
    drops under ``gap_threshold / 2`` are abandoned on the way.

    :param nc: Natural curve
    :type nc: NaturalCurve
    :param resolution: Number of coarse cells, at least 64
    :type resolution: int
    :param gap_threshold: Minimal derivative gap of a reported corner
    :type gap_threshold: float
    :raises ValueError: If resolution < 64 or the threshold is not positive
    :return: Sorted corner parameters, pairwise more than 1e-7 apart
    :rtype: list[float]
    """
    if resolution < 64:
        raise ValueError(f"resolution must be at least 64, got {resolution}")
    if not gap_threshold > 0:
        raise ValueError(f"gap_threshold must be positive, got {gap_threshold!r}")
    total = nc.total_length
    width = total / resolution
    lo = np.arange(resolution) * width
    while lo.size and width > SCAN_SHRINK_WIDTH:
        third = width / 3.0
        scores = _quotient_jumps(nc, lo, third, 3)
        best = np.argmax(scores, axis=1)
        # a corner sits in the best third or in the neighbour scoring higher
        left_pair = (best == 0) | ((best == 1) & (scores[:, 0] >= scores[:, 2]))
        start = np.where(left_pair, 0, 1)
        keep = scores[np.arange(lo.size), best] > 0.5 * gap_threshold
        lo = (lo + start * third)[keep]
        width = 2.0 * third
    if lo.size == 0:
        return []
    scores = _quotient_jumps(nc, lo, width, 1)[:, 0]
    found = np.mod(lo[scores > gap_threshold] + 0.5 * width, total)
    found = np.where(total - found < SCAN_DEDUPE, 0.0, found)
    corners: list[float] = []
    for s in np.sort(found):
        if not corners or s - corners[-1] > SCAN_DEDUPE:
            corners.append(float(s))
    logger.debug("scan of %r found %s corners: %s", nc, len(corners), corners)
    return corners


def chord_mate(nc: NaturalCurve, x: ArrayLike, direction: ArrayLike) -> ChordMate:
    """Second intersection of ``x + R direction`` with the sphere of ``nc``.

    :raises NotOnSphere: If ``x`` is off the sphere
    """
    return nc.space.norm.chord_mate(x, direction)


def lemma_a_check(nc: NaturalCurve, a: float, b: float) -> LemmaAReport:
    """Measure the one-sided slopes of ``nu(e) = ||r(b + e) - r(a)||`` at 0.

    With ``s`` the parameter of the chord direction of ``r(b) - r(a)`` and
    ``r'(b) = x r(s) + y r'_avg(s)``, the predicted slopes are
    ``x - jr y / (1 + jt)`` from the right and ``x + jr y / (1 - jt)`` from
    the left, with the jumps taken at ``s``. Difference quotients at steps
    1e-3, 1e-4 and 1e-5 are measured and the two finest are extrapolated.

    :raises CoincidentPoints: If ``r(a)`` and ``r(b)`` coincide
    :raises NotDifferentiableAtB: If the derivative gap at ``b`` exceeds 1e-6
    :raises WrongOrientation: If ``r'(b)`` has no positive ``r'_avg(s)`` part
    :return: The comparison report
    :rtype: LemmaAReport
    """
    norm = nc.space.norm
    pa, (pb, pair_b) = nc.natural_point(a), nc.natural_frame(b)
    chord = pb - pa
    if np.linalg.norm(chord) < 1e-12:
        raise CoincidentPoints(f"r({a!r}) and r({b!r}) coincide")
    gap = float(norm.gauge(pair_b.difference))
    if gap > DIFFERENTIABLE_GAP:
        raise NotDifferentiableAtB(f"derivative gap {gap!r} at b={b!r}")
    s = float(nc.parameter_of(norm.scale_to_sphere(chord)))
    point_s, pair_s = nc.natural_frame(s)
    jump = _jumps_of(point_s, pair_s)
    x, y = (float(c) for c in coordinates_in(point_s, pair_s.avg, pair_b.avg))
    if not y > 0.0:
        raise WrongOrientation(f"r'(b) has y = {y!r} along r'_avg({s!r}), b={b!r}")
    predicted_right = x - jump.jr * y / (1.0 + jump.jt)
    predicted_left = x + jump.jr * y / (1.0 - jump.jt)

    steps = np.array(CHORD_STEPS)
    moved = nc.natural_point(b + np.concatenate([steps, -steps]))
    nu = np.asarray(norm.gauge(moved - pa))
    base = float(norm.gauge(chord))
    right = (nu[: steps.size] - base) / steps
    left = (base - nu[steps.size :]) / steps
    measurements = tuple(
        SlopeMeasurement(float(lq), float(rq), base, float(e))
        for lq, rq, e in zip(left, right, steps, strict=True)
    )
    # errors are O(eps): one Richardson level from 1e-3 and 1e-4
    extrapolated = SlopeMeasurement(
        float((10.0 * left[1] - left[0]) / 9.0),
        float((10.0 * right[1] - right[0]) / 9.0),
        base,
        float(steps[1]),
    )
    report = LemmaAReport(
        a, b, s, x, y, jump, predicted_left, predicted_right, measurements, extrapolated
    )
    logger.debug(
        "chord a=%.17g b=%.17g s=%.17g: predicted (%.6g, %.6g) measured (%.6g, %.6g)",
        a,
        b,
        s,
        predicted_left,
        predicted_right,
        extrapolated.left_slope,
        extrapolated.right_slope,
    )
    return report


def _richardson_limit(values) -> float:
    """Limit of f(e) = f0 + c1 e + c2 e^2 from steps e, e/2, e/4."""
    f1, f2, f4 = values
    first = 2.0 * f2 - f1
    second = 2.0 * f4 - f2
    return float((4.0 * second - first) / 3.0)


def lemma_jj_limits(nc: NaturalCurve, force: bool = False) -> tuple[float, float]:
    """Read the jumps at the corner ``r(0)`` off chord lengths.

    With ``x = r(e)`` and ``xbar`` its chord mate along ``e1`` the limits
    ``||x - r(0)|| / ||xbar + r(0)||`` and ``(||x - xbar|| - 2) / (2 e)``
    equal ``(1 - jt) / (1 + jt)`` and ``jr / (1 - jt)`` at 0. Steps 1e-3,
    5e-4 and 2.5e-4 are extrapolated to second order.

    :param nc: Curve rebased so that ``e1 = r(0)`` is a corner
    :type nc: NaturalCurve
    :param force: Skip the corner test at 0
    :type force: bool
    :raises NotACorner: If the derivative gap at 0 is at most 1e-6
    :return: ``(ratio_limit, slope_limit)``
    """
    if not force:
        gap = float(jump_gap(nc, 0.0))
        if gap <= DIFFERENTIABLE_GAP:
            raise NotACorner(f"derivative gap at 0 is {gap!r}")
    norm = nc.space.norm
    e1 = nc.space.e1
    origin = nc.natural_point(0.0)
    steps = np.array(LIMIT_STEPS)
    points = nc.natural_point(steps)
    mates = np.array([norm.chord_mate(x, e1).point for x in points])
    near = np.asarray(norm.gauge(points - origin))
    ratios = near / np.asarray(norm.gauge(mates + origin))
    slopes = (np.asarray(norm.gauge(points - mates)) - 2.0) / (2.0 * steps)
    limits = _richardson_limit(ratios), _richardson_limit(slopes)
    logger.debug("jump limits at 0: ratio %.17g slope %.17g", *limits)
    return limits


def jumps_from_limits(ratio: float, slope: float) -> JumpData:
    """Invert ``ratio = (1-jt)/(1+jt)`` and ``slope = jr/(1-jt)``."""
    jt = (1.0 - ratio) / (1.0 + ratio)
    return JumpData(slope * (1.0 - jt), jt)


def chord_partner(nc: NaturalCurve, s: float) -> float:
    """Parameter ``sbar`` of the chord mate of ``r(s)`` along ``e1``."""
    mate = nc.space.norm.chord_mate(nc.natural_point(s), nc.space.e1)
    return float(nc.parameter_of(mate.point))


def _one_sided_slope(func, step: float) -> float:
    """Right (step > 0) or left (step < 0) slope of func at 0, extrapolated."""
    f0 = func(0.0)
    full = (func(step) - f0) / step
    half = (func(0.5 * step) - f0) / (0.5 * step)
    return 2.0 * half - full


def lemma_xy_recovery(nc: NaturalCurve, s: float, sbar: float) -> RecoveredDerivatives:
    """Recover ``r'(s)`` and ``r'(sbar)`` from distances on the sphere alone.

    The chord ``r(s) - r(sbar)`` must point along ``e1 = r(0)``, a corner.
    The jumps at 0 come from :func:`lemma_jj_limits`. The one-sided slopes
    of ``||r(s + e) - r(sbar)||`` give ``(x, y)``; the ratio of the steps at
    both chord ends gives ``ybar = -y / ratio`` and the slope of the moving
    chord ``||r(s + e) - r(sbar + ebar)||`` gives ``xbar``. Coordinates are
    taken in the basis ``(r(0), r'_avg(0))``.

    :raises BadChordAlignment: If the chord is not a positive multiple of
        ``e1`` within 1e-8, or ``r(s)`` is ``+-e1``
    :raises SingularSystem: If the recovered ``jr`` is above -1e-4
    :return: ``(x, y, xbar, ybar)``
    :rtype: RecoveredDerivatives
    """
    norm = nc.space.norm
    e1 = nc.space.e1
    ps, psbar = nc.natural_point(s), nc.natural_point(sbar)
    chord = ps - psbar
    length = float(np.linalg.norm(chord))
    if min(np.linalg.norm(ps - e1), np.linalg.norm(ps + e1)) < ALIGNMENT_TOLERANCE:
        raise BadChordAlignment(f"r({s!r}) is an endpoint of the e1 axis")
    skew = abs(float(det2(chord, e1))) / float(np.linalg.norm(e1))
    if length == 0.0 or skew > ALIGNMENT_TOLERANCE * length or np.dot(chord, e1) <= 0:
        raise BadChordAlignment(f"r({s!r}) - r({sbar!r}) is not along +e1")

    jump = jumps_from_limits(*lemma_jj_limits(nc, force=True))
    if jump.jr > SINGULAR_JUMP:
        raise SingularSystem(f"recovered jr = {jump.jr!r} makes the system singular")
    a_coef = jump.jr / (1.0 + jump.jt)
    b_coef = jump.jr / (1.0 - jump.jt)
    base = float(norm.gauge(chord))

    def to_fixed(e: float) -> float:
        return float(norm.gauge(nc.natural_point(s + e) - psbar))

    right = _one_sided_slope(to_fixed, RECOVERY_STEP)
    left = _one_sided_slope(to_fixed, -RECOVERY_STEP)
    # right = x - a y, left = x + b y
    y = (left - right) / (a_coef + b_coef)
    x = right + a_coef * y

    eps = np.array([RECOVERY_STEP, -RECOVERY_STEP])
    moved = nc.natural_point(s + eps)
    mates = np.array([norm.chord_mate(p, e1).point for p in moved])
    ratio = float(
        np.mean(
            np.asarray(norm.gauge(mates - psbar)) / np.asarray(norm.gauge(moved - ps))
        )
    )
    ybar = -y / ratio
    spans = np.asarray(norm.gauge(moved - mates)) - base
    m3 = float((spans[0] - spans[1]) / (2.0 * RECOVERY_STEP))
    xbar = (x - m3) * ybar / y
    recovered = RecoveredDerivatives(float(x), float(y), float(xbar), float(ybar))
    if not recovered.signs_ok:
        logger.warning("recovered derivatives have wrong signs: %s", recovered)
    return recovered


def _sphere_offset(nc: NaturalCurve, beta: float, eps: float, sign: float) -> float:
    """Smallest ``t >= 0`` with ``||r(beta + sign t) - r(beta)|| = eps``."""
    norm = nc.space.norm
    centre = nc.natural_point(beta)

    def excess(t: float) -> float:
        return float(norm.gauge(nc.natural_point(beta + sign * t) - centre)) - eps

    if excess(eps) >= 0.0:
        return eps
    hi = 1.5 * eps
    while excess(hi) <= 0.0:
        hi *= 2.0
    return brentq(excess, eps, hi, xtol=1e-14)


def smoothness_probe(
    nc: NaturalCurve,
    point: ArrayLike,
    mode: ProbeMode | str,
    cfg: SmoothnessProbeConfig | None = None,
    options: ChordOptions | None = None,
) -> bool:
    """Decide from distances alone whether ``point`` is a corner.

    ``ns``: for every step e of the schedule some ``x`` near ``point`` and
    ``y`` near ``-point``, both at parameter offset ``0.999 e``, satisfy
    ``||x - y|| < 2 - delta e``.

    ``sd``: with ``b - a = ||b - a|| point`` and ``x, y`` the two sphere
    points at distance e from ``b``, every step satisfies
    ``||x - a|| + ||y - a|| > 2 ||b - a|| + delta e``.

    :param nc: Natural curve
    :param point: Sphere point to classify
    :param mode: ``ns`` or ``sd``
    :param cfg: Margin and step schedule, defaults to SmoothnessProbeConfig()
    :param options: Chord ends ``a`` and ``b``, required by ``sd``
    :raises InvalidConfig: If ``sd`` lacks options, the chord is not along
        ``point`` or ``r`` is not differentiable at ``b``
    :raises NotOnSphere: If ``point`` is off the sphere
    :return: True when the point is classified as non-smooth
    """
    mode = ProbeMode(mode)
    cfg = cfg or SmoothnessProbeConfig()
    norm = nc.space.norm
    point = as_vector(point, "point").reshape(2)
    if abs(float(norm.gauge(point)) - 1.0) > SPHERE_TOLERANCE:
        raise NotOnSphere(f"point {point.tolist()} is off the sphere")
    if mode is ProbeMode.NS:
        sp = float(nc.parameter_of(point))
        half = 0.5 * nc.total_length
        for eps in cfg.eps_schedule:
            offsets = PROBE_SHRINK * eps * np.array([1.0, -1.0])
            near = nc.natural_point(sp + offsets)
            far = nc.natural_point(sp + half + offsets)
            spans = np.asarray(norm.gauge(near[:, None, :] - far[None, :, :]))
            if not np.min(spans) < 2.0 - cfg.delta * eps:
                return False
        return True

    if options is None:
        raise InvalidConfig("the sd criterion needs chord ends a and b")
    a = as_vector(options.a, "a").reshape(2)
    b = as_vector(options.b, "b").reshape(2)
    chord = b - a
    length = float(norm.gauge(chord)) if np.any(chord) else 0.0
    if length == 0.0 or float(np.max(np.abs(chord - length * point))) > 1e-8:
        raise InvalidConfig("b - a must be a positive multiple of the probed point")
    beta = float(nc.parameter_of(b))
    if float(jump_gap(nc, beta)) > DIFFERENTIABLE_GAP:
        raise InvalidConfig(f"the curve is not differentiable at b (s={beta!r})")
    for eps in cfg.eps_schedule:
        x = nc.natural_point(beta + _sphere_offset(nc, beta, eps, 1.0))
        y = nc.natural_point(beta - _sphere_offset(nc, beta, eps, -1.0))
        total = float(norm.gauge(x - a)) + float(norm.gauge(y - a))
        if not total > 2.0 * length + cfg.delta * eps:
            return False
    return True
