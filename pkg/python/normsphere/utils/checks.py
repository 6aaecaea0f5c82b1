"""Numerical checks of the sphere lemmas and the protocol that runs them.

Every suite takes a natural curve and a fixture name and returns
:class:`~normsphere.structs.report.CheckRow` records; suites that do not apply
to a fixture (no corner, or a flat sphere) return no rows.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ..errors import NotDifferentiableAtB
from ..jumps import (
    coordinates_in,
    jump_gap,
    jumps,
    lemma_a_check,
    lemma_jj_limits,
    lemma_xy_recovery,
    nonsmooth_scan,
    smoothness_probe,
)
from ..norms import build_from_spec
from ..oracles import intrinsic_distance_oracle
from ..parameterization import BasedSpace, NaturalCurve
from ..spec_file import load_spec
from ..structs.probe_config import ChordOptions, ProbeMode
from ..structs.report import CheckRow, Report, format_parameters

logger = logging.getLogger(__name__)

CORNER_CLEARANCE = 5e-2
SMOOTH_PROBES = 64
CHORDS = 16
INTRINSIC_PAIRS = 32
DIF_SLOPE_TOLERANCE = 1e-3
DIF_GAP_TOLERANCE = 1e-4

Suite = Callable[[NaturalCurve, str], list[CheckRow]]


def _bound_row(
    lemma: str,
    fixture: str,
    parameters: str,
    value,
    bound: float,
    slack: float = 0.0,
    strict: bool = False,
) -> CheckRow:
    """Row for ``value <= bound + slack`` (or ``<`` when strict) carrying the
    excess as error."""
    value = float(value)
    excess = max(value - bound, 0.0)
    return CheckRow(
        lemma,
        fixture,
        parameters,
        value,
        float(bound),
        excess,
        excess / max(abs(bound), 1.0),
        bool(value < bound + slack if strict else value <= bound + slack),
    )


def _corner_distance(nc: NaturalCurve, s) -> np.ndarray:
    """Arc distance from each ``s`` to the nearest known corner."""
    kinks = nc.kink_arc_parameters()
    s = np.asarray(s, dtype=np.float64)
    if kinks.size == 0:
        return np.full(s.shape, np.inf)
    total = nc.total_length
    offset = np.mod(s[..., None] - kinks + 0.5 * total, total) - 0.5 * total
    return np.min(np.abs(offset), axis=-1)


def _clear_parameters(nc: NaturalCurve, count: int, rng) -> np.ndarray:
    """``count`` random parameters at least CORNER_CLEARANCE from every corner."""
    found: list[float] = []
    while len(found) < count:
        s = rng.uniform(0.0, nc.total_length, 4 * count)
        found.extend(s[_corner_distance(nc, s) > CORNER_CLEARANCE].tolist())
    return np.array(found[:count])


def check_polar_bounds(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Antipodality of ``p`` and the two-sided bounds on increments and speed."""
    space, polar = nc.space, nc.polar
    gauge = space.norm.gauge
    c, C = space.c, space.C
    upper = 2.0 * C**2 / c**2
    t = np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False)
    antipodal = np.max(gauge(polar.polar_point(t + np.pi) + polar.polar_point(t)))
    rows = [_bound_row("p", fixture, "check=antipodal", antipodal, 0.0, 1e-10)]

    tt, ee = np.meshgrid(
        np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False), np.linspace(-1.0, 1.0, 64)
    )
    step = np.asarray(gauge(polar.polar_point(tt + ee) - polar.polar_point(tt)))
    below = np.max((c / C) * np.abs(np.sin(ee)) - step)
    above = np.max(step - upper * np.abs(ee))
    rows.append(_bound_row("p", fixture, "check=increment_lower", below, 0.0, 1e-9))
    rows.append(_bound_row("p", fixture, "check=increment_upper", above, 0.0, 1e-9))

    pair = polar.polar_derivatives(np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False))
    speeds = np.concatenate([gauge(pair.minus), gauge(pair.plus)])
    lowest = c / C - np.min(speeds)
    rows.append(_bound_row("p", fixture, "check=speed_lower", lowest, 0.0, 1e-9))
    fastest = np.max(speeds)
    rows.append(_bound_row("p", fixture, "check=speed_upper", fastest, upper, 1e-6))
    return rows


def check_chord_arc_ratio(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """``||r(s + e) - r(s)|| / e`` tends to 1 at 32 parameters."""
    gauge = nc.space.norm.gauge
    s = np.linspace(0.0, nc.total_length, 32, endpoint=False)
    base = nc.natural_point(s)
    rows = []
    for eps, tol in ((1e-4, 1e-2), (1e-6, 1e-3)):
        ratio = np.asarray(gauge(nc.natural_point(s + eps) - base)) / eps
        for sk, rk in zip(s, ratio, strict=True):
            params = format_parameters(s=sk, eps=eps)
            rows.append(CheckRow.compare("d", fixture, params, rk, 1.0, tol))
    return rows


def _corner_chord(nc: NaturalCurve, corner: float, b: float) -> float | None:
    """Parameter ``a`` with ``r(b) - r(a)`` along the corner ``r(corner)``."""
    norm = nc.space.norm
    mate = norm.chord_mate(nc.natural_point(b), nc.natural_point(corner))
    if mate.degenerate:
        return None
    return float(nc.parameter_of(mate.vector))


def check_chord_slopes(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """One-sided slopes of chord lengths against the jump prediction.

    Half the chords point along a corner when the sphere has one. Every chord
    also yields a ``dif`` row: equal slopes exactly when the chord direction
    is a smooth point.
    """
    if not nc.space.norm.strictly_convex:
        logger.info("%s: sphere has flat pieces, chord slopes skipped", fixture)
        return []
    rng = np.random.default_rng(0)
    kinks = nc.kink_arc_parameters()
    pairs: list[tuple[float, float]] = []
    b_values = _clear_parameters(nc, 4 * CHORDS, rng)
    for k, b in enumerate(b_values):
        if len(pairs) >= CHORDS // 2 or kinks.size == 0:
            break
        a = _corner_chord(nc, float(kinks[k % kinks.size]), float(b))
        if a is not None:
            pairs.append((a, float(b)))
    a_values = _clear_parameters(nc, 4 * CHORDS, rng)
    for a, b in zip(a_values, b_values[::-1], strict=True):
        if len(pairs) >= CHORDS:
            break
        if abs(a - b) <= CORNER_CLEARANCE:
            continue
        chord = nc.natural_point(b) - nc.natural_point(a)
        s = nc.parameter_of(nc.space.norm.scale_to_sphere(chord))
        if 1e-6 < float(_corner_distance(nc, s)) < CORNER_CLEARANCE:
            continue
        pairs.append((float(a), float(b)))

    gauge = nc.space.norm.gauge
    rows = []
    for a, b in pairs:
        try:
            report = lemma_a_check(nc, a, b)
        except NotDifferentiableAtB:
            continue
        params = format_parameters(a=a, b=b, s=report.s)
        predicted = report.predicted_left - report.predicted_right
        rows.append(
            CheckRow(
                "a",
                fixture,
                params,
                report.measured_split,
                predicted,
                abs(report.measured_split - predicted),
                max(report.left_error, report.right_error),
                report.passed(),
            )
        )
        equal_slopes = abs(report.measured_split) < DIF_SLOPE_TOLERANCE
        smooth = float(gauge(nc.natural_derivatives(report.s).difference))
        rows.append(
            CheckRow.flag(
                "a",
                fixture,
                params + ";check=dif",
                equal_slopes,
                smooth < DIF_GAP_TOLERANCE,
            )
        )
    return rows


def _first_corner_curve(nc: NaturalCurve) -> NaturalCurve | None:
    kinks = nc.kink_arc_parameters()
    if kinks.size == 0:
        return None
    return nc.rebased_at(float(kinks[0]))


def check_jump_limits(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Jumps at a corner read off chord lengths against the derivative jumps."""
    corner = _first_corner_curve(nc)
    if corner is None:
        return []
    ratio, slope = lemma_jj_limits(corner)
    direct = jumps(corner, 0.0)
    return [
        CheckRow.compare(
            "jj",
            fixture,
            "limit=ratio",
            ratio,
            (1.0 - direct.jt) / (1.0 + direct.jt),
            1e-3,
        ),
        CheckRow.compare(
            "jj", fixture, "limit=slope", slope, direct.jr / (1.0 - direct.jt), 1e-3
        ),
    ]


def check_xy_recovery(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Derivatives at both ends of eight chords along a corner, from distances."""
    corner = _first_corner_curve(nc)
    if corner is None or not nc.space.norm.strictly_convex:
        return []
    norm = corner.space.norm
    e1 = corner.space.e1
    point0, pair0 = corner.natural_frame(0.0)
    half = corner.half_length()
    rows = []
    for k in range(8):
        s = half * (0.08 + 0.05 * k)
        mate = norm.chord_mate(corner.natural_point(s), e1)
        if mate.degenerate:
            continue
        sbar = float(corner.parameter_of(mate.vector))
        if mate.offset > 0:
            s, sbar = sbar, s
        recovered = lemma_xy_recovery(corner, s, sbar)
        direct_s = coordinates_in(point0, pair0.avg, corner.natural_derivatives(s).avg)
        direct_sbar = coordinates_in(
            point0, pair0.avg, corner.natural_derivatives(sbar).avg
        )
        expected = (*direct_s, *direct_sbar)
        for name, got, want in zip(
            ("x", "y", "xbar", "ybar"), recovered.as_tuple(), expected, strict=True
        ):
            params = format_parameters(s=s, sbar=sbar, coordinate=name)
            rows.append(CheckRow.compare("xy", fixture, params, got, want, 1e-3))
    return rows


def _probe_rows(
    nc: NaturalCurve, fixture: str, lemma: str, corners: Sequence[float], probe
) -> list[CheckRow]:
    rows = []
    candidates = np.linspace(0.0, nc.total_length, SMOOTH_PROBES, endpoint=False)
    smooth = candidates[_corner_distance(nc, candidates) > 1e-2]
    if corners:
        scanned = np.array(corners)
        total = nc.total_length
        offset = np.mod(smooth[:, None] - scanned + 0.5 * total, total) - 0.5 * total
        smooth = smooth[np.min(np.abs(offset), axis=-1) > 1e-2]
    for s, expected in [(c, True) for c in corners] + [(s, False) for s in smooth]:
        measured = probe(float(s))
        if measured is None:
            continue
        params = format_parameters(s=s)
        rows.append(CheckRow.flag(lemma, fixture, params, measured, expected))
    return rows


def check_ns_probe(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """The distance criterion for corners agrees with the derivative scan."""
    corners = nonsmooth_scan(nc, 1024, 1e-3)

    def probe(s: float) -> bool:
        return smoothness_probe(nc, nc.natural_point(s), ProbeMode.NS)

    return _probe_rows(nc, fixture, "ns", corners, probe)


def check_sd_probe(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """The chord-sum criterion for corners agrees with the derivative scan.

    For each probed direction ``c`` a chord ``b - a`` along ``c`` is sought
    among a few positions of ``b`` away from the corners.
    """
    if not nc.space.norm.strictly_convex:
        return []
    norm = nc.space.norm
    corners = nonsmooth_scan(nc, 1024, 1e-3)
    starts = nc.total_length * (np.arange(1, 16) / 16.0 + 1.0 / 64.0)
    starts = starts[_corner_distance(nc, starts) > CORNER_CLEARANCE]

    def probe(s: float) -> bool | None:
        c = nc.natural_point(s)
        for beta in starts:
            b = nc.natural_point(beta)
            mate = norm.chord_mate(b, c)
            if mate.degenerate or mate.offset >= 0:
                continue
            if float(jump_gap(nc, beta)) > 1e-6:
                continue
            return smoothness_probe(
                nc, c, ProbeMode.SD, options=ChordOptions.of(mate.vector, b)
            )
        return None

    return _probe_rows(nc, fixture, "sd", corners, probe)


def check_jump_signs(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Radial jumps are never positive, tangential ones stay inside (-1, 1),
    and the radial jump vanishes exactly where the derivative gap does."""
    grid = np.linspace(0.0, nc.total_length, 128, endpoint=False)
    s = np.concatenate([grid, nc.kink_arc_parameters()])
    data = jumps(nc, s)
    jr, jt = np.asarray(data.jr), np.asarray(data.jt)
    gap = np.asarray(jump_gap(nc, s))
    tangential = float(np.max(np.abs(jt)))
    disagreements = int(np.sum((np.abs(jr) < 1e-6) != (gap < 1e-6)))
    return [
        _bound_row("j", fixture, "check=radial_sign", np.max(jr), 0.0, 1e-8),
        _bound_row(
            "j", fixture, "check=tangential_bound", tangential, 1.0, strict=True
        ),
        CheckRow.compare("j", fixture, "check=gap_coupling", disagreements, 0, 0.0),
    ]


def check_intrinsic_distance(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Chord-sum distance on the upper half-sphere equals the parameter gap."""
    rng = np.random.default_rng(1)
    half = nc.half_length()
    pairs = rng.uniform(0.0, half, (INTRINSIC_PAIRS, 2))
    rows = []
    for s1, s2 in pairs:
        measured = intrinsic_distance_oracle(
            nc, nc.natural_point(s1), nc.natural_point(s2)
        )
        params = format_parameters(s1=s1, s2=s2)
        rows.append(
            CheckRow.compare("intrinsic", fixture, params, measured, abs(s1 - s2), 1e-5)
        )
    return rows


def check_derivative_continuity(nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """``r'`` is continuous away from corners."""
    s = np.linspace(0.0, nc.total_length, SMOOTH_PROBES, endpoint=False)
    s = s[_corner_distance(nc, s) > 1e-2]
    right = nc.natural_derivatives(s).plus
    left = nc.natural_derivatives(s + 1e-6).minus
    jump = np.max(np.asarray(nc.space.norm.gauge(right - left)))
    return [_bound_row("r5", fixture, "step=1e-06", jump, 0.0, 1e-4)]


SUITES: dict[str, Suite] = {
    "p": check_polar_bounds,
    "d": check_chord_arc_ratio,
    "a": check_chord_slopes,
    "jj": check_jump_limits,
    "xy": check_xy_recovery,
    "ns": check_ns_probe,
    "sd": check_sd_probe,
    "j": check_jump_signs,
    "intrinsic": check_intrinsic_distance,
    "r5": check_derivative_continuity,
}


def run_suite(lemma: str, nc: NaturalCurve, fixture: str) -> list[CheckRow]:
    """Run one suite by name.

    :raises ValueError: If the lemma name is unknown
    """
    if lemma not in SUITES:
        raise ValueError(f"Invalid lemma: {lemma}. Valid lemmas are: {list(SUITES)}")
    return SUITES[lemma](nc, fixture)


def curve_for_spec(path: str | Path) -> NaturalCurve:
    """Natural curve of the norm in a spec file, with the default basis."""
    return NaturalCurve(BasedSpace.create(build_from_spec(load_spec(path))))


def run_check_protocol(
    spec_paths: Sequence[str],
    lemmas: Sequence[str],
    output_file: str = "",
    log_level: str = "INFO",
    threads: int = 1,
) -> Report:
    """Run lemma suites on every spec file and log one line per check.

    :param spec_paths: Paths of ``.norm`` files
    :param lemmas: Suite names, see :data:`SUITES`
    :param output_file: Optional path of the CSV report
    :param log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    :param threads: Worker threads over spec files
    :raises ValueError: On an unknown log level or lemma
    :return: The report with every check row

    Note: Set log_level to "WARNING" or higher to suppress terminal output.
    """
    numeric_level = getattr(logging, log_level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Invalid log level: {log_level}")
    logging.basicConfig(level=numeric_level, format="%(message)s")
    log = logging.getLogger()
    for lemma in lemmas:
        if lemma not in SUITES:
            valid = list(SUITES)
            raise ValueError(f"Invalid lemma: {lemma}. Valid lemmas are: {valid}")

    def fixture_rows(path: str) -> list[CheckRow]:
        nc = curve_for_spec(path)
        fixture = Path(path).name
        return [row for lemma in lemmas for row in run_suite(lemma, nc, fixture)]

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        rows = [row for batch in pool.map(fixture_rows, spec_paths) for row in batch]

    log.info("\t".join(["Check", "Status", "Lemma", "Fixture", "Parameters"]))
    num_checks = len(rows)
    num_passed = 0
    for count, row in enumerate(rows, start=1):
        num_passed += row.passed
        log.info(
            "%s/%s\t%s\t%s\t%s\t%s",
            count,
            num_checks,
            "PASS" if row.passed else "FAIL",
            row.lemma,
            row.fixture,
            row.parameters,
        )

    report = Report.from_check_rows(rows)
    if output_file:
        report.to_csv(output_file)

    log.info(
        "Summary: %s passed, %s failed out of %s checks.",
        num_passed,
        num_checks - num_passed,
        num_checks,
    )
    return report
