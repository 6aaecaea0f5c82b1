"""Command-line front end.

Every verb loads one or more ``.norm`` files, runs one library workflow per
file and writes a CSV report (17 significant digits, ``\\n`` line endings) to
``--out`` or standard output. Exit codes: 0 when every check passes, 1 on a
failed check or a domain error, 2 on a usage or spec file error, 3 on an
internal error.

Example::

    normsphere half-length --spec tests/fixtures/euclid.norm
    normsphere reconstruct --spec lens02.norm --matrix 2,1,0,1 --out run.csv
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import CheckFailure, NormSphereError, ParseError
from .isometry import (
    SphereMap,
    TwoCornerReconstruction,
    build_extension_p2,
    find_regular_special_pair,
    sphere_map_from_linear,
    verify_extension,
)
from .jumps import jump_gap, jumps, nonsmooth_scan
from .norms import Norm2D, build_from_spec
from .oracles import polyline_arclength_oracle
from .parameterization import BasedSpace, NaturalCurve
from .spec_file import load_spec
from .structs.extension import EXTENSION_FIELDS, ExtensionResult, StageOutcome
from .structs.linear_map import LinearMap2x2
from .structs.report import CHECK_FIELDS, Report
from .utils.checks import SUITES, run_suite

logger = logging.getLogger(__name__)

VERBS = (
    "validate",
    "param-table",
    "half-length",
    "jumps",
    "nonsmooth",
    "check",
    "extend",
    "reconstruct",
    "oracle",
)
COMMON_OPTIONS = {"out", "threads", "log_level"}
VERB_OPTIONS: dict[str, set[str]] = {
    "validate": {"samples", "threshold"},
    "param-table": {"samples", "table"},
    "half-length": set(),
    "jumps": {"samples"},
    "nonsmooth": {"samples", "threshold"},
    "check": {"lemma"},
    "extend": {"matrix", "samples", "threshold", "sampled"},
    "reconstruct": {"matrix", "threshold", "sampled"},
    "oracle": {"samples", "threshold"},
}


@dataclass(frozen=True)
class Command:
    """A verb, the spec files it runs on and its options.

    :raises ParseError: On an unknown verb, an option the verb does not take
        or an empty spec list
    """

    verb: str
    spec_paths: tuple[str, ...]
    options: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.verb not in VERB_OPTIONS:
            raise ParseError(f"unknown verb {self.verb!r}")
        if not self.spec_paths:
            raise ParseError(f"{self.verb} needs at least one --spec")
        allowed = VERB_OPTIONS[self.verb] | COMMON_OPTIONS
        for name in self.options:
            if name not in allowed:
                flag = name.replace("_", "-")
                raise ParseError(f"{self.verb} does not take --{flag}")

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "Command":
        options = {
            name: value
            for name, value in vars(args).items()
            if name not in ("verb", "spec") and value is not None
        }
        return cls(args.verb, tuple(args.spec), options)

    def option(self, name: str, default=None):
        value = self.options.get(name)
        return default if value is None else value


def _norm(path: str) -> Norm2D:
    return build_from_spec(load_spec(path))


def _curve(path: str) -> NaturalCurve:
    return NaturalCurve(BasedSpace.create(_norm(path)))


def _name(path: str) -> str:
    return Path(path).name


def _validate(cmd: Command, path: str) -> list[tuple]:
    norm = _norm(path)
    axioms = norm.validate_axioms(int(cmd.option("samples", 256)))
    threshold = float(cmd.option("threshold", 1e-8))
    return [
        (
            _name(path),
            norm.spec.describe(),
            norm.strictly_convex,
            norm.smooth,
            axioms.homogeneity,
            axioms.symmetry,
            axioms.triangle,
            axioms.convexity,
            axioms.passed(threshold),
        )
    ]


def _param_table(cmd: Command, path: str) -> list[tuple]:
    nc = _curve(path)
    count = int(cmd.option("samples", 64))
    name = _name(path)
    if cmd.option("table", "natural") == "polar":
        t = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        points = nc.polar.polar_point(t)
        s = np.asarray(nc.arc_length(t))
        return [
            (name, tk, pk[0], pk[1], sk)
            for tk, pk, sk in zip(t, points, s, strict=True)
        ]
    s = np.linspace(0.0, nc.total_length, count, endpoint=False)
    points, pair = nc.natural_frame(s)
    return [
        (name, sk, pk[0], pk[1], mk[0], mk[1], qk[0], qk[1])
        for sk, pk, mk, qk in zip(s, points, pair.minus, pair.plus, strict=True)
    ]


def _half_length(cmd: Command, path: str) -> list[tuple]:
    return [(_name(path), _curve(path).half_length())]


def _jumps(cmd: Command, path: str) -> list[tuple]:
    nc = _curve(path)
    count = int(cmd.option("samples", 128))
    s = np.linspace(0.0, nc.total_length, count, endpoint=False)
    data = jumps(nc, s)
    gap = np.asarray(jump_gap(nc, s))
    name = _name(path)
    return [
        (name, sk, jr, jt, gk)
        for sk, jr, jt, gk in zip(
            s, np.asarray(data.jr), np.asarray(data.jt), gap, strict=True
        )
    ]


def _nonsmooth(cmd: Command, path: str) -> list[tuple]:
    nc = _curve(path)
    corners = nonsmooth_scan(
        nc, int(cmd.option("samples", 1024)), float(cmd.option("threshold", 1e-3))
    )
    name = _name(path)
    if not corners:
        return []
    points = nc.natural_point(np.array(corners))
    return [
        (name, k, s, p[0], p[1])
        for k, (s, p) in enumerate(zip(corners, points, strict=True))
    ]


def _check(cmd: Command, path: str) -> list[tuple]:
    lemma = str(cmd.option("lemma"))
    return [row.values() for row in run_suite(lemma, _curve(path), _name(path))]


def _isometry(cmd: Command, path: str) -> tuple[SphereMap, NaturalCurve]:
    matrix = cmd.option("matrix")
    if matrix is None:
        raise ParseError(f"{cmd.verb} needs --matrix")
    try:
        A = LinearMap2x2.from_string(str(matrix))
    except ValueError as e:
        raise ParseError(f"bad --matrix: {e}") from None
    norm = _norm(path)
    f, _ = sphere_map_from_linear(A, norm)
    nc = NaturalCurve(BasedSpace.create(norm))
    rows = int(cmd.option("sampled", 0))
    if rows:
        f = SphereMap.sampled_from(f, rows, source_curve=nc)
    return f, nc


def _verified(result: ExtensionResult, threshold: float) -> ExtensionResult:
    deviation = result.deviation.max_deviation
    stage = StageOutcome("verify", bool(deviation <= threshold), deviation)
    return replace(result, stages=(*result.stages, stage))


def _extend(cmd: Command, path: str) -> list[tuple]:
    f, nc = _isometry(cmd, path)
    u, v = find_regular_special_pair(nc)
    L = build_extension_p2(f, u, v, curve=nc, samples=int(cmd.option("samples", 256)))
    passed = StageOutcome("p2", True, 0.0)
    result = ExtensionResult(L, verify_extension(f, L), (passed,))
    result = _verified(result, float(cmd.option("threshold", 1e-5)))
    return [(_name(path), *result.row())]


def _reconstruct(cmd: Command, path: str) -> list[tuple]:
    f, _ = _isometry(cmd, path)
    result = TwoCornerReconstruction(f).run()
    result = _verified(result, float(cmd.option("threshold", 1e-6)))
    return [(_name(path), *result.row())]


def _oracle(cmd: Command, path: str) -> list[tuple]:
    nc = _curve(path)
    N = int(cmd.option("samples", 1_000_000))
    oracle = polyline_arclength_oracle(nc.space.norm, nc.space, 0.0, np.pi, N)
    length = nc.half_length()
    error = abs(oracle - length)
    threshold = float(cmd.option("threshold", 1e-6))
    return [(_name(path), 0.0, np.pi, N, oracle, length, error, error <= threshold)]


Workflow = Callable[[Command, str], list[tuple]]

WORKFLOWS: dict[str, tuple[tuple[str, ...], Workflow]] = {
    "validate": (
        (
            "spec",
            "kind",
            "strictly_convex",
            "smooth",
            "homogeneity",
            "symmetry",
            "triangle",
            "convexity",
            "pass",
        ),
        _validate,
    ),
    "param-table": ((), _param_table),
    "half-length": (("spec", "half_length"), _half_length),
    "jumps": (("spec", "s", "jr", "jt", "gap"), _jumps),
    "nonsmooth": (("spec", "index", "s", "r1", "r2"), _nonsmooth),
    "check": (CHECK_FIELDS, _check),
    "extend": (("spec", *EXTENSION_FIELDS), _extend),
    "reconstruct": (("spec", *EXTENSION_FIELDS), _reconstruct),
    "oracle": (
        ("spec", "t0", "t1", "N", "oracle_length", "arc_length", "abs_err", "pass"),
        _oracle,
    ),
}
PARAM_TABLE_HEADERS = {
    "polar": ("spec", "t", "p1", "p2", "s"),
    "natural": ("spec", "s", "r1", "r2", "d-1", "d-2", "d+1", "d+2"),
}


def run(cmd: Command) -> tuple[Report, int]:
    """Run a command on all its spec files.

    Rows keep the order of ``cmd.spec_paths`` whatever the thread count.

    :param cmd: The command
    :type cmd: Command
    :raises ParseError: If a spec file is missing or malformed
    :raises NormSphereError: If a workflow fails
    :return: The report and the exit code, 0 iff the report passed
    :rtype: tuple[Report, int]
    """
    header, workflow = WORKFLOWS[cmd.verb]
    if cmd.verb == "param-table":
        header = PARAM_TABLE_HEADERS[str(cmd.option("table", "natural"))]
    threads = max(int(cmd.option("threads", 1)), 1)

    def rows_for(path: str) -> list[tuple]:
        logger.info("%s\t%s", cmd.verb, path)
        return workflow(cmd, path)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        batches = list(pool.map(rows_for, cmd.spec_paths))
    report = Report(header, [row for batch in batches for row in batch])
    return report, 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per verb."""
    parser = argparse.ArgumentParser(
        prog="normsphere",
        description="Geometry of unit spheres of two-dimensional normed spaces.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sub = verbs.add_parser(verb)
        sub.add_argument(
            "--spec", action="append", required=True, help="Path of a .norm file"
        )
        sub.add_argument("--out", help="CSV output path, standard output when omitted")
        sub.add_argument("--threads", type=int, help="Worker threads over spec files")
        sub.add_argument(
            "--log-level",
            default="WARNING",
            choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        )
        allowed = VERB_OPTIONS[verb]
        if "samples" in allowed:
            sub.add_argument("--samples", type=int, help="Sample or grid size")
        if "threshold" in allowed:
            sub.add_argument("--threshold", type=float, help="Pass tolerance")
        if "table" in allowed:
            sub.add_argument("--table", choices=["polar", "natural"])
        if "lemma" in allowed:
            sub.add_argument("--lemma", choices=list(SUITES), required=True)
        if "matrix" in allowed:
            sub.add_argument("--matrix", required=True, help="Entries a,b,c,d")
        if "sampled" in allowed:
            sub.add_argument(
                "--sampled", type=int, help="Tabulate the map with this many rows"
            )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``normsphere`` script.

    :param argv: Arguments without the program name, defaults to sys.argv
    :return: Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(message)s")
    try:
        cmd = Command.from_namespace(args)
        report, code = run(cmd)
        report.to_csv(cmd.option("out"))
        if code:
            raise CheckFailure(f"{cmd.verb}: at least one check failed")
    except ParseError as e:
        logger.error("error: %s", e)
        return 2
    except NormSphereError as e:
        logger.error("error: %s", e)
        return 1
    except Exception:
        logger.exception("internal error")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
