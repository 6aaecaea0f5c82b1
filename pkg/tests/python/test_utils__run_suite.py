"""Tests that every lemma suite passes on the fixtures it applies to."""

import pytest
from conftest import load_curve
from normsphere.utils.checks import run_suite

ALL_FIXTURES = [
    "euclid",
    "l1",
    "pnorm4",
    "hexagon",
    "lens0",
    "lens02",
    "double_lens",
    "lens02_transform",
]
LENSES = ["lens0", "lens01", "lens-01", "lens02", "lens-02"]

CASES = (
    [(lemma, name) for lemma in ("p", "d", "j") for name in ALL_FIXTURES]
    + [("a", name) for name in ["euclid", "lens0", "lens02", "lens-02", "double_lens"]]
    + [("jj", name) for name in [*LENSES, "double_lens"]]
    + [("xy", name) for name in LENSES]
    + [("intrinsic", name) for name in ["euclid", "lens02", "double_lens"]]
    + [("ns", name) for name in ["euclid", "lens0", "double_lens"]]
    + [("sd", name) for name in ["lens0", "lens02"]]
)


@pytest.mark.parametrize(("lemma", "name"), CASES)
def test_suite_passes_on_fixture(lemma, name):
    """Test that a suite produces rows and that none of them fails."""
    rows = run_suite(lemma, load_curve(name), name)

    assert rows
    failed = [row for row in rows if not row.passed]
    assert failed == []


def test_corner_suites_cover_every_corner():
    """Test that the ns suite reports each double lens corner as a corner."""
    curve = load_curve("double_lens")

    rows = run_suite("ns", curve, "double_lens")

    corners = [row for row in rows if row.predicted]
    assert len(corners) == curve.kink_arc_parameters().size
    assert len(rows) > len(corners)
