"""Tests for reading ``.norm`` spec files."""

import tempfile
from pathlib import Path

import pytest
from normsphere.errors import ParseError
from normsphere.spec_file import load_spec, parse_spec
from normsphere.structs.linear_map import LinearMap2x2
from normsphere.structs.norm_spec import NormSpec, SpecKind


def test_load_each_kind(fixtures_dir):
    """Test that every valid fixture parses to the expected spec."""
    assert load_spec(fixtures_dir / "euclid.norm") == NormSpec.pnorm(2.0)
    assert load_spec(fixtures_dir / "lens-02.norm") == NormSpec.lens(-0.2)
    assert load_spec(fixtures_dir / "double_lens.norm") == NormSpec.double_lens()
    square = NormSpec.polygon([(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert load_spec(fixtures_dir / "l1.norm") == square


def test_transform_base_is_relative_to_file(fixtures_dir):
    """Test that base= resolves next to the file naming it."""
    spec = load_spec(fixtures_dir / "lens02_transform.norm")

    assert spec.kind is SpecKind.TRANSFORM
    assert spec.base == NormSpec.lens(0.2)
    assert spec.matrix == LinearMap2x2(2.0, 1.0, 0.0, 1.0)


def test_comments_and_blank_lines():
    """Test that comments and blank lines are skipped."""
    text = "# heading\n\nkind = lens   # trailing\nbeta = 0.1\n"

    assert parse_spec(text) == NormSpec.lens(0.1)


@pytest.mark.parametrize(
    ("name", "key", "message"),
    [
        ("bad_kind.norm", "kind", "unknown kind"),
        ("missing_key.norm", "beta", "missing required key"),
        ("unknown_key.norm", "color", "unknown key"),
        ("duplicate_key.norm", "p", "duplicate key"),
        ("wrong_key.norm", "beta", "not allowed"),
        ("not_a_number.norm", "beta", "not a real number"),
        ("cycle_a.norm", "base", "include cycle"),
        ("missing_base.norm", "base", "base file not found"),
    ],
)
def test_invalid_files(fixtures_dir, name, key, message):
    """Test that each malformed file raises ParseError naming the key."""
    with pytest.raises(ParseError, match=message) as excinfo:
        load_spec(fixtures_dir / "invalid" / name)

    assert excinfo.value.key == key
    assert name in excinfo.value.path or "cycle" in excinfo.value.path


def test_error_carries_line_number(fixtures_dir):
    """Test that a misplaced key is reported with its line."""
    with pytest.raises(ParseError) as excinfo:
        load_spec(fixtures_dir / "invalid" / "unknown_key.norm")

    assert excinfo.value.line == 3
    assert ":3:" in str(excinfo.value)


def test_missing_file():
    """Test that a missing path raises ParseError."""
    with pytest.raises(ParseError, match="not found"):
        load_spec("does/not/exist.norm")


def test_line_without_equals():
    """Test that a bare word is rejected."""
    with pytest.raises(ParseError, match="expected key=value"):
        parse_spec("kind=pnorm\np 2\n")


def test_bad_matrix():
    """Test that a matrix with the wrong number of entries is rejected."""
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp) / "base.norm"
        base.write_text("kind=pnorm\np=2\n", encoding="utf-8")
        text = "kind=transform\nbase=base.norm\nmatrix=1,0,1\n"

        with pytest.raises(ParseError) as excinfo:
            parse_spec(text, "t.norm", Path(tmp))

    assert excinfo.value.key == "matrix"


def test_bad_vertices():
    """Test that a vertex with three coordinates is rejected."""
    with pytest.raises(ParseError) as excinfo:
        parse_spec("kind=polygon\nvertices=1,0,2;0,1\n")

    assert excinfo.value.key == "vertices"
