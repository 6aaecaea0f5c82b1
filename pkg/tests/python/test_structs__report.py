"""Tests for the Report struct and its CSV output."""

import csv
import tempfile
from pathlib import Path

import pytest
from normsphere.structs.report import CHECK_FIELDS, CheckRow, Report


def test_reals_are_written_with_17_digits():
    """Test that floats keep full precision and booleans become 0/1."""
    report = Report(("spec", "half_length", "pass"))
    report.add_row(("euclid.norm", 3.141592653589793, True))

    lines = report.to_text().splitlines()

    assert lines == ["spec,half_length,pass", "euclid.norm,3.1415926535897931,1"]


def test_to_csv_writes_file():
    """Test that the CSV export can be read back with the csv module."""
    report = Report(("a", "b"), [(1, 2.5), (3, 4.5)])

    with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
        out_path = Path(tmp.name)

    try:
        report.to_csv(str(out_path))
        with open(out_path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert rows == [["a", "b"], ["1", "2.5"], ["3", "4.5"]]
    finally:
        out_path.unlink(missing_ok=True)


def test_to_csv_field_selection():
    """Test that only the requested columns are written, in order."""
    report = Report(("a", "b", "c"), [(1, 2, 3)])

    assert report.to_text(["c", "a"]).splitlines() == ["c,a", "3,1"]


def test_invalid_field_raises():
    """Test that an unknown column name is rejected."""
    report = Report(("a",))

    with pytest.raises(ValueError, match="Invalid field: z"):
        report.to_csv(fields=["z"])


def test_row_length_must_match_header():
    """Test that short rows are rejected."""
    with pytest.raises(ValueError, match="row has 1 cells"):
        Report(("a", "b"), [(1,)])


def test_pass_summary_follows_pass_column():
    """Test that one failing check row fails the report."""
    rows = [
        CheckRow.compare("p", "euclid", "t=0", 1.0, 1.0, 1e-9),
        CheckRow.compare("p", "euclid", "t=1", 1.1, 1.0, 1e-9),
    ]

    report = Report.from_check_rows(rows)

    assert report.header == CHECK_FIELDS
    assert rows[0].passed and not rows[1].passed
    assert not report.passed


def test_report_without_pass_column_passes():
    """Test that only a pass column can fail a report."""
    report = Report(("spec", "half_length"), [("euclid.norm", 3.14)])

    assert report.passed
    assert not Report(("spec", "pass"), [("lens0.norm", False)]).passed


def test_flag_row():
    """Test that a boolean check passes when it matches its expectation."""
    row = CheckRow.flag("ns", "lens0", "s=0", True, True)

    assert row.passed
    assert row.abs_err == 0.0
