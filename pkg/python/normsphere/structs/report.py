"""Tabular reports written as CSV by the check protocol and the CLI."""

import csv
import io
import sys
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

CHECK_FIELDS = (
    "lemma",
    "fixture",
    "parameters",
    "measured",
    "predicted",
    "abs_err",
    "rel_err",
    "pass",
)


def format_value(value: object) -> str:
    """Render a cell: reals at 17 significant digits, booleans as 0/1."""
    if isinstance(value, bool | np.bool_):
        return "1" if value else "0"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return format(float(value), ".17g")
    return str(value)


def format_parameters(**params: float | str) -> str:
    """Join named parameters as ``name=value`` pairs separated by ``;``."""
    return ";".join(f"{k}={format_value(v)}" for k, v in params.items())


@dataclass(frozen=True)
class CheckRow:
    """One measured-against-predicted comparison."""

    lemma: str
    fixture: str
    parameters: str
    measured: float
    predicted: float
    abs_err: float
    rel_err: float
    passed: bool

    @classmethod
    def compare(
        cls,
        lemma: str,
        fixture: str,
        parameters: str,
        measured: float,
        predicted: float,
        tol: float,
        relative: bool = False,
    ) -> "CheckRow":
        """Build a row, passing when the absolute (or relative) error is within tol.

        :param relative: Compare the relative error, with unit floor on the scale
        :type relative: bool
        """
        abs_err = abs(float(measured) - float(predicted))
        rel_err = abs_err / max(abs(float(predicted)), 1.0)
        err = rel_err if relative else abs_err
        return cls(
            lemma,
            fixture,
            parameters,
            float(measured),
            float(predicted),
            abs_err,
            rel_err,
            bool(err <= tol),
        )

    @classmethod
    def flag(
        cls, lemma: str, fixture: str, parameters: str, measured: bool, expected: bool
    ) -> "CheckRow":
        """Build a row for a boolean outcome."""
        err = 0.0 if measured == expected else 1.0
        return cls(
            lemma,
            fixture,
            parameters,
            float(measured),
            float(expected),
            err,
            err,
            measured == expected,
        )

    def values(self) -> tuple:
        return (
            self.lemma,
            self.fixture,
            self.parameters,
            self.measured,
            self.predicted,
            self.abs_err,
            self.rel_err,
            self.passed,
        )


class Report:
    """Rows of a CSV report with a pass summary.

    When the header has a ``pass`` column the summary is the conjunction of
    that column; a report without one always passes.

    Example:
        report = Report(("spec", "half_length"))
        report.add_row(("euclid.norm", 3.141592653589793))
        report.to_csv("half_length.csv")
    """

    def __init__(self, header: Sequence[str], rows: Sequence[Sequence] = ()):
        """Initialise with a header and optional rows.

        :param header: Column names
        :type header: Sequence[str]
        :param rows: Initial rows, each as long as the header
        :type rows: Sequence[Sequence]
        :raises ValueError: If a row length differs from the header length
        """
        if not header:
            raise ValueError("header must not be empty")
        self._header = tuple(str(h) for h in header)
        self._rows: list[tuple] = []
        for row in rows:
            self.add_row(row)

    def __repr__(self) -> str:
        return f"Report(header={self._header!r}, rows=[{len(self._rows)} rows])"

    @classmethod
    def from_check_rows(cls, rows: Sequence[CheckRow]) -> "Report":
        return cls(CHECK_FIELDS, [row.values() for row in rows])

    @property
    def header(self) -> tuple[str, ...]:
        return self._header

    @property
    def rows(self) -> list[tuple]:
        return list(self._rows)

    @property
    def passed(self) -> bool:
        """Get the pass summary."""
        if "pass" in self._header:
            column = self._header.index("pass")
            return all(bool(row[column]) for row in self._rows)
        return True

    def add_row(self, row: Sequence) -> None:
        """Append a row.

        :raises ValueError: If the row length differs from the header length
        """
        if len(row) != len(self._header):
            raise ValueError(
                f"row has {len(row)} cells, header has {len(self._header)}"
            )
        self._rows.append(tuple(row))

    def validate_fields(self, fields: Sequence[str]) -> None:
        """Validate that the fields are columns of this report.

        :raises ValueError: If any field is not a column
        """
        for field in fields:
            if field not in self._header:
                raise ValueError(
                    f"Invalid field: {field}. Valid fields are: {self._header}"
                )

    def _select(self, fields: Sequence[str] | None) -> tuple[list[str], list[int]]:
        names = list(fields) if fields is not None else list(self._header)
        self.validate_fields(names)
        return names, [self._header.index(f) for f in names]

    def to_text(self, fields: Sequence[str] | None = None) -> str:
        """Render as CSV text with '\\n' line endings."""
        names, columns = self._select(fields)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(names)
        for row in self._rows:
            writer.writerow([format_value(row[c]) for c in columns])
        return buffer.getvalue()

    def to_csv(
        self, file_path: str | None = None, fields: Sequence[str] | None = None
    ) -> None:
        """Export the report to a CSV file, or to standard output.

        :param file_path: Output path; standard output when ``None`` or "-"
        :type file_path: str | None
        :param fields: Columns to include, defaults to all
        :type fields: Sequence[str] | None
        """
        text = self.to_text(fields)
        if file_path is None or file_path == "-":
            sys.stdout.write(text)
            return
        with open(file_path, mode="w", newline="", encoding="utf-8") as csvfile:
            csvfile.write(text)

