"""Outcome records of the isometry experiments."""

from dataclasses import dataclass

from .linear_map import LinearMap2x2
from .vector import Vector2

EXTENSION_FIELDS = (
    "a11",
    "a12",
    "a21",
    "a22",
    "max_deviation",
    "norm_deviation",
    "antipodality_defect",
    "stages",
    "pass",
)


@dataclass(frozen=True, eq=False)
class SpecialnessReport:
    """Spread of the chord direction map g over a component.

    ``common_value`` is set when the spread is at most 1e-6.
    """

    deviation: float
    common_value: Vector2 | None
    samples_used: int

    @property
    def constant(self) -> bool:
        return self.common_value is not None


@dataclass(frozen=True)
class ExtensionDeviation:
    """How far a linear map is from a sphere map on a grid."""

    max_deviation: float
    norm_deviation: float
    antipodality_defect: float
    antipodality_ok: bool
    points: int


@dataclass(frozen=True)
class StageOutcome:
    """One stage of an extension pipeline with the deviation it measured."""

    name: str
    passed: bool
    deviation: float

    def describe(self) -> str:
        return f"{self.name}:{'ok' if self.passed else 'fail'}"


@dataclass(frozen=True)
class ExtensionResult:
    """A recovered linear extension with its verification record."""

    matrix: LinearMap2x2
    deviation: ExtensionDeviation
    stages: tuple[StageOutcome, ...] = ()

    @property
    def passed(self) -> bool:
        return all(stage.passed for stage in self.stages)

    def row(self) -> tuple:
        """Cells in the order of :data:`EXTENSION_FIELDS`."""
        return (
            *self.matrix.entries,
            self.deviation.max_deviation,
            self.deviation.norm_deviation,
            self.deviation.antipodality_defect,
            ";".join(stage.describe() for stage in self.stages),
            self.passed,
        )
