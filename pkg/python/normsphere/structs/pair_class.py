"""Classification of direction pairs."""

from dataclasses import dataclass
from enum import Enum

from .vector import Vector2


class PairValue(Enum):
    REGULAR = "regular"
    SINGULAR = "singular"


@dataclass(frozen=True, eq=False)
class PairClass:
    """Result of classifying a pair of sphere directions.

    ``witness`` is the sphere point at which both directions support the
    sphere; it stays ``None`` for regular pairs and for dependent pairs.
    """

    value: PairValue
    witness: Vector2 | None = None

    @property
    def is_regular(self) -> bool:
        return self.value is PairValue.REGULAR
