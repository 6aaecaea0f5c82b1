"""Exception hierarchy for normsphere.

Every error raised by the library derives from :class:`NormSphereError`.
Errors that report invalid caller input also derive from :class:`ValueError`.
"""


class NormSphereError(Exception):
    """Base class for all normsphere errors."""


class InvalidSpec(NormSphereError, ValueError):
    """A norm specification violates one of its invariants.

    :param message: Human readable description
    :param invariant: Short name of the violated invariant
    """

    def __init__(self, message: str, invariant: str = ""):
        super().__init__(message)
        self.invariant = invariant


class SingularTransform(NormSphereError, ValueError):
    """A linear map used as a transform or isometry has |det| <= 1e-12."""


class ZeroVector(NormSphereError, ValueError):
    """The zero vector cannot be scaled onto the sphere."""


class QuadratureFailure(NormSphereError):
    """Adaptive quadrature did not reach its tolerance at maximum depth."""


class DegenerateBasis(NormSphereError):
    """A 2x2 system built from r(s) and r'(s) is numerically singular."""


class InvalidBasis(NormSphereError, ValueError):
    """Basis vectors are off the sphere or not counterclockwise."""


class NotOnSphere(NormSphereError, ValueError):
    """A point expected on the unit sphere has gauge away from 1."""


class NotDifferentiableAtB(NormSphereError, ValueError):
    """The natural parameterization has a corner at the probed parameter."""


class CoincidentPoints(NormSphereError, ValueError):
    """Two sphere points that must differ coincide."""


class NotACorner(NormSphereError, ValueError):
    """The parameter 0 of the curve is not a non-smooth point."""


class SingularSystem(NormSphereError):
    """The derivative recovery system has a vanishing determinant."""


class BadChordAlignment(NormSphereError, ValueError):
    """The chord r(s) - r(sbar) is not a positive multiple of e1."""


class InvalidConfig(NormSphereError, ValueError):
    """A probe configuration or its options record is inconsistent."""


class OnPerpSet(NormSphereError, ValueError):
    """The point lies on a chord supporting the sphere in direction c."""


class NotInComponent(NormSphereError, ValueError):
    """The point lies in the component opposite to the one theta acts on."""


class DegenerateComponent(NormSphereError):
    """No sample of the sphere component could be evaluated."""


class SingularPair(NormSphereError, ValueError):
    """The direction pair is singular and cannot drive the chord triangle."""


class NoBracket(NormSphereError):
    """A root search found no sign change.

    :param message: Human readable description
    :param diagnostics: Values collected while searching
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotIsometric(NormSphereError):
    """A verification sweep found the map is not the restriction of L.

    :param message: Human readable description
    :param stage: Name of the sweep stage that failed
    :param deviation: Largest deviation observed in that stage
    """

    def __init__(self, message: str, stage: str = "", deviation: float = 0.0):
        super().__init__(message)
        self.stage = stage
        self.deviation = deviation


class NotOnHalfSphere(NormSphereError, ValueError):
    """A point is outside the closed upper half-sphere of the basis."""


class PipelineError(NormSphereError):
    """Base class for two-corner reconstruction failures.

    :param message: Human readable description
    :param stage: Name of the pipeline stage that failed
    """

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage


class WrongCornerCount(PipelineError):
    """The source sphere does not have exactly two corners."""


class HalfLengthMismatch(PipelineError):
    """Source and target spheres have different half-lengths."""


class JumpMismatch(PipelineError):
    """Metric jump limits at the corners disagree between the spheres."""


class VerificationFailure(PipelineError):
    """A pointwise identity of the pipeline failed on its grid."""


class ParseError(NormSphereError, ValueError):
    """A norm spec file could not be parsed.

    :param message: Human readable description
    :param path: File being parsed
    :param line: 1-based line number, 0 when not tied to a line
    :param key: Offending key, empty when not tied to a key
    """

    def __init__(self, message: str, path: str = "", line: int = 0, key: str = ""):
        location = f"{path}:{line}" if line else path
        detail = f" (key {key!r})" if key else ""
        super().__init__(f"{location}: {message}{detail}" if location else message)
        self.path = path
        self.line = line
        self.key = key


class CheckFailure(NormSphereError):
    """At least one check of a report did not pass."""


class WrongOrientation(NormSphereError):
    """A coordinate that the counterclockwise orientation makes positive is not."""
