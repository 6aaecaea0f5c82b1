"""normsphere package initializer."""

from .errors import NormSphereError, ParseError
from .isometry import (
    SphereMap,
    build_extension_p2,
    reconstruct_two_corner,
    sphere_map_from_linear,
    verify_extension,
)
from .norms import Norm2D, build_from_spec
from .parameterization import BasedSpace, NaturalCurve, PolarCurve
from .spec_file import load_spec, parse_spec
from .structs.linear_map import LinearMap2x2
from .structs.norm_spec import NormSpec

__all__ = [
    "BasedSpace",
    "LinearMap2x2",
    "NaturalCurve",
    "Norm2D",
    "NormSphereError",
    "NormSpec",
    "ParseError",
    "PolarCurve",
    "SphereMap",
    "build_extension_p2",
    "build_from_spec",
    "load_spec",
    "parse_spec",
    "reconstruct_two_corner",
    "sphere_map_from_linear",
    "verify_extension",
]
