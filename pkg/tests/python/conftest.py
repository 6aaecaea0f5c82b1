"""Shared fixtures: norms and natural curves built once per session."""

from functools import cache
from pathlib import Path

import pytest
from normsphere.norms import Norm2D, build_from_spec
from normsphere.parameterization import BasedSpace, NaturalCurve
from normsphere.spec_file import load_spec

FIXTURES_DIR = Path(__file__).parent.parent / "fixtures"


@cache
def load_norm(name: str) -> Norm2D:
    """Norm of ``tests/fixtures/<name>.norm``."""
    return build_from_spec(load_spec(FIXTURES_DIR / f"{name}.norm"))


@cache
def load_curve(name: str) -> NaturalCurve:
    """Natural curve of a fixture norm in its default basis."""
    return NaturalCurve(BasedSpace.create(load_norm(name)))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def euclid_curve() -> NaturalCurve:
    return load_curve("euclid")


@pytest.fixture(scope="session")
def l1_curve() -> NaturalCurve:
    return load_curve("l1")


@pytest.fixture(scope="session")
def lens0_curve() -> NaturalCurve:
    return load_curve("lens0")


@pytest.fixture(scope="session")
def lens02_curve() -> NaturalCurve:
    return load_curve("lens02")


@pytest.fixture(scope="session")
def double_lens_curve() -> NaturalCurve:
    return load_curve("double_lens")
