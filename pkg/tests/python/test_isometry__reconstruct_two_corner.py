"""Tests for the two-corner reconstruction pipeline."""

import numpy as np
import pytest
from conftest import load_norm
from normsphere.errors import PipelineError, WrongCornerCount
from normsphere.isometry import (
    SphereMap,
    TwoCornerReconstruction,
    reconstruct_two_corner,
    sphere_map_from_linear,
)
from normsphere.structs.linear_map import LinearMap2x2

LENSES = ["lens0", "lens01", "lens-01", "lens02", "lens-02"]


@pytest.mark.parametrize(
    ("name", "matrix"),
    [
        ("lens0", LinearMap2x2(-1.0, 0.0, 0.0, -1.0)),
        ("lens0", LinearMap2x2(1.0, 0.0, 0.0, -1.0)),
        ("lens02", LinearMap2x2(2.0, 1.0, 0.0, 1.0)),
    ],
)
def test_known_extensions(name, matrix):
    """Test recovery of the antipodal map, a reflection and a shear."""
    f, _ = sphere_map_from_linear(matrix, load_norm(name))

    recovered = reconstruct_two_corner(f)

    assert recovered.max_entry_difference(matrix) < 1e-6


def test_random_map_of_skew_lens():
    """Test recovery of a random orientation reversing map of lens(-0.1)."""
    rng = np.random.default_rng(4)
    matrix = np.diag([1.0, -1.0]) + 0.3 * rng.uniform(-1.0, 1.0, (2, 2))
    A = LinearMap2x2.from_matrix(matrix)
    f, _ = sphere_map_from_linear(A, load_norm("lens-01"))

    result = TwoCornerReconstruction(f).run()

    assert result.passed
    assert result.matrix.max_entry_difference(A) < 1e-6
    assert result.deviation.max_deviation < 1e-5
    names = [stage.name for stage in result.stages]
    assert names == [
        "corners",
        "half_length",
        "jumps",
        "identity",
        "derivatives",
        "extension",
    ]


@pytest.mark.parametrize("name", LENSES)
@pytest.mark.parametrize("seed", range(4))
def test_random_maps_of_every_lens(name, seed):
    """Test recovery of random well-conditioned maps of each two-corner lens."""
    rng = np.random.default_rng(seed)
    sign = np.diag([1.0, -1.0]) if seed % 2 else np.eye(2)
    A = LinearMap2x2.from_matrix(sign + 0.3 * rng.uniform(-1.0, 1.0, (2, 2)))
    f, _ = sphere_map_from_linear(A, load_norm(name))

    recovered = reconstruct_two_corner(f)

    assert recovered.max_entry_difference(A) < 1e-6


def test_sampled_map():
    """Test recovery from a tabulated isometry."""
    A = LinearMap2x2(2.0, 1.0, 0.0, 1.0)
    f, _ = sphere_map_from_linear(A, load_norm("lens02"))

    recovered = reconstruct_two_corner(SphereMap.sampled_from(f))

    assert recovered.max_entry_difference(A) < 1e-5


@pytest.mark.parametrize("name", ["euclid", "double_lens"])
def test_wrong_corner_count(name):
    """Test that spheres without exactly two corners are rejected."""
    f, _ = sphere_map_from_linear(LinearMap2x2.identity(), load_norm(name))
    pipeline = TwoCornerReconstruction(f)

    with pytest.raises(WrongCornerCount) as excinfo:
        pipeline.run()

    assert excinfo.value.stage == "corners"
    assert pipeline.stages[0].passed is False


def test_non_isometry_fails_a_stage():
    """Test that the identity from lens(0) into lens(0.2) is rejected."""
    identity = LinearMap2x2.identity()
    f = SphereMap(load_norm("lens0"), load_norm("lens02"), linear=identity)
    pipeline = TwoCornerReconstruction(f)

    with pytest.raises(PipelineError) as excinfo:
        pipeline.run()

    assert excinfo.value.stage in {"half_length", "jumps", "identity"}
    assert not pipeline.stages[-1].passed
