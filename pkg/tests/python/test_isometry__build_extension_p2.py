"""Tests for direction pairs, chord triangles and extensions from special pairs."""

import numpy as np
import pytest
from conftest import load_norm
from normsphere.errors import NoBracket, NotIsometric, SingularPair
from normsphere.isometry import (
    SphereMap,
    build_extension_p2,
    find_regular_special_pair,
    pair_classify,
    solve_chord_triangle,
    sphere_map_from_linear,
    verify_extension,
)
from normsphere.structs.linear_map import LinearMap2x2
from normsphere.structs.pair_class import PairValue
from normsphere.structs.vector import unit_directions

A = np.sqrt(2.0) - 1.0
QUARTER = LinearMap2x2.rotation(np.pi / 2)


def _direction(norm, degrees):
    angle = np.deg2rad(degrees)
    return norm.scale_to_sphere((np.cos(angle), np.sin(angle)))


@pytest.fixture(scope="module")
def quarter_turn(double_lens_curve):
    f, _ = sphere_map_from_linear(QUARTER, double_lens_curve.space.norm)
    return f


@pytest.fixture(scope="module")
def sampled_quarter_turn(quarter_turn, double_lens_curve):
    return SphereMap.sampled_from(quarter_turn, source_curve=double_lens_curve)


def test_orthogonal_pair_is_regular(euclid_curve):
    """Test that e1 and e2 form a regular pair on the circle."""
    result = pair_classify(euclid_curve, (1.0, 0.0), (0.0, 1.0))

    assert result.value is PairValue.REGULAR
    assert result.witness is None


def test_equal_directions_are_singular(euclid_curve):
    """Test that u = v and u = -v are singular without a witness."""
    for v in ((1.0, 0.0), (-1.0, 0.0)):
        result = pair_classify(euclid_curve, (1.0, 0.0), v)

        assert result.value is PairValue.SINGULAR
        assert result.witness is None


def test_normal_cone_pair_is_singular(double_lens_curve):
    """Test that two directions inside the normal cone of a corner are singular."""
    norm = double_lens_curve.space.norm
    u, v = _direction(norm, 125.0), _direction(norm, 145.0)

    result = pair_classify(double_lens_curve, u, v)

    assert result.value is PairValue.SINGULAR
    distance = min(
        np.linalg.norm(result.witness - (A, A)),
        np.linalg.norm(result.witness + (A, A)),
    )
    assert distance < 1e-8


def test_adjacent_corners_are_regular(double_lens_curve):
    """Test that two adjacent corners of the double lens form a regular pair."""
    assert pair_classify(double_lens_curve, (A, A), (-A, A)).is_regular


def test_chord_triangle_on_circle(euclid_curve):
    """Test the chord triangle for u = e1, v = e2 and three chord directions."""
    cases = [
        ((0.0, 1.0), (0.0, 1.0), (0.0, -1.0), (0.0, 1.0)),
        ((1.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (-1.0, 0.0)),
    ]
    w = np.array([np.cos(0.7), np.sin(0.7)])
    cases.append((w, w, -w, (-w[0], w[1])))

    for target, x_exp, y_exp, z_exp in cases:
        x, y, z = solve_chord_triangle(euclid_curve, (1.0, 0.0), (0.0, 1.0), target)

        assert np.allclose(x, x_exp, atol=1e-9)
        assert np.allclose(y, y_exp, atol=1e-9)
        assert np.allclose(z, z_exp, atol=1e-9)


def test_chord_triangle_direction(double_lens_curve):
    """Test that x - y is a positive multiple of w on the double lens."""
    norm = double_lens_curve.space.norm
    w = _direction(norm, 70.0)

    x, y, z = solve_chord_triangle(double_lens_curve, (A, A), (-A, A), w)
    chord = x - y

    assert norm.sphere_defect(np.stack([x, y, z])) < 1e-9
    assert abs(chord[0] * w[1] - chord[1] * w[0]) < 1e-9
    assert np.dot(chord, w) > 0


def test_chord_triangle_rejects_singular_pair(double_lens_curve):
    """Test that a singular pair cannot drive the chord triangle."""
    norm = double_lens_curve.space.norm
    u, v = _direction(norm, 125.0), _direction(norm, 145.0)

    with pytest.raises(SingularPair):
        solve_chord_triangle(double_lens_curve, u, v, (A, A))


def test_zero_target_has_no_chord_triangle(double_lens_curve):
    """Test that a triangle side cannot be a positive multiple of zero."""
    with pytest.raises(NoBracket, match="not along w"):
        solve_chord_triangle(double_lens_curve, (A, A), (-A, A), (0.0, 0.0))


def test_rotation_of_circle(euclid_curve):
    """Test that a rotation of the circle extends to itself."""
    rotation = LinearMap2x2.rotation(0.4)
    f, _ = sphere_map_from_linear(rotation, euclid_curve.space.norm)

    L = build_extension_p2(f, (1.0, 0.0), (0.0, 1.0), curve=euclid_curve)

    assert L.max_entry_difference(rotation) < 1e-9


def test_quarter_turn_from_adjacent_corners(quarter_turn, double_lens_curve):
    """Test that two adjacent corners recover the quarter turn."""
    L = build_extension_p2(quarter_turn, (A, A), (-A, A), curve=double_lens_curve)

    assert L.max_entry_difference(QUARTER) < 1e-8


@pytest.fixture(scope="module")
def corner_pair(double_lens_curve):
    return find_regular_special_pair(double_lens_curve)


@pytest.mark.parametrize("seed", range(20))
def test_random_linear_maps(double_lens_curve, corner_pair, seed):
    """Test that random well-conditioned maps are recovered from two corners."""
    rng = np.random.default_rng(seed)
    matrix = LinearMap2x2.from_matrix(np.eye(2) + 0.4 * rng.uniform(-1, 1, (2, 2)))
    f, _ = sphere_map_from_linear(matrix, double_lens_curve.space.norm)
    u, v = corner_pair

    L = build_extension_p2(
        f, u, v, curve=double_lens_curve, samples=64, grid=128, triangle_samples=16
    )

    assert L.max_entry_difference(matrix) < 1e-8


def test_sampled_quarter_turn(sampled_quarter_turn, double_lens_curve):
    """Test that a tabulated quarter turn extends to the quarter turn."""
    L = build_extension_p2(
        sampled_quarter_turn, (A, A), (-A, A), curve=double_lens_curve
    )

    assert L.max_entry_difference(QUARTER) < 1e-5


def test_singular_pair_is_replaced(quarter_turn, double_lens_curve):
    """Test that a singular pair is swapped for one through its witness corner."""
    norm = double_lens_curve.space.norm
    u, v = _direction(norm, 125.0), _direction(norm, 145.0)

    L = build_extension_p2(
        quarter_turn, u, v, curve=double_lens_curve, samples=64, triangle_samples=1
    )

    assert L.max_entry_difference(QUARTER) < 1e-8


def test_dependent_points_rejected(lens02_curve):
    """Test that the two lens corners are dependent and rejected."""
    f, _ = sphere_map_from_linear(LinearMap2x2.identity(), lens02_curve.space.norm)

    with pytest.raises(SingularPair):
        build_extension_p2(f, (1.0, 0.0), (-1.0, 0.0), curve=lens02_curve)
    with pytest.raises(SingularPair):
        find_regular_special_pair(lens02_curve)


def test_non_special_points_fail_the_sweep(double_lens_curve):
    """Test that a wrong target for one corner is caught by the norm sweep."""
    norm = double_lens_curve.space.norm
    f, _ = sphere_map_from_linear(QUARTER, norm)
    wrong = SphereMap.sampled_from(f, rows=256, source_curve=double_lens_curve)
    wrong = wrong.with_row_perturbed(0, 0.2)
    u = wrong.table.source_points[0]
    v = norm.scale_to_sphere((-1.0, 1.0))

    with pytest.raises(NotIsometric):
        build_extension_p2(wrong, u, v, curve=double_lens_curve, samples=64)


def test_triangle_sweep_catches_local_defect(double_lens_curve):
    """Test that the default chord triangle sweep sees a defect between corners."""
    norm = double_lens_curve.space.norm
    f, _ = sphere_map_from_linear(QUARTER, norm)
    table = SphereMap.sampled_from(f, rows=32, source_curve=double_lens_curve)
    # row 4 sits on the corner (A, A); row 6 lies between it and the top point
    local = table.with_row_perturbed(6, 0.05)

    with pytest.raises(NotIsometric) as excinfo:
        build_extension_p2(local, (A, A), (-A, A), curve=double_lens_curve)

    assert excinfo.value.stage == "triangle"
    assert excinfo.value.deviation > 1e-3


def test_chord_triangles_for_many_targets(double_lens_curve):
    """Test that a stack of targets gives one chord triangle per row."""
    norm = double_lens_curve.space.norm
    w = norm.scale_to_sphere(unit_directions(np.linspace(0.0, 2 * np.pi, 24)))

    x, y, z = solve_chord_triangle(double_lens_curve, (A, A), (-A, A), w)
    chord = x - y

    assert x.shape == y.shape == z.shape == w.shape
    assert norm.sphere_defect(np.concatenate([x, y, z])) < 1e-9
    assert np.max(np.abs(chord[:, 0] * w[:, 1] - chord[:, 1] * w[:, 0])) < 1e-9
    assert np.all(np.einsum("ij,ij->i", chord, w) > 0)


def test_verify_exact(lens0_curve):
    """Test that a linear map has zero deviation from itself."""
    f, _ = sphere_map_from_linear(LinearMap2x2(-1, 0, 0, -1), lens0_curve.space.norm)

    deviation = verify_extension(f, LinearMap2x2(-1, 0, 0, -1))

    assert deviation.max_deviation < 1e-12
    assert deviation.norm_deviation < 1e-10
    assert deviation.antipodality_ok


def test_verify_wrong_matrix(quarter_turn):
    """Test that the identity is far from a quarter turn of the double lens."""
    deviation = verify_extension(quarter_turn, LinearMap2x2.identity())

    assert deviation.max_deviation > 0.5


def test_verify_sampled(sampled_quarter_turn):
    """Test that a tabulated quarter turn stays within 1e-5 of the quarter turn."""
    deviation = verify_extension(sampled_quarter_turn, QUARTER)

    assert deviation.max_deviation < 1e-5
    assert deviation.points == 512 + sampled_quarter_turn.table.rows


def test_verify_perturbed_row(sampled_quarter_turn):
    """Test that shifting one table row by 1e-3 is detected."""
    perturbed = sampled_quarter_turn.with_row_perturbed(100, 1e-3)

    deviation = verify_extension(perturbed, QUARTER)

    assert deviation.max_deviation >= 5e-4
    assert not deviation.antipodality_ok


def test_verify_grid_minimum(quarter_turn):
    """Test that grids below 64 points are rejected."""
    with pytest.raises(ValueError, match="grid"):
        verify_extension(quarter_turn, QUARTER, grid=32)
