"""Tests for the brute-force length, distance and derivative references."""

import numpy as np
import pytest
from conftest import load_norm
from normsphere.errors import CoincidentPoints, NotOnHalfSphere, NotOnSphere
from normsphere.oracles import (
    Polyline,
    intrinsic_distance_oracle,
    polyline_arclength_oracle,
    richardson_derivative_oracle,
)
from normsphere.parameterization import BasedSpace, NaturalCurve


def test_circle_half_length():
    """Test that a million chords of the half circle sum to pi."""
    norm = load_norm("euclid")

    length = polyline_arclength_oracle(norm, BasedSpace.create(norm), 0.0, np.pi)

    assert length == pytest.approx(np.pi, abs=1e-9)


def test_l1_half_length():
    """Test that chords of the upper l1 sphere sum to 4."""
    norm = load_norm("l1")

    length = polyline_arclength_oracle(norm, BasedSpace.create(norm), 0.0, np.pi)

    assert length == pytest.approx(4.0, abs=1e-9)


def test_too_few_subdivisions():
    """Test that fewer than 1000 chords are rejected."""
    norm = load_norm("euclid")

    with pytest.raises(ValueError, match="at least 1000"):
        polyline_arclength_oracle(norm, BasedSpace.create(norm), 0.0, 1.0, N=10)


def test_corner_off_the_grid_is_kept():
    """Test that a coarse grid missing the l1 corner still measures it exactly."""
    norm = load_norm("l1")
    end = np.array([np.cos(3.0), np.sin(3.0)]) / (abs(np.cos(3.0)) + np.sin(3.0))
    expected = 2.0 + float(np.abs(end - (0.0, 1.0)).sum())

    length = polyline_arclength_oracle(norm, BasedSpace.create(norm), 0.0, 3.0, N=1000)

    assert length == pytest.approx(expected, abs=1e-12)


def test_intrinsic_across_double_lens_corners(double_lens_curve):
    """Test that the chord distance across two double lens corners is |s1 - s2|."""
    s1, s2 = 0.5398, 3.2589
    x = double_lens_curve.natural_point(s1)
    y = double_lens_curve.natural_point(s2)

    assert intrinsic_distance_oracle(double_lens_curve, x, y) == pytest.approx(
        s2 - s1, abs=1e-6
    )


def test_intrinsic_quarter_circle(euclid_curve):
    """Test the distance from e1 to e2 along the circle."""
    d = intrinsic_distance_oracle(euclid_curve, (1.0, 0.0), (0.0, 1.0))

    assert d == pytest.approx(np.pi / 2, abs=1e-8)


def test_intrinsic_corner_to_corner(lens0_curve):
    """Test that the two lens corners are L apart."""
    d = intrinsic_distance_oracle(lens0_curve, (1.0, 0.0), (-1.0, 0.0))

    assert d == pytest.approx(lens0_curve.half_length(), abs=1e-6)


def test_intrinsic_matches_parameter_gap(lens02_curve):
    """Test that the chord distance between r(s1) and r(s2) is |s1 - s2|."""
    s1, s2 = 0.4, 1.7
    x, y = lens02_curve.natural_point(s1), lens02_curve.natural_point(s2)

    assert intrinsic_distance_oracle(lens02_curve, x, y) == pytest.approx(
        s2 - s1, abs=1e-6
    )


def test_intrinsic_same_point(euclid_curve):
    """Test that a point is at distance zero from itself."""
    assert intrinsic_distance_oracle(euclid_curve, (0.0, 1.0), (0.0, 1.0)) == 0.0


def test_intrinsic_domain(euclid_curve):
    """Test that points below the e1 axis or off the sphere are rejected."""
    with pytest.raises(NotOnHalfSphere):
        intrinsic_distance_oracle(euclid_curve, (1.0, 0.0), (0.0, -1.0))
    with pytest.raises(NotOnSphere):
        intrinsic_distance_oracle(euclid_curve, (1.0, 0.0), (0.0, 0.5))


def test_polyline_checks_points():
    """Test the sphere and coincidence checks of a polyline."""
    norm = load_norm("euclid")

    with pytest.raises(NotOnSphere):
        Polyline.on_sphere(norm, [(1.0, 0.0), (0.5, 0.0)])
    with pytest.raises(CoincidentPoints):
        Polyline.on_sphere(norm, [(1.0, 0.0), (1.0, 0.0)])


def test_closed_square_perimeter():
    """Test that the closed l1 square has perimeter 8 in its own norm."""
    norm = load_norm("l1")
    square = Polyline.on_sphere(
        norm, [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)], closed=True
    )

    assert square.length(norm) == pytest.approx(8.0, abs=1e-12)


def test_richardson_circle(euclid_curve):
    """Test the derivative of the natural circle at 0."""
    derivative = richardson_derivative_oracle(euclid_curve.natural_point, 0.0, "right")

    assert np.allclose(derivative, (0.0, 1.0), atol=1e-9)


def test_richardson_lens_corner():
    """Test both one-sided derivatives at the lens corner."""
    norm = load_norm("lens0").with_tolerance(1e-15)
    curve = NaturalCurve(BasedSpace.create(norm))
    a = np.sqrt(2.0) - 1.0

    right = richardson_derivative_oracle(curve.natural_point, 0.0, "right")
    left = richardson_derivative_oracle(curve.natural_point, 0.0, "left")

    assert np.allclose(right, (-a, a), atol=1e-7)
    assert np.allclose(left, (a, a), atol=1e-7)


def test_richardson_side():
    """Test that the side must be left or right."""
    with pytest.raises(ValueError, match="side"):
        richardson_derivative_oracle(lambda s: (s, s), 0.0, "up")
