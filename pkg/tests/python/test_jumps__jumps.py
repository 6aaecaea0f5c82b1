"""Tests for derivative jumps and the corner scan."""

import numpy as np
import pytest
from normsphere.jumps import jump_gap, jumps, nonsmooth_scan


def test_smooth_sphere_has_no_jumps(euclid_curve):
    """Test that both jumps vanish on the circle."""
    data = jumps(euclid_curve, np.linspace(0.0, 6.0, 7))

    assert np.allclose(data.jr, 0.0, atol=1e-12)
    assert np.allclose(data.jt, 0.0, atol=1e-12)


def test_symmetric_lens_corner(lens0_curve):
    """Test (jr, jt) = (1 - sqrt 2, 0) at both corners of the symmetric lens."""
    for s in (0.0, lens0_curve.half_length()):
        data = jumps(lens0_curve, s)

        assert data.jr == pytest.approx(1.0 - np.sqrt(2.0), abs=1e-9)
        assert data.jt == pytest.approx(0.0, abs=1e-9)


def test_skew_lens_corner_rebuilds_derivatives(lens02_curve):
    """Test that the jumps rebuild the one-sided derivatives at a skew corner."""
    point, pair = lens02_curve.natural_frame(0.0)

    data = jumps(lens02_curve, 0.0)
    minus, plus = data.one_sided(point, pair.avg)

    assert data.jr < -0.1
    assert 0.0 < abs(data.jt) < 1.0
    assert np.allclose(minus, pair.minus, atol=1e-12)
    assert np.allclose(plus, pair.plus, atol=1e-12)


def test_jump_gap_marks_corners(lens0_curve):
    """Test that the derivative gap is positive only at corners."""
    half = lens0_curve.half_length()

    gap = jump_gap(lens0_curve, np.array([0.0, 0.4, half, half + 0.4]))

    assert gap[0] > 0.5 and gap[2] > 0.5
    assert gap[1] < 1e-12 and gap[3] < 1e-12


def test_scan_smooth(euclid_curve):
    """Test that the circle has no corners."""
    assert nonsmooth_scan(euclid_curve) == []


def test_scan_lens(lens0_curve):
    """Test that the lens corners are found at 0 and L."""
    corners = nonsmooth_scan(lens0_curve)

    assert np.allclose(corners, [0.0, lens0_curve.half_length()], atol=1e-7)


def test_scan_l1(l1_curve):
    """Test that the four vertices of the l1 sphere are found."""
    corners = nonsmooth_scan(l1_curve)

    assert np.allclose(corners, [0.0, 2.0, 4.0, 6.0], atol=1e-7)
    vertices = l1_curve.natural_point(np.array(corners))
    assert np.allclose(vertices, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-7)


def test_scan_double_lens(double_lens_curve):
    """Test that the scan agrees with the known corners of the double lens."""
    corners = nonsmooth_scan(double_lens_curve)

    assert np.allclose(corners, double_lens_curve.kink_arc_parameters(), atol=1e-7)


def test_scan_threshold_hides_corners(lens0_curve):
    """Test that a threshold above the corner gap reports nothing."""
    assert nonsmooth_scan(lens0_curve, 256, gap_threshold=10.0) == []


@pytest.mark.parametrize(
    ("resolution", "threshold"), [(32, 1e-3), (1024, 0.0), (1024, -1.0)]
)
def test_scan_arguments(lens0_curve, resolution, threshold):
    """Test that too few cells or a non-positive threshold are rejected."""
    with pytest.raises(ValueError):
        nonsmooth_scan(lens0_curve, resolution, threshold)


def test_scan_reads_points_only(lens02_curve, monkeypatch):
    """Test that the scan finds the skew lens corners from r alone."""

    def no_derivatives(s):
        raise AssertionError("the scan must not read one-sided derivatives")

    monkeypatch.setattr(lens02_curve, "natural_derivatives", no_derivatives)
    monkeypatch.setattr(lens02_curve, "natural_frame", no_derivatives)

    corners = nonsmooth_scan(lens02_curve)

    assert np.allclose(corners, lens02_curve.kink_arc_parameters(), atol=1e-7)


def test_scan_corner_on_a_coarse_node(lens0_curve):
    """Test that a corner on a cell boundary is reported once."""
    half = lens0_curve.half_length()

    corners = nonsmooth_scan(lens0_curve, resolution=64)

    assert len(corners) == 2
    assert np.allclose(corners, [0.0, half], atol=1e-7)
