"""Tests for Norm2D.gauge, membership and scale_to_sphere."""

import numpy as np
import pytest
from conftest import load_norm
from hypothesis import given, settings
from hypothesis import strategies as st
from normsphere.errors import ZeroVector
from normsphere.norms import Membership

NORMS = ["euclid", "l1", "pnorm4", "hexagon", "lens0", "lens02", "double_lens"]
NORMS += ["lens02_transform"]

coordinate = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
vectors = st.tuples(coordinate, coordinate).filter(
    lambda v: abs(v[0]) + abs(v[1]) > 1e-3
)


def test_euclidean_gauge():
    """Test that the p=2 norm is the Euclidean length."""
    norm = load_norm("euclid")

    assert norm.gauge((3.0, 4.0)) == pytest.approx(5.0, abs=1e-15)


def test_l1_polygon_matches_l1_pnorm():
    """Test that the square polygon and p=1 give the same gauge."""
    polygon, pnorm = load_norm("l1"), load_norm("l1_pnorm")
    v = np.random.default_rng(3).normal(size=(100, 2))

    expected = np.abs(v).sum(axis=1)

    assert np.allclose(polygon.gauge(v), expected, atol=1e-14)
    assert np.allclose(pnorm.gauge(v), expected, atol=1e-14)


def test_hexagon_edge_functionals():
    """Test gauge 1 on the hexagon vertices and edge midpoints."""
    norm = load_norm("hexagon")
    vertices = np.array(norm.spec.vertices)
    midpoints = 0.5 * (vertices + np.roll(vertices, -1, axis=0))

    assert np.allclose(norm.gauge(vertices), 1.0, atol=1e-14)
    assert np.allclose(norm.gauge(midpoints), 1.0, atol=1e-14)
    assert norm.gauge((0.5, 0.0)) == pytest.approx(0.5, abs=1e-15)


def test_lens_boundary_points():
    """Test gauge 1 at the lens corners and its top and bottom points."""
    norm = load_norm("lens0")
    points = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5], [0.0, -0.5]])

    assert np.allclose(norm.gauge(points), 1.0, atol=1e-11)


def test_lens_beta_top_point():
    """Test the upper boundary y = (1 - x^2)(1 + beta x)/2 at x = 0.5."""
    norm = load_norm("lens02")
    y = 0.5 * (1.0 - 0.25) * (1.0 + 0.2 * 0.5)

    assert norm.gauge((0.5, y)) == pytest.approx(1.0, abs=1e-11)


def test_double_lens_corners_on_sphere():
    """Test that (sqrt 2 - 1)(+-1, +-1) lie on the double lens sphere."""
    norm = load_norm("double_lens")
    a = np.sqrt(2.0) - 1.0
    corners = a * np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])

    assert np.allclose(norm.gauge(corners), 1.0, atol=1e-11)
    assert norm.gauge((0.5, 0.0)) == pytest.approx(1.0, abs=1e-11)


def test_transform_gauge():
    """Test that the transform of lens02 by A satisfies ||A v|| = ||v||_base."""
    base, image = load_norm("lens02"), load_norm("lens02_transform")
    A = np.array([[2.0, 1.0], [0.0, 1.0]])
    v = np.random.default_rng(5).normal(size=(64, 2))

    assert np.allclose(image.gauge(v @ A.T), base.gauge(v), rtol=1e-11)


def test_zero_vector():
    """Test that the zero vector has gauge 0 and cannot be scaled."""
    norm = load_norm("lens0")

    assert norm.gauge((0.0, 0.0)) == 0.0
    with pytest.raises(ZeroVector):
        norm.scale_to_sphere((0.0, 0.0))


def test_membership():
    """Test the interior, boundary and exterior classes."""
    norm = load_norm("euclid")

    assert norm.membership((0.5, 0.0)) is Membership.INTERIOR
    assert norm.membership((0.0, 1.0)) is Membership.BOUNDARY
    assert norm.membership((1.0, 1.0)) is Membership.EXTERIOR


def test_stack_input_returns_array():
    """Test that a stack of vectors yields an array and one vector a float."""
    norm = load_norm("pnorm4")

    assert isinstance(norm.gauge((1.0, 0.0)), float)
    assert norm.gauge(np.ones((3, 2))).shape == (3,)


def test_non_finite_input_rejected():
    """Test that infinite components are rejected."""
    with pytest.raises(ValueError, match="finite"):
        load_norm("euclid").gauge((np.inf, 0.0))


@pytest.mark.parametrize("name", NORMS)
def test_scale_to_sphere(name):
    """Test that scaled vectors land on the sphere."""
    norm = load_norm(name)
    v = np.random.default_rng(7).normal(size=(50, 2))

    assert norm.sphere_defect(norm.scale_to_sphere(v)) < 1e-11


@pytest.mark.parametrize("name", NORMS)
def test_axioms_hold_on_fixtures(name):
    """Test that every fixture norm passes the sampled axioms."""
    assert load_norm(name).validate_axioms(128).passed(1e-8)


@pytest.mark.parametrize("name", ["lens02", "double_lens", "hexagon"])
@settings(max_examples=50, deadline=None)
@given(v=vectors, w=vectors, lam=st.floats(min_value=-5.0, max_value=5.0))
def test_gauge_is_a_norm(name, v, w, lam):
    """Test homogeneity and the triangle inequality on random vectors."""
    norm = load_norm(name)
    gv, gw = norm.gauge(v), norm.gauge(w)

    scaled = norm.gauge(lam * np.asarray(v))
    assert scaled == pytest.approx(abs(lam) * gv, rel=1e-10, abs=1e-12)
    assert norm.gauge(np.add(v, w)) <= gv + gw + 1e-10 * (gv + gw)
