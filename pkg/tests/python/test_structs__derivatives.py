"""Tests for the jump and slope records."""

import numpy as np
import pytest
from normsphere.structs.derivatives import JumpData, SlopeMeasurement


def test_lens_corner_jumps_are_valid():
    """Test that the lens corner jumps (1 - sqrt 2, 0) build a record."""
    data = JumpData(1.0 - np.sqrt(2.0), 0.0)

    assert data.slope_split(1.0) == pytest.approx(2.0 * (np.sqrt(2.0) - 1.0))


@pytest.mark.parametrize(("jr", "jt"), [(0.1, 0.0), (-0.2, 1.0), (-0.2, -1.5)])
def test_jumps_outside_their_range(jr, jt):
    """Test that a positive radial jump or |jt| >= 1 is rejected."""
    with pytest.raises(ValueError, match="jump"):
        JumpData(jr, jt)


def test_jump_arrays_are_checked_elementwise():
    """Test that one bad entry of a jump array is enough to reject it."""
    JumpData(np.array([0.0, -0.3]), np.array([0.0, 0.5]))

    with pytest.raises(ValueError, match="radial"):
        JumpData(np.array([0.0, 0.3]), np.array([0.0, 0.5]))


def test_extrapolation_noise_is_tolerated():
    """Test that a radial jump a hair above zero still builds a record."""
    assert JumpData(1e-9, 0.0).jr == 1e-9


def test_slope_measurement_needs_distance():
    """Test that a zero base distance is rejected."""
    with pytest.raises(ValueError, match="base_distance"):
        SlopeMeasurement(0.1, 0.2, 0.0, 1e-4)
