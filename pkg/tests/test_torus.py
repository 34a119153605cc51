import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toruswalk.torus import circle_dist, frac, frac_scalar, torus_add, torus_neg

unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True, allow_nan=False)
reals = st.floats(min_value=-1e9, max_value=1e9, allow_nan=False)


@given(reals)
def test_frac_in_range(x):
    f = frac_scalar(x)
    assert 0.0 <= f < 1.0


@given(unit, unit)
def test_add_stays_in_range(a, b):
    s = torus_add(a, b)
    assert 0.0 <= s < 1.0


@given(unit, unit)
def test_add_commutes(a, b):
    assert torus_add(a, b) == torus_add(b, a)


@given(unit)
def test_neg_inverts(a):
    # exact cancellation fails only by float rounding near 0/1, so the check
    # is in the circle metric
    assert circle_dist(torus_add(a, torus_neg(a)), 0.0) < 1e-15
    assert 0.0 <= torus_neg(a) < 1.0


def test_frac_rounding_corner():
    # x - floor(x) evaluates to 1.0 for these; frac must fold that back to 0
    assert frac_scalar(-1e-20) == 0.0
    assert frac_scalar(-5e-17) == 0.0
    arr = frac(np.array([-1e-20, -5e-17, 0.25, 1.25, -0.75]))
    assert (arr >= 0.0).all() and (arr < 1.0).all()
    np.testing.assert_allclose(arr[2:], [0.25, 0.25, 0.25])


def test_circle_dist_wraps():
    assert circle_dist(0.99, 0.01) == pytest.approx(0.02, abs=1e-15)
    assert circle_dist(0.01, 0.99) == pytest.approx(0.02, abs=1e-15)
    assert circle_dist(0.5, 0.0) == 0.5
    d = circle_dist(np.array([0.1, 0.9]), np.array([0.9, 0.1]))
    np.testing.assert_allclose(d, [0.2, 0.2])
