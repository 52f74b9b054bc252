import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalgeom.minkowski import (CausalClass, DimensionError, boost, classify, interval,
                                  is_lorentz, rest_frame, rotation)

coord = st.floats(-5, 5, allow_nan=False)


def test_classify_basic():
    o = (0, 0, 0)
    assert classify(o, (1, 0, 0)) is CausalClass.TIMELIKE_FUTURE
    assert classify(o, (-1, 0.5, 0)) is CausalClass.TIMELIKE_PAST
    assert classify(o, (1, 1, 0)) is CausalClass.LIGHTLIKE_FUTURE
    assert classify(o, (-1, 0, 1)) is CausalClass.LIGHTLIKE_PAST
    assert classify(o, (0, 1, 0)) is CausalClass.SPACELIKE
    assert classify(o, (0, 0, 0)) is CausalClass.COINCIDENT
    assert str(CausalClass.SPACELIKE) == "Spacelike"


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        classify((0, 0), (0, 0, 0))


@settings(max_examples=200, deadline=None)
@given(st.lists(coord, min_size=3, max_size=3), st.lists(coord, min_size=3, max_size=3))
def test_classify_antisymmetric(x, y):
    assert classify(y, x) is classify(x, y).reversed()


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2), st.floats(0, 6.3), st.lists(coord, min_size=3, max_size=3),
       st.lists(coord, min_size=3, max_size=3))
def test_lorentz_invariance(r, a, x, y):
    L = rotation(2, 1, 2, a) @ boost(2, r)
    assert is_lorentz(L)
    d = np.subtract(y, x)
    if abs(interval(d)) < 1e-3 * (1 + d @ d):
        return
    assert classify(L @ x, L @ y) is classify(x, y)


def test_rest_frame_maps_e0():
    a, b = np.array([0.0, 0.2, -0.1]), np.array([2.0, 0.9, 0.4])
    L = rest_frame(a, b)
    assert is_lorentz(L)
    u = (b - a) / np.sqrt(interval(b - a))
    assert np.allclose(L @ np.array([1.0, 0, 0]), u)


def test_rotation_plane_checked():
    with pytest.raises(ValueError):
        rotation(2, 2, 1, 0.3)
