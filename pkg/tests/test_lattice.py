import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from causalgeom import lattice as lat


def brute_future(mask, strict):
    idx = np.argwhere(mask)
    out = np.zeros_like(mask)
    for z in itertools.product(*map(range, mask.shape)):
        d = np.array(z) - idx
        sp = np.sqrt((d[:, 1:] ** 2).sum(1))
        ok = (d[:, 0] > sp) if strict else (d[:, 0] >= sp)
        out[z] = ok.any()
    return out


masks = st.integers(0, 2 ** 32 - 1).map(
    lambda seed: np.random.default_rng(seed).random((7, 6, 6)) < 0.04)


@settings(max_examples=40, deadline=None)
@given(masks)
def test_causal_future_matches_brute_force(m):
    for strict in (True, False):
        assert np.array_equal(lat.causal_future(m, strict), brute_future(m, strict))


@settings(max_examples=20, deadline=None)
@given(masks)
def test_sampled_complement(m):
    c = lat.sampled_complement(m)
    assert not (c & m).any()
    # the double complement is a superset of the mask
    assert not (m & ~lat.sampled_complement(c)).any() or not c.any()


def test_shift():
    m = np.zeros((3, 3), bool)
    m[1, 1] = True
    assert lat.shift(m, (1, 0))[0, 1] and lat.shift(m, (-1, -1))[2, 2]
    assert not lat.shift(m, (5, 0)).any()


def test_hull_defect_of_two_points():
    m = np.zeros((5, 5, 5), bool)
    m[0, 2, 2] = m[4, 2, 2] = True
    defect = lat.timelike_hull_defect(m)
    assert defect[2, 2, 2] and not defect[0, 2, 2]
