import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalgeom import fixtures
from causalgeom.hyperboloid import (MassHyperboloid, apex_region, cone_support_min,
                                    epsilon_shrink, inflate, is_admissible,
                                    minkowski_sum_completion, neighborhoods_disjoint,
                                    shrink_inputs)
from causalgeom.regions import DoubleCone, Wedge
from causalgeom.window import GridWindow

G = GridWindow(3, 3, 0.2, 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.floats(0.2, 1.5),
       st.lists(st.floats(-0.3, 0.3), min_size=2, max_size=2))
def test_cone_support_min_against_sampling(n, r, v):
    a = np.array([-r, *v])
    b = np.array([r, *v]) + np.array([0.3, 0.1, 0.0])
    D = DoubleCone(a, b, closed=True)
    pts = np.random.default_rng(0).uniform(-3, 3, (40000, 3))
    inside = pts[D.contains(pts)]
    if len(inside) < 10:
        return
    m = cone_support_min(n, a, b)
    assert m <= (inside @ np.array(n)).min() + 1e-9
    # the minimum is attained on the cone
    assert m >= (inside @ np.array(n)).min() - 0.25 * (1 + np.linalg.norm(n))


def test_minkowski_sum_cones_and_shrink_inverse():
    O = DoubleCone((-1, 0, 0), (1, 0, 0))
    P = DoubleCone((-0.2, 0, 0), (0.2, 0, 0))
    S = minkowski_sum_completion(O, P)
    assert np.allclose(S.a, (-1.2, 0, 0)) and np.allclose(S.b, (1.2, 0, 0))
    # O - P has tips a - b_P and b - a_P
    Ot, (Wt,) = shrink_inputs(O, [Wedge.w1(2)], P)
    assert np.allclose(Ot.a, (-1.2, 0, 0)) and np.allclose(Ot.b, (1.2, 0, 0))
    # W1 - P reaches 0.2 further in x1
    assert Wt.contains(np.array([0.0, -0.15, 0.0]))
    assert not Wt.contains(np.array([0.0, -0.25, 0.0]))


def test_admissibility():
    H = MassHyperboloid((0, 0, 0), 1.0)
    assert is_admissible(H, DoubleCone((-0.5, 0, 0), (0.5, 0, 0)), G).verdict
    r = is_admissible(H, DoubleCone((-2, 0, 0), (2, 0, 0)), G)
    assert not r.verdict and abs(H.residual(r.witness["point"])) < 0.5
    with pytest.raises(ValueError):
        MassHyperboloid((0, 0, 0), -1)


def test_apex_pair_and_triple():
    X, Y, Z = fixtures.x120(2)
    assert apex_region([X, Y], [], G).empty is False
    ap = apex_region([X, Y, Z], [], G)
    assert ap.empty is True and ap.bracket == "empty" and ap.certificate is not None
    assert ap.to_json()["empty"] is True


def test_epsilon_shrink_is_reverified():
    X, Y, Z = fixtures.x120(2)
    parts = [W.closure() for W in (X, Y, Z)]
    eps, trace = epsilon_shrink(parts, G, return_trace=True)
    masks = [G.evaluate(p) for p in parts]
    assert eps > 0 and neighborhoods_disjoint(masks, G, eps)
    assert len(trace["attempts"]) >= 1 and trace["delta_over_3"] >= eps


def test_epsilon_shrink_of_intersecting_sets():
    X, Y, _ = fixtures.x120(2)
    with pytest.raises(ValueError):
        epsilon_shrink([X.closure(), Y.closure()], G)


def test_inflate_monotone():
    m = G.evaluate(DoubleCone((-0.4, 0, 0), (0.4, 0, 0)))
    a, b = inflate(m, G, 0.2), inflate(m, G, 0.6)
    assert not (m & ~a).any() and not (a & ~b).any() and b.sum() > a.sum()
