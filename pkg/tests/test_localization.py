import json

import numpy as np
import pytest

from causalgeom import fixtures
from causalgeom.causal_ops import PreconditionError
from causalgeom.localization import (ObservableTag, containing_wedges, empty_intersection_decide,
                                     finite_subcover_select, localize,
                                     nonempty_intersection_criterion, separating_wedge,
                                     spacelike_witness, wedges_spacelike)
from causalgeom.regions import DoubleCone, HalfSpace, Wedge
from causalgeom.window import GridWindow

G = GridWindow(3, 3, 0.2, 2)


def test_tag_json_round_trip():
    A, _ = fixtures.audit_tags(2)
    B = ObservableTag.from_json(json.loads(json.dumps(A.to_json())))
    assert B.id == A.id and len(B.wedges) == 2 and len(B.cones) == 1


def test_containing_wedges_contain_cone():
    c = DoubleCone((-0.5, 1.0, 0.3), (0.6, 1.2, 0.2))
    pts = G.coords[G.evaluate(c.closure())]
    for W in containing_wedges(c, 16):
        assert W.contains(pts).all()


def test_empty_intersection_decision():
    dec = empty_intersection_decide(fixtures.x120(2), G=G)
    assert dec.empty and dec.eps > 0
    X, Y, _ = fixtures.x120(2)
    dec2 = empty_intersection_decide([X, Y], G=G)
    assert not dec2.empty and dec2.witness is not None


def test_localize_triangle_and_scalar():
    res = localize(fixtures.triangle_tag(2), G)
    assert res.nonempty and res.bounded and not res.scalar
    assert localize(fixtures.scalar_tag(2), G).scalar


def test_finite_subcover_triangle():
    chosen = finite_subcover_select(fixtures.triangle_tag(2), 0.4, G)
    assert len(chosen) == 3


def test_finite_subcover_errors():
    single = ObservableTag("one", (), (Wedge.w1(2),))
    with pytest.raises(ValueError):
        finite_subcover_select(single, 0.4, G)
    with pytest.raises(ValueError):
        finite_subcover_select(fixtures.triangle_tag(2), 5.0, G)
    with pytest.raises(ValueError):
        finite_subcover_select(fixtures.triangle_tag(2), 0.0, G)


def test_separating_wedge_and_precondition():
    m1 = G.evaluate(DoubleCone((-0.5, -1.2, 0), (0.5, -1.2, 0), closed=True))
    m2 = G.evaluate(DoubleCone((-0.5, 1.2, 0), (0.5, 1.2, 0), closed=True))
    assert spacelike_witness(m1, m2, G) is None
    X = separating_wedge(m1, m2, G)
    assert X.contains(G.coords[m1]).all() and X.opposite().contains(G.coords[m2]).all()
    m3 = G.evaluate(DoubleCone((0.5, -1.2, 0), (1.5, -1.2, 0), closed=True))
    with pytest.raises(PreconditionError):
        separating_wedge(m1, m3, G)


def test_nonempty_intersection_criterion():
    X, Y, _ = fixtures.x120(2)
    assert not nonempty_intersection_criterion([], DoubleCone((-1, 0, 0), (1, 0, 0)), G).verdict
    big = DoubleCone((-6, 0, 0), (6, 0, 0))
    assert nonempty_intersection_criterion(fixtures.triangle_tag(2).wedges, big, G).verdict
    small = DoubleCone((-0.2, 0, 0), (0.2, 0, 0))
    r = nonempty_intersection_criterion(fixtures.triangle_tag(2).wedges, small, G)
    assert not r.verdict and "point" in r.witness
    with pytest.raises(PreconditionError):
        nonempty_intersection_criterion([X], big.closure(), G)


def test_wedges_spacelike():
    W = Wedge.w1(2)
    assert wedges_spacelike(W, W.opposite())
    assert not wedges_spacelike(W, W)
