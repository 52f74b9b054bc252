import pytest

from causalgeom.cylinder import CylinderSpacetime, cylinder_restrict, cylinder_timelike_convex
from causalgeom.regions import DoubleCone, TimeSlice, Union


def test_cylinder_convexity():
    Z = CylinderSpacetime(1.0, 120, 3.0)
    assert cylinder_timelike_convex(cylinder_restrict(TimeSlice(0, 1), Z)).verdict
    U = Union([DoubleCone((0.5, 1, 0), (2.5, 1, 0)), DoubleCone((-2.5, 1, 0), (-0.5, 1, 0))])
    r = cylinder_timelike_convex(cylinder_restrict(U, Z))
    assert not r.verdict and {"x", "y", "z", "chord"} <= set(r.witness)


def test_cylinder_validation():
    with pytest.raises(ValueError):
        CylinderSpacetime(0.0)
    with pytest.raises(ValueError):
        CylinderSpacetime(1.0, s=3)
