"""Lifting primitive regions of R^{1+s} into R^{1+(s+1)}."""
from __future__ import annotations

import numpy as np

from .regions import DoubleCone, Empty, Region, Wedge
from .window import GridWindow


def lift_hull(R: Region) -> Region:
    """Same tips (or functionals) read inside the light cones of one more dimension."""
    if isinstance(R, DoubleCone):
        return DoubleCone(np.append(R.a, 0.0), np.append(R.b, 0.0), R.closed)
    if isinstance(R, Wedge):
        return Wedge(np.append(R.nplus, 0.0), R.dplus, np.append(R.nminus, 0.0),
                     R.dminus, R.closed)
    raise TypeError(f"lift_hull takes a double cone or wedge, got {type(R).__name__}")


def _null_box(c: DoubleCone):
    """Light-cone coordinates (u = x0 - x1, v = x0 + x1) of the tips of a 1+1 cone."""
    a, b = np.array(c.a), np.array(c.b)
    return (a[0] - a[1], a[0] + a[1]), (b[0] - b[1], b[0] + b[1])


def intersect_cones_1d(O: DoubleCone, P: DoubleCone) -> Region:
    """In 1+1 dimensions the intersection of two double cones is a double cone or empty."""
    if O.s != 1 or P.s != 1:
        raise ValueError("intersect_cones_1d works in 1+1 dimensions")
    (ua, va), (ub, vb) = _null_box(O)
    (ua2, va2), (ub2, vb2) = _null_box(P)
    u0, v0 = max(ua, ua2), max(va, va2)
    u1, v1 = min(ub, ub2), min(vb, vb2)
    if u0 >= u1 or v0 >= v1:
        return Empty()
    a = ((u0 + v0) / 2, (v0 - u0) / 2)
    b = ((u1 + v1) / 2, (v1 - u1) / 2)
    return DoubleCone(a, b)


def lift_intersection_witnesses(O: DoubleCone, P: DoubleCone, G: GridWindow,
                                limit: int = 10) -> np.ndarray:
    """Lattice points of lift(O) n lift(P) outside lift(O n P) in a 1+2 window."""
    if G.s != O.s + 1:
        raise ValueError("window must have one more space dimension than the cones")
    pts = G.coords
    both = lift_hull(O).contains(pts) & lift_hull(P).contains(pts)
    OP = intersect_cones_1d(O, P)
    inner = np.zeros_like(both) if isinstance(OP, Empty) else lift_hull(OP).contains(pts)
    hits = np.argwhere(both & ~inner)
    return np.array([G.point(i) for i in hits[:limit]])
