"""Region expressions: primitive regions, boolean nodes and transports.

Every region answers ``contains(points)`` for an array of shape (..., 1+s)
and returns a boolean array of shape (...). Regions are open unless built
with ``closed=True``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .minkowski import (TAU, CausalClass, DimensionError, as_coords, classify,
                        interval, mdot, timelike_future)


def _vec(x) -> tuple:
    return tuple(float(v) for v in np.asarray(x, dtype=float).ravel())


def _pts(points, s):
    p = as_coords(points)
    if s is not None and p.shape[-1] != s + 1:
        raise DimensionError(f"expected points of length {s + 1}, got {p.shape[-1]}")
    return p


class Region:
    """Base class. Subclasses implement contains()."""

    s: Optional[int] = None
    closed: bool = False

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        return bool(self.contains(as_coords(x)))

    def children(self) -> tuple:
        return ()

    def closure(self) -> "Region":
        raise ValueError(f"no closed form closure for {type(self).__name__}")

    # convenience algebra
    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Intersection((self, other))


def _dim_of(parts) -> Optional[int]:
    dims = {p.s for p in parts if p.s is not None}
    if len(dims) > 1:
        raise DimensionError(f"mixed dimensions {sorted(dims)}")
    return dims.pop() if dims else None


# ----------------------------------------------------------------- leaves

@dataclass(frozen=True)
class Empty(Region):
    closed: bool = True

    def contains(self, points):
        return np.zeros(as_coords(points).shape[:-1], dtype=bool)

    def closure(self):
        return self


@dataclass(frozen=True)
class Full(Region):
    closed: bool = True

    def contains(self, points):
        return np.ones(as_coords(points).shape[:-1], dtype=bool)

    def closure(self):
        return self


@dataclass(frozen=True)
class DoubleCone(Region):
    """(a + V+) n (b - V+); closed=True gives the closure."""

    a: tuple
    b: tuple
    closed: bool = False

    def __init__(self, a, b, closed: bool = False):
        a, b = _vec(a), _vec(b)
        if len(a) != len(b):
            raise DimensionError("cone tips have different dimensions")
        if len(a) < 2:
            raise DimensionError("cone tips need at least one space dimension")
        if classify(a, b) is not CausalClass.TIMELIKE_FUTURE:
            raise ValueError(f"cone tips not timelike: b - a is {classify(a, b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "closed", bool(closed))

    @property
    def s(self):
        return len(self.a) - 1

    @property
    def center(self) -> np.ndarray:
        return (np.array(self.a) + np.array(self.b)) / 2

    @property
    def radius(self) -> float:
        """Half the proper time between the tips."""
        return float(np.sqrt(interval(np.array(self.b) - np.array(self.a)))) / 2

    def contains(self, points):
        p = _pts(points, self.s)
        return timelike_future(p - np.array(self.a), self.closed) & \
            timelike_future(np.array(self.b) - p, self.closed)

    def closure(self):
        return DoubleCone(self.a, self.b, closed=True)


@dataclass(frozen=True)
class ConeComplement(Region):
    """Points spacelike to a double cone (or to the causal chain a <= b).

    closed=True is not(I+(a) u I-(b)), the complement of the open cone;
    closed=False is not(J+(a) u J-(b)), the complement of the closed cone.
    """

    a: tuple
    b: tuple
    closed: bool = True

    def __init__(self, a, b, closed: bool = True):
        a, b = _vec(a), _vec(b)
        if len(a) != len(b):
            raise DimensionError("tips have different dimensions")
        if classify(a, b) not in (CausalClass.TIMELIKE_FUTURE, CausalClass.LIGHTLIKE_FUTURE,
                                  CausalClass.COINCIDENT):
            raise ValueError("tips must satisfy a <= b in the causal order")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "closed", bool(closed))

    @property
    def s(self):
        return len(self.a) - 1

    def contains(self, points):
        p = _pts(points, self.s)
        strict = self.closed
        fut = timelike_future(p - np.array(self.a), closed=not strict)
        past = timelike_future(np.array(self.b) - p, closed=not strict)
        return ~(fut | past)

    def closure(self):
        return ConeComplement(self.a, self.b, closed=True)


@dataclass(frozen=True)
class Wedge(Region):
    """{phi+ > 0, phi- > 0} with phi(x) = n.x - offset (Euclidean dot)."""

    nplus: tuple
    dplus: float
    nminus: tuple
    dminus: float
    closed: bool = False

    def __init__(self, nplus, dplus, nminus, dminus, closed: bool = False):
        np_, nm = _vec(nplus), _vec(nminus)
        if len(np_) != len(nm) or len(np_) < 2:
            raise DimensionError("wedge normals must share a dimension >= 2")
        for n in (np_, nm):
            v = np.array(n)
            if np.allclose(v, 0):
                raise ValueError("wedge normal is zero")
            if abs(interval(v)) > 1e-9 * np.dot(v, v):
                raise ValueError(f"wedge normal {n} is not lightlike")
        A = np.array([np_, nm])
        if np.linalg.matrix_rank(A, tol=1e-9 * np.abs(A).max()) < 2:
            raise ValueError("wedge normals are linearly dependent")
        if mdot(np.array(np_), np.array(nm)) >= 0:
            raise ValueError("wedge normals span a light cone, not a wedge")
        object.__setattr__(self, "nplus", np_)
        object.__setattr__(self, "dplus", float(dplus))
        object.__setattr__(self, "nminus", nm)
        object.__setattr__(self, "dminus", float(dminus))
        object.__setattr__(self, "closed", bool(closed))

    @classmethod
    def w1(cls, s: int) -> "Wedge":
        e = np.zeros(s + 1)
        npl, nmi = e.copy(), e.copy()
        npl[0], npl[1] = -1.0, 1.0
        nmi[0], nmi[1] = 1.0, 1.0
        return cls(npl, 0.0, nmi, 0.0)

    @property
    def s(self):
        return len(self.nplus) - 1

    def phi_plus(self, points):
        return as_coords(points) @ np.array(self.nplus) - self.dplus

    def phi_minus(self, points):
        return as_coords(points) @ np.array(self.nminus) - self.dminus

    def _tol(self, p):
        return TAU * (1.0 + np.max(np.abs(p), axis=-1))

    def contains(self, points):
        p = _pts(points, self.s)
        tol = self._tol(p) * max(np.abs(self.nplus).max(), np.abs(self.nminus).max())
        fp, fm = self.phi_plus(p), self.phi_minus(p)
        if self.closed:
            return (fp >= -tol) & (fm >= -tol)
        return (fp > tol) & (fm > tol)

    def closure(self):
        return Wedge(self.nplus, self.dplus, self.nminus, self.dminus, closed=True)

    def opposite(self) -> "Wedge":
        """The complement: negated functionals with flipped closedness."""
        return Wedge(-np.array(self.nplus), -self.dplus, -np.array(self.nminus),
                     -self.dminus, closed=not self.closed)

    def normalized(self) -> "Wedge":
        """Same wedge with normals scaled to unit time component."""
        sp, sm = abs(self.nplus[0]), abs(self.nminus[0])
        return Wedge(np.array(self.nplus) / sp, self.dplus / sp,
                     np.array(self.nminus) / sm, self.dminus / sm, self.closed)

    def transformed(self, L, c) -> "Wedge":
        """Image under x -> L x + c."""
        Linv_T = np.linalg.inv(np.asarray(L, dtype=float)).T
        c = np.asarray(c, dtype=float)
        npl = Linv_T @ np.array(self.nplus)
        nmi = Linv_T @ np.array(self.nminus)
        return Wedge(npl, self.dplus + npl @ c, nmi, self.dminus + nmi @ c, self.closed)

    def to_json(self) -> dict:
        return {"nplus": list(self.nplus), "dplus": self.dplus,
                "nminus": list(self.nminus), "dminus": self.dminus}


@dataclass(frozen=True)
class HalfSpace(Region):
    """{n.x - offset > 0} (Euclidean dot)."""

    normal: tuple
    offset: float
    closed: bool = False

    def __init__(self, normal, offset, closed: bool = False):
        n = _vec(normal)
        if len(n) < 2 or np.allclose(n, 0):
            raise ValueError("half-space normal must be nonzero with length >= 2")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "closed", bool(closed))

    @property
    def s(self):
        return len(self.normal) - 1

    def contains(self, points):
        p = _pts(points, self.s)
        v = p @ np.array(self.normal) - self.offset
        tol = TAU * (1.0 + np.max(np.abs(p), axis=-1)) * np.abs(self.normal).max()
        return v >= -tol if self.closed else v > tol

    def closure(self):
        return HalfSpace(self.normal, self.offset, closed=True)


@dataclass(frozen=True)
class TimeSlice(Region):
    """Closed slab t0 <= x0 <= t1 (dimension agnostic)."""

    t0: float
    t1: float
    closed: bool = True

    def __init__(self, t0, t1):
        if not t0 <= t1:
            raise ValueError("time slice needs t0 <= t1")
        object.__setattr__(self, "t0", float(t0))
        object.__setattr__(self, "t1", float(t1))
        object.__setattr__(self, "closed", True)

    def contains(self, points):
        t = as_coords(points)[..., 0]
        tol = TAU * (1.0 + np.abs(t))
        return (t >= self.t0 - tol) & (t <= self.t1 + tol)

    def closure(self):
        return self


@dataclass(frozen=True)
class Shell(Region):
    """Future shell lo < x^2 < hi, x0 > 0 (dimension agnostic)."""

    lo: float
    hi: float
    closed: bool = False

    def __init__(self, lo, hi, closed: bool = False):
        if not 0 <= lo < hi:
            raise ValueError("shell needs 0 <= lo < hi")
        object.__setattr__(self, "lo", float(lo))
        object.__setattr__(self, "hi", float(hi))
        object.__setattr__(self, "closed", bool(closed))

    def contains(self, points):
        p = as_coords(points)
        q = interval(p)
        if self.closed:
            return (q >= self.lo) & (q <= self.hi) & (p[..., 0] >= 0)
        return (q > self.lo) & (q < self.hi) & (p[..., 0] > 0)

    def closure(self):
        return Shell(self.lo, self.hi, closed=True)


@dataclass(frozen=True)
class LightlikeHalfPlane(Region):
    """{x1 = x0, x_k > 0 for 2 <= k <= s}."""

    dim: int
    closed: bool = False

    @property
    def s(self):
        return self.dim

    def contains(self, points):
        p = _pts(points, self.s)
        tol = TAU * (1.0 + np.max(np.abs(p), axis=-1))
        on = np.abs(p[..., 1] - p[..., 0]) <= tol
        rest = p[..., 2:]
        if self.closed:
            return on & np.all(rest >= -tol[..., None], axis=-1)
        return on & np.all(rest > tol[..., None], axis=-1)

    def closure(self):
        return LightlikeHalfPlane(self.dim, closed=True)


@dataclass(frozen=True)
class LightlikeHalfPlaneComplement(Region):
    """{x1 = x0 and some x_k <= 0, 2 <= k <= s}: the complement of the half-plane."""

    dim: int
    closed: bool = True

    @property
    def s(self):
        return self.dim

    def contains(self, points):
        p = _pts(points, self.s)
        tol = TAU * (1.0 + np.max(np.abs(p), axis=-1))
        on = np.abs(p[..., 1] - p[..., 0]) <= tol
        rest = p[..., 2:]
        return on & np.any(rest <= tol[..., None], axis=-1)


@dataclass(frozen=True, eq=False)
class PointSet(Region):
    """Finite set of events."""

    points: np.ndarray
    closed: bool = True

    def __init__(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "closed", True)

    @property
    def s(self):
        return self.points.shape[1] - 1

    def contains(self, points):
        q = _pts(points, self.s)
        d = np.abs(q[..., None, :] - self.points)
        tol = TAU * (1.0 + np.abs(q).max(axis=-1))
        return np.any(np.all(d <= tol[..., None, None], axis=-1), axis=-1)

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def closure(self):
        return self


@dataclass(frozen=True, eq=False)
class Sampled(Region):
    """A lattice mask on a window; off-lattice points use nearest-lattice lookup."""

    mask: np.ndarray
    window: object

    def __post_init__(self):
        if self.mask.shape != self.window.shape:
            raise ValueError("mask shape does not match the window")

    @property
    def s(self):
        return self.window.s

    @property
    def closed(self):
        return True

    def contains(self, points):
        p = _pts(points, self.s)
        idx, inside = self.window.to_index(p)
        out = np.zeros(p.shape[:-1], dtype=bool)
        if inside.any():
            sel = idx[inside]
            out[inside] = self.mask[tuple(sel.T)]
        return out

    def closure(self):
        return self


# ------------------------------------------------------------------ nodes

@dataclass(frozen=True)
class Union(Region):
    parts: tuple

    def __init__(self, parts):
        parts = tuple(parts)
        _dim_of(parts)
        object.__setattr__(self, "parts", parts)

    @property
    def s(self):
        return _dim_of(self.parts)

    @property
    def closed(self):
        return all(p.closed for p in self.parts)

    def children(self):
        return self.parts

    def contains(self, points):
        p = as_coords(points)
        out = np.zeros(p.shape[:-1], dtype=bool)
        for r in self.parts:
            out |= r.contains(p)
        return out

    def closure(self):
        return Union(tuple(r.closure() for r in self.parts))


@dataclass(frozen=True)
class Intersection(Region):
    parts: tuple

    def __init__(self, parts):
        parts = tuple(parts)
        _dim_of(parts)
        object.__setattr__(self, "parts", parts)

    @property
    def s(self):
        return _dim_of(self.parts)

    @property
    def closed(self):
        return all(p.closed for p in self.parts)

    def children(self):
        return self.parts

    def contains(self, points):
        p = as_coords(points)
        out = np.ones(p.shape[:-1], dtype=bool)
        for r in self.parts:
            out &= r.contains(p)
        return out

    def closure(self):
        # intersection of closures: contains the closure, equal for the convex
        # regions with a common interior point used throughout
        return Intersection(tuple(r.closure() for r in self.parts))


@dataclass(frozen=True)
class CausalComplement(Region):
    """Lazy causal complement. Composite inputs are sampled on ``window``."""

    inner: Region
    window: object = None

    @property
    def s(self):
        return self.inner.s

    def children(self):
        return (self.inner,)

    @cached_property
    def resolved(self) -> Region:
        from .causal_ops import causal_complement
        return causal_complement(self.inner, self.window)

    @property
    def closed(self):
        return self.resolved.closed

    def contains(self, points):
        return self.resolved.contains(points)

    def closure(self):
        return self.resolved.closure()


@dataclass(frozen=True)
class Translate(Region):
    inner: Region
    v: tuple

    def __init__(self, inner, v):
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "v", _vec(v))
        if inner.s is not None and len(self.v) != inner.s + 1:
            raise DimensionError("translation vector dimension mismatch")

    @property
    def s(self):
        return len(self.v) - 1

    @property
    def closed(self):
        return self.inner.closed

    def children(self):
        return (self.inner,)

    def contains(self, points):
        return self.inner.contains(_pts(points, self.s) - np.array(self.v))

    def closure(self):
        return Translate(self.inner.closure(), self.v)


@dataclass(frozen=True)
class LinearMap(Region):
    """Image M(R) of the inner region under an invertible matrix M."""

    inner: Region
    M: tuple

    def __init__(self, inner, M):
        A = np.asarray(M, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("linear map must be a square matrix")
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("linear map must be invertible")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "M", tuple(map(tuple, A)))

    @property
    def s(self):
        return len(self.M) - 1

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.M)

    @property
    def closed(self):
        return self.inner.closed

    def children(self):
        return (self.inner,)

    def contains(self, points):
        p = _pts(points, self.s)
        Minv = np.linalg.inv(self.matrix)
        return self.inner.contains(p @ Minv.T)

    def closure(self):
        return LinearMap(self.inner.closure(), self.M)


# ------------------------------------------------------------- utilities

def member(R: Region, x) -> bool:
    """Structural membership of a single point."""
    x = as_coords(x)
    if R.s is not None and x.shape[-1] != R.s + 1:
        raise DimensionError(f"point has dimension {x.shape[-1] - 1}, region {R.s}")
    return bool(R.contains(x))


def resolution(R: Region):
    """The window that limits membership accuracy, or None when exact."""
    if isinstance(R, Sampled):
        return R.window
    if isinstance(R, CausalComplement):
        res = resolution(R.resolved)
        return res if res is not None else resolution(R.inner)
    for c in R.children():
        res = resolution(c)
        if res is not None:
            return res
    return None


def wedge_from_poincare(s: int, boost: float = 0.0, plane=None, angle: float = 0.0,
                        translation=None) -> Wedge:
    """W1 transported by a boost in the 0-1 plane, then a rotation, then a translation."""
    from .minkowski import boost as boost_matrix, rotation
    if plane is None:
        if s == 1 and angle != 0.0:
            raise ValueError("no rotation plane in one space dimension")
        R = rotation(s, 1, 2, angle) if s >= 2 else np.eye(2)
    else:
        R = rotation(s, plane[0], plane[1], angle)
    L = R @ boost_matrix(s, boost)
    c = np.zeros(s + 1) if translation is None else np.asarray(translation, dtype=float)
    if c.size != s + 1:
        raise DimensionError("translation dimension mismatch")
    return Wedge.w1(s).transformed(L, c)
