"""Points, the Minkowski interval and causal classification in R^{1+s}.

Signature is (+,-,...,-): x^2 = x0^2 - |x_vec|^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

TAU = 1e-9


class CausalClass(Enum):
    TIMELIKE_FUTURE = "TimelikeFuture"
    TIMELIKE_PAST = "TimelikePast"
    LIGHTLIKE_FUTURE = "LightlikeFuture"
    LIGHTLIKE_PAST = "LightlikePast"
    SPACELIKE = "Spacelike"
    COINCIDENT = "Coincident"

    def reversed(self) -> "CausalClass":
        return _REVERSE[self]

    def __str__(self) -> str:
        return self.value


_REVERSE = {
    CausalClass.TIMELIKE_FUTURE: CausalClass.TIMELIKE_PAST,
    CausalClass.TIMELIKE_PAST: CausalClass.TIMELIKE_FUTURE,
    CausalClass.LIGHTLIKE_FUTURE: CausalClass.LIGHTLIKE_PAST,
    CausalClass.LIGHTLIKE_PAST: CausalClass.LIGHTLIKE_FUTURE,
    CausalClass.SPACELIKE: CausalClass.SPACELIKE,
    CausalClass.COINCIDENT: CausalClass.COINCIDENT,
}


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """An event; coords[0] is time, coords[1:] are space."""

    coords: tuple

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float).ravel()
        if c.size < 2:
            raise DimensionError("a point needs at least one space dimension")
        if not np.all(np.isfinite(c)):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "coords", tuple(float(v) for v in c))

    @property
    def s(self) -> int:
        return len(self.coords) - 1

    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def as_coords(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def interval(d) -> np.ndarray:
    """Minkowski square d0^2 - |d_vec|^2 along the last axis."""
    d = as_coords(d)
    return d[..., 0] ** 2 - np.sum(d[..., 1:] ** 2, axis=-1)


def mdot(u, v) -> np.ndarray:
    u, v = as_coords(u), as_coords(v)
    return u[..., 0] * v[..., 0] - np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def _scale(d) -> np.ndarray:
    return np.sum(as_coords(d) ** 2, axis=-1)


def timelike_future(d, closed: bool = False) -> np.ndarray:
    """Mask of displacements d (last axis) lying in V+ (open) or its closure."""
    d = as_coords(d)
    I = interval(d)
    tol = TAU * _scale(d)
    if closed:
        return (d[..., 0] >= -TAU * (1.0 + np.abs(d[..., 0]))) & (I >= -tol)
    return (d[..., 0] > 0) & (I > tol)


def spacelike(d) -> np.ndarray:
    """Strictly spacelike (and not coincident) displacements."""
    d = as_coords(d)
    return interval(d) < -TAU * _scale(d)


def classify(x, y) -> CausalClass:
    """Causal class of y relative to x, i.e. of the displacement y - x."""
    x, y = as_coords(x).ravel(), as_coords(y).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.size} vs {y.size}")
    d = y - x
    size = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    if np.max(np.abs(d)) <= TAU * size:
        return CausalClass.COINCIDENT
    I = float(interval(d))
    tol = TAU * float(_scale(d))
    if I > tol:
        return CausalClass.TIMELIKE_FUTURE if d[0] > 0 else CausalClass.TIMELIKE_PAST
    if I < -tol:
        return CausalClass.SPACELIKE
    return CausalClass.LIGHTLIKE_FUTURE if d[0] > 0 else CausalClass.LIGHTLIKE_PAST


def boost(s: int, rapidity: float, axis: int = 1) -> np.ndarray:
    L = np.eye(s + 1)
    c, sh = np.cosh(rapidity), np.sinh(rapidity)
    L[0, 0] = L[axis, axis] = c
    L[0, axis] = L[axis, 0] = sh
    return L


def rotation(s: int, i: int, j: int, angle: float) -> np.ndarray:
    if not (1 <= i < j <= s):
        raise ValueError(f"rotation plane ({i},{j}) must satisfy 1 <= i < j <= {s}")
    R = np.eye(s + 1)
    c, sn = np.cos(angle), np.sin(angle)
    R[i, i] = R[j, j] = c
    R[i, j] = -sn
    R[j, i] = sn
    return R


def is_lorentz(M, tol: float = 1e-9) -> bool:
    M = np.asarray(M, dtype=float)
    eta = np.diag([1.0] + [-1.0] * (M.shape[0] - 1))
    return bool(np.allclose(M.T @ eta @ M, eta, atol=tol)) and M[0, 0] > 0


def rest_frame(a, b) -> np.ndarray:
    """Orthochronous Lorentz matrix L with L @ e0 parallel to the timelike b - a."""
    u = as_coords(b) - as_coords(a)
    tau = np.sqrt(interval(u))
    u = u / tau
    n = u.size
    g, v = u[0], u[1:]
    L = np.eye(n)
    L[0, 0] = g
    L[0, 1:] = v
    L[1:, 0] = v
    if g > 1.0 + 1e-15:
        L[1:, 1:] += np.outer(v, v) / (1.0 + g)
    return L
