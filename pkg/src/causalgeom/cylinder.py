"""The cylinder spacetime Z_rho = {|x_vec| = rho} with its intrinsic causal order.

Only s = 2 is sampled: Z_rho is then a 1+1 cylinder with coordinates
(t, theta). Time spacing equals rho * angular step, so null geodesics run
along lattice diagonals and the causal order is an integer relation:
points are timelike iff |di| > (circular angular index distance).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.ndimage import distance_transform_edt

from .causal_ops import PredicateReport
from .regions import Region

_TOL = 1e-9


@dataclass(frozen=True)
class CylinderSpacetime:
    rho: float
    angular_resolution: int = 360
    time_half_width: float = 3.0
    s: int = 2

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("cylinder radius must be positive")
        if self.angular_resolution < 3:
            raise ValueError("angular resolution must be >= 3")
        if self.s != 2:
            raise ValueError("cylinder lattice is implemented for s = 2 only")

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.angular_resolution

    @property
    def dt(self) -> float:
        return self.rho * self.dtheta

    @property
    def nt(self) -> int:
        return int(np.floor(self.time_half_width / self.dt + 1e-9))

    @property
    def shape(self) -> tuple:
        return (2 * self.nt + 1, self.angular_resolution)

    @cached_property
    def times(self) -> np.ndarray:
        return np.arange(-self.nt, self.nt + 1) * self.dt

    @cached_property
    def angles(self) -> np.ndarray:
        return np.arange(self.angular_resolution) * self.dtheta

    def ambient(self, t, theta) -> np.ndarray:
        t, theta = np.broadcast_arrays(np.asarray(t, float), np.asarray(theta, float))
        return np.stack([t, self.rho * np.cos(theta), self.rho * np.sin(theta)], axis=-1)

    @cached_property
    def coords(self) -> np.ndarray:
        T, A = np.meshgrid(self.times, self.angles, indexing="ij")
        return self.ambient(T, A)

    def point(self, index) -> np.ndarray:
        i, j = index
        return self.ambient(self.times[i], self.angles[j])

    def geodesic(self, p, q, samples: int = 16) -> np.ndarray:
        """Helix samples between two cylinder lattice indices (shortest angular arc)."""
        (i0, j0), (i1, j1) = p, q
        n = self.angular_resolution
        dj = (j1 - j0 + n // 2) % n - n // 2
        f = np.linspace(0, 1, samples)
        return self.ambient(self.times[i0] + f * (self.times[i1] - self.times[i0]),
                            self.angles[j0] + f * dj * self.dtheta)


@dataclass(frozen=True, eq=False)
class CylinderRegion:
    mask: np.ndarray
    Z: CylinderSpacetime

    def __post_init__(self):
        if self.mask.shape != self.Z.shape:
            raise ValueError("mask does not match the cylinder lattice")

    def is_empty(self) -> bool:
        return not self.mask.any()

    def time_extent(self) -> tuple:
        rows = np.where(self.mask.any(axis=1))[0]
        if len(rows) == 0:
            return None
        return float(self.Z.times[rows[0]]), float(self.Z.times[rows[-1]])

    def __or__(self, other):
        return CylinderRegion(self.mask | other.mask, self.Z)


def cylinder_restrict(R: Region, Z: CylinderSpacetime) -> CylinderRegion:
    return CylinderRegion(np.asarray(R.contains(Z.coords), dtype=bool), Z)


def _circular_distance(sl: np.ndarray) -> np.ndarray:
    n = sl.size
    if sl.all():
        return np.zeros(n)
    tiled = np.concatenate([sl, sl, sl])
    return distance_transform_edt(~tiled)[n:2 * n]


def _cyl_future(mask: np.ndarray, strict: bool) -> np.ndarray:
    out = np.zeros_like(mask)
    best = np.full(mask.shape[1], np.inf)
    for i in range(mask.shape[0]):
        if mask[i].any():
            best = np.minimum(best, _circular_distance(mask[i]) + i)
        out[i] = best < i - _TOL if strict else best <= i + _TOL
    return out


def _cyl_past(mask, strict):
    return _cyl_future(mask[::-1], strict)[::-1]


def _circ(j0, j1, n):
    d = abs(j1 - j0) % n
    return min(d, n - d)


def cylinder_timelike_convex(C: CylinderRegion) -> PredicateReport:
    """I+_Z(C) n I-_Z(C) subset of C on the cylinder lattice."""
    if C.Z.s == 1:
        raise ValueError("cylinder convexity needs s >= 2")
    m = C.mask
    defect = _cyl_future(m, True) & _cyl_past(m, True) & ~m
    if not defect.any():
        return PredicateReport(True, None, None, False,
                               {"rho": C.Z.rho, "points": int(m.sum())})
    z = np.argwhere(defect)[0]
    n = C.Z.angular_resolution
    pts = np.argwhere(m)
    dist = np.array([_circ(z[1], j, n) for j in pts[:, 1]])
    before = pts[(z[0] - pts[:, 0]) > dist]
    after = pts[(pts[:, 0] - z[0]) > dist]
    x, y = before[0], after[0]
    witness = {"x": C.Z.point(x), "y": C.Z.point(y), "z": C.Z.point(z),
               "chord": C.Z.geodesic(tuple(x), tuple(y))}
    return PredicateReport(False, witness, None, False, {"rho": C.Z.rho})
