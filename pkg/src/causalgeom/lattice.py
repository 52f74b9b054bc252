"""Causal structure on a window lattice.

Masks are boolean arrays of shape GridWindow.shape: axis 0 is time, the
remaining axes are space, all in units of the spacing h. Lattice causal
relations are exact integer relations, so EDT distances compare exactly
against integer time differences.
"""
from __future__ import annotations

import itertools
from math import gcd

import numpy as np
from scipy.ndimage import distance_transform_edt

_TOL = 1e-9


def _slice_distance(sl: np.ndarray) -> np.ndarray:
    if sl.all():
        return np.zeros(sl.shape)
    return distance_transform_edt(~sl)


def causal_future(mask: np.ndarray, strict: bool) -> np.ndarray:
    """Lattice points in I+ (strict) or J+ (closed) of the mask's points.

    Sweeps time slices keeping best = min_j (dist_j + j), where dist_j is the
    Euclidean distance (index units) to the mask on slice j <= i. A point on
    slice i lies in the closed future iff best <= i.
    """
    out = np.zeros_like(mask, dtype=bool)
    best = np.full(mask.shape[1:], np.inf)
    for i in range(mask.shape[0]):
        sl = mask[i]
        if sl.any():
            best = np.minimum(best, _slice_distance(sl) + i)
        out[i] = best < i - _TOL if strict else best <= i + _TOL
    return out


def causal_past(mask: np.ndarray, strict: bool) -> np.ndarray:
    return causal_future(mask[::-1], strict)[::-1]


def sampled_complement(mask: np.ndarray) -> np.ndarray:
    """Lattice points strictly spacelike to every lattice point of the mask."""
    return ~(causal_future(mask, False) | causal_past(mask, False))


def timelike_hull_defect(mask: np.ndarray) -> np.ndarray:
    """Points of I+(S) n I-(S) outside S; empty iff S is timelike convex on the lattice."""
    return causal_future(mask, True) & causal_past(mask, True) & ~mask


def shift(mask: np.ndarray, off) -> np.ndarray:
    """A[z] = mask[z + off], False where z + off leaves the array."""
    out = np.zeros_like(mask)
    src, dst = [], []
    for o, n in zip(off, mask.shape):
        o = int(o)
        if abs(o) >= n:
            return out
        if o >= 0:
            src.append(slice(o, n))
            dst.append(slice(0, n - o))
        else:
            src.append(slice(0, n + o))
            dst.append(slice(-o, n))
    out[tuple(dst)] = mask[tuple(src)]
    return out


def timelike_directions(s: int, radius: int = 2) -> list[tuple]:
    """Primitive future-timelike integer directions with components in [-r, r]."""
    dirs = []
    rng = range(-radius, radius + 1)
    for d0 in range(1, radius + 1):
        for sp in itertools.product(rng, repeat=s):
            if d0 * d0 <= sum(v * v for v in sp):
                continue
            g = d0
            for v in sp:
                g = gcd(g, abs(v))
            if g == 1:
                dirs.append((d0,) + tuple(sp))
    return dirs


def chord_offsets(d) -> list[list[tuple]]:
    """Sample offsets along the chord z -> z + d at spacing <= 1 in every axis.

    Each entry lists the lattice offsets that round the sample point; a
    sample counts as inside a mask only if all of them are inside.
    """
    d = np.asarray(d)
    m = int(np.abs(d).max())
    out = []
    for j in range(1, m):
        f = d * j / m
        choices = [(int(np.floor(v)), int(np.ceil(v))) if v != np.floor(v) else (int(v),)
                   for v in f]
        out.append(sorted(set(itertools.product(*choices))))
    return out


def link_mask(mask: np.ndarray, d) -> np.ndarray:
    """link[z]: both z and z+d are in the mask and so is every chord sample between."""
    link = mask & shift(mask, d)
    for group in chord_offsets(d):
        for off in group:
            link &= shift(mask, off)
    return link


def maximal_runs(mask: np.ndarray, d) -> tuple[np.ndarray, np.ndarray]:
    """Start and end indices of maximal chains z, z+d, ..., z+kd of links (k >= 1)."""
    d = tuple(int(v) for v in d)
    link = link_mask(mask, d)
    # count[z] = number of consecutive links starting at z
    count = np.zeros(mask.shape, dtype=np.int64)
    n0, d0 = mask.shape[0], d[0]
    for i in range(n0 - 1, -1, -1):
        nxt = np.zeros(mask.shape[1:], dtype=np.int64)
        if i + d0 < n0:
            nxt = shift(count[i + d0], d[1:])
        count[i] = np.where(link[i], nxt + 1, 0)
    starts = link & ~shift(link, tuple(-v for v in d))
    p = np.argwhere(starts)
    k = count[tuple(p.T)]
    q = p + k[:, None] * np.array(d)
    return p, q


def raster_cone(out: np.ndarray, p, q) -> None:
    """OR the lattice points of the open double cone with index tips p, q into out."""
    p = np.asarray(p, dtype=np.int64)
    q = np.asarray(q, dtype=np.int64)
    shape = out.shape
    t_lo, t_hi = max(p[0] + 1, 0), min(q[0] - 1, shape[0] - 1)
    if t_lo > t_hi:
        return
    half = (q[0] - p[0]) / 2.0
    lo = np.maximum(np.minimum(p[1:], q[1:]) - int(np.ceil(half)), 0)
    hi = np.minimum(np.maximum(p[1:], q[1:]) + int(np.ceil(half)), np.array(shape[1:]) - 1)
    if np.any(lo > hi):
        return
    axes = [np.arange(t_lo, t_hi + 1)] + [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    dp = [g - c for g, c in zip(grids, p)]
    dq = [c - g for g, c in zip(grids, q)]
    sp = sum(v * v for v in dp[1:])
    sq = sum(v * v for v in dq[1:])
    inside = (dp[0] > 0) & (dp[0] * dp[0] > sp) & (dq[0] > 0) & (dq[0] * dq[0] > sq)
    box = (slice(t_lo, t_hi + 1),) + tuple(slice(a, b + 1) for a, b in zip(lo, hi))
    out[box] |= inside


def nearest_lookup(mask: np.ndarray, window, pts) -> np.ndarray:
    idx, inside = window.to_index(pts)
    out = np.zeros(np.asarray(pts).shape[:-1], dtype=bool)
    if inside.any():
        out[inside] = mask[tuple(idx[inside].T)]
    return out
