"""Causal complements, completions, region predicates and Asgeirsson hulls."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import lattice as lat
from .minkowski import (CausalClass, classify, interval, timelike_future)
from .regions import (CausalComplement, ConeComplement, DoubleCone, Empty, Full,
                      HalfSpace, Intersection, LightlikeHalfPlane,
                      LightlikeHalfPlaneComplement, LinearMap, PointSet, Region,
                      Sampled, Shell, TimeSlice, Translate, Union, Wedge, resolution)
from .window import GridWindow


class PreconditionError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class PredicateReport:
    verdict: bool
    witness: Any = None
    resolution: Optional[GridWindow] = None
    exact: bool = False
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.verdict)

    def to_json(self) -> dict:
        return {
            "verdict": bool(self.verdict),
            "witness": _jsonable(self.witness),
            "resolution": None if self.resolution is None else self.resolution.to_dict(),
            "exact": bool(self.exact),
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return round(float(obj), 12)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, GridWindow):
        return obj.to_dict()
    if isinstance(obj, CausalClass):
        return str(obj)
    return obj


# ------------------------------------------------------------ complement

def _is_lorentz_any(M) -> bool:
    M = np.asarray(M, dtype=float)
    eta = np.diag([1.0] + [-1.0] * (M.shape[0] - 1))
    return bool(np.allclose(M.T @ eta @ M, eta, atol=1e-9))


def _superset(A: Region, B: Region) -> bool:
    """Cheap closed-form test of A containing B (False means unknown)."""
    if isinstance(A, Full) or A == B or isinstance(B, Empty):
        return True
    if isinstance(A, HalfSpace) and isinstance(B, Shell):
        n = np.array(A.normal)
        return bool(n[0] > 0 and np.allclose(n[1:], 0) and A.offset <= 0)
    return False


def simplify(R: Region) -> Region:
    """Drop redundant operands of intersections and unions (closed-form tests only)."""
    if isinstance(R, Intersection):
        parts = [simplify(p) for p in R.parts]
        if any(isinstance(p, Empty) for p in parts):
            return Empty()
        keep = []
        for i, p in enumerate(parts):
            if any(j != i and _superset(p, q) and not (_superset(q, p) and j > i)
                   for j, q in enumerate(parts)):
                continue
            keep.append(p)
        if not keep:
            return Full()
        return keep[0] if len(keep) == 1 else Intersection(keep)
    if isinstance(R, Union):
        parts = [simplify(p) for p in R.parts if not isinstance(p, Empty)]
        if any(isinstance(p, Full) for p in parts):
            return Full()
        if not parts:
            return Empty()
        return parts[0] if len(parts) == 1 else Union(parts)
    return R


def _is_chain(pts: np.ndarray) -> bool:
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if classify(pts[i], pts[j]) is CausalClass.SPACELIKE:
                return False
    return True


def closed_form_complement(R: Region) -> Optional[Region]:
    """Exact complement when one is known, else None."""
    if isinstance(R, Empty):
        return Full()
    if isinstance(R, (Full, TimeSlice, HalfSpace, Shell)):
        return Empty()
    if isinstance(R, DoubleCone):
        return ConeComplement(R.a, R.b, closed=not R.closed)
    if isinstance(R, ConeComplement):
        if classify(R.a, R.b) is CausalClass.TIMELIKE_FUTURE:
            return DoubleCone(R.a, R.b, closed=not R.closed)
        if not R.closed and classify(R.a, R.b) is CausalClass.COINCIDENT:
            return PointSet([R.a])
        return None
    if isinstance(R, Wedge):
        return R.opposite()
    if isinstance(R, LightlikeHalfPlane):
        if R.s == 1:
            return Empty()
        return LightlikeHalfPlaneComplement(R.s) if not R.closed else None
    if isinstance(R, LightlikeHalfPlaneComplement):
        return LightlikeHalfPlane(R.s) if R.s >= 2 else None
    if isinstance(R, PointSet):
        pts = R.points[np.argsort(R.points[:, 0], kind="stable")]
        if _is_chain(pts):
            return ConeComplement(pts[0], pts[-1], closed=False)
        return Intersection([ConeComplement(p, p, closed=False) for p in pts])
    if isinstance(R, Union):
        comps = [closed_form_complement(p) for p in R.parts]
        if all(c is not None for c in comps):
            return simplify(Intersection(comps))
        return None
    if isinstance(R, Intersection):
        S = simplify(R)
        if not isinstance(S, Intersection):
            return closed_form_complement(S)
        return None
    if isinstance(R, Translate):
        c = closed_form_complement(R.inner)
        return None if c is None else Translate(c, R.v)
    if isinstance(R, LinearMap):
        if not _is_lorentz_any(R.matrix):
            return None
        c = closed_form_complement(R.inner)
        return None if c is None else LinearMap(c, R.M)
    if isinstance(R, CausalComplement):
        return closed_form_complement(R.resolved)
    return None


def causal_complement(R: Region, G: Optional[GridWindow] = None) -> Region:
    """Closed form when available, else the sampled complement on G."""
    c = closed_form_complement(R)
    if c is not None:
        return c
    if isinstance(R, Union):
        parts = [causal_complement(p, G) for p in R.parts]
        return Intersection(parts)
    if isinstance(R, Sampled):
        return Sampled(lat.sampled_complement(R.mask), R.window)
    if G is None:
        raise ValueError(f"complement of {type(R).__name__} needs a sampling window")
    return Sampled(lat.sampled_complement(G.evaluate(R)), G)


def causal_completion(R: Region, G: Optional[GridWindow] = None) -> Region:
    return causal_complement(causal_complement(R, G), G)


def is_closed_form(R: Region) -> bool:
    return resolution(R) is None


# ------------------------------------------------------------- witnesses

def _related_point(S_idx: np.ndarray, z: np.ndarray, future: bool) -> np.ndarray:
    """An index point of S strictly in the past (future=False) or future of z."""
    d = (z - S_idx) if not future else (S_idx - z)
    ok = (d[:, 0] > 0) & (d[:, 0] ** 2 > np.sum(d[:, 1:] ** 2, axis=1))
    return S_idx[np.argmax(ok)]


def _tc_witness(G: GridWindow, S: np.ndarray, defect: np.ndarray) -> dict:
    z = np.argwhere(defect)[0]
    S_idx = np.argwhere(S)
    x = _related_point(S_idx, z, future=False)
    y = _related_point(S_idx, z, future=True)
    return {"x": G.point(x), "y": G.point(y), "z": G.point(z)}


# ------------------------------------------------------------ predicates

def is_timelike_convex(R: Region, G: GridWindow) -> PredicateReport:
    """Lattice check: every lattice point of D(x,y) for lattice x,y in R lies in R."""
    S = G.evaluate(R)
    defect = lat.timelike_hull_defect(S)
    if not defect.any():
        return PredicateReport(True, None, G, False, {"points": int(S.sum())})
    return PredicateReport(False, _tc_witness(G, S, defect), G, False,
                           {"defects": int(defect.sum())})


def is_causally_complete(R: Region, G: GridWindow) -> PredicateReport:
    C = causal_complement(R, G)
    CC = causal_complement(C, G)
    exact = is_closed_form(CC)
    S, SCC = G.evaluate(R), G.evaluate(CC)
    diff = S != SCC
    details = {"complement_closed_form": is_closed_form(C), "completion_closed_form": exact,
               "points": int(S.sum()), "completion_points": int(SCC.sum())}
    if exact and CC == R:
        return PredicateReport(True, None, G, True, details)
    if not diff.any():
        return PredicateReport(True, None, G, False, details)
    z = np.argwhere(diff)[0]
    side = "in completion only" if SCC[tuple(z)] else "in region only"
    return PredicateReport(False, {"point": G.point(z), "where": side}, G, exact, details)


def _run_cones(S: np.ndarray, directions) -> list[tuple]:
    runs = []
    for d in directions:
        p, q = lat.maximal_runs(S, d)
        keep = (q[:, 0] - p[:, 0]) >= 2
        for a, b in zip(p[keep], q[keep]):
            runs.append((tuple(d), tuple(int(v) for v in a), tuple(int(v) for v in b)))
    return runs


def _in_cone(z, p, q) -> bool:
    z, p, q = map(np.asarray, (z, p, q))
    u, v = z - p, q - z
    return bool(u[0] > 0 and u[0] ** 2 > np.sum(u[1:] ** 2) and
                v[0] > 0 and v[0] ** 2 > np.sum(v[1:] ** 2))


def is_asgeirsson_complete(R: Region, G: GridWindow, radius: int = 2) -> PredicateReport:
    """Chord check: for every maximal in-region chord, its open double cone lies in R."""
    S = G.evaluate(R)
    if not lat.timelike_hull_defect(S).any():
        return PredicateReport(True, None, G, False, {"by": "timelike convex"})
    dirs = lat.timelike_directions(G.s, radius)
    runs = _run_cones(S, dirs)
    cover = np.zeros_like(S)
    for _, p, q in runs:
        lat.raster_cone(cover, p, q)
    bad = cover & ~S
    details = {"by": "chord cones", "runs": len(runs), "directions": len(dirs)}
    if not bad.any():
        return PredicateReport(True, None, G, False, details)
    z = np.argwhere(bad)[0]
    for d, p, q in runs:
        if _in_cone(z, p, q):
            return PredicateReport(False, {"chord_start": G.point(p), "chord_end": G.point(q),
                                           "point": G.point(z)}, G, False, details)
    raise AssertionError("uncovered violation")


@dataclass
class HullResult:
    region: Sampled
    converged: bool
    iterations: int
    saturated: bool

    @property
    def mask(self):
        return self.region.mask


def asgeirsson_hull(R: Region, G: GridWindow, radius: int = 2,
                    max_iter: int = 10_000) -> HullResult:
    """Lattice fixpoint of adding the open cones of maximal in-region chords."""
    S = G.evaluate(R) if not isinstance(R, Sampled) else R.mask.copy()
    dirs = lat.timelike_directions(G.s, radius)
    seen = set()
    it = 0
    if lat.timelike_hull_defect(S).any():
        while it < max_iter:
            it += 1
            new = S.copy()
            for key in _run_cones(S, dirs):
                if key not in seen:
                    seen.add(key)
                    lat.raster_cone(new, key[1], key[2])
            if np.array_equal(new, S):
                break
            S = new
            if S.all():
                break
    saturated = bool(S.all())
    converged = not G.on_boundary(S)
    return HullResult(Sampled(S, G), converged, it, saturated)


def _line_groups(G: GridWindow, d):
    """Lattice lines of direction d crossing the window from bottom to top face.

    Yields (starts, K) per starting time offset: array indices of first samples
    whose last sample (after K steps) is still inside the window. Also returns
    how many candidate lines left the window sideways.
    """
    shape = np.array(G.shape)
    d = np.array(d)
    n0 = shape[0]
    groups, clipped = [], 0
    spatial = np.stack(np.meshgrid(*[np.arange(n) for n in shape[1:]], indexing="ij"),
                       axis=-1).reshape(-1, G.s)
    for i0 in range(d[0]):
        K = (n0 - 1 - i0) // d[0]
        end = spatial + K * d[1:]
        ok = np.all((end >= 0) & (end < shape[1:]), axis=1)
        clipped += int((~ok).sum())
        if ok.any():
            st = np.concatenate([np.full((ok.sum(), 1), i0), spatial[ok]], axis=1)
            groups.append((st, K))
    return groups, clipped


def _exact_related(S_pts: np.ndarray, pts: np.ndarray, future: bool) -> np.ndarray:
    """pts lying strictly in I+ (future=True) or I- of the point cloud S_pts."""
    out = np.zeros(len(pts), dtype=bool)
    for i, x in enumerate(pts):
        d = (x - S_pts) if future else (S_pts - x)
        out[i] = bool(np.any(timelike_future(d)))
    return out


def is_jld_region(R: Region, G: GridWindow, radius: int = 2,
                  curves: Optional[list] = None) -> PredicateReport:
    """Timelike convex, and every full-height timelike lattice line meets R u R^c."""
    tc = is_timelike_convex(R, G)
    if not tc.verdict:
        return PredicateReport(False, {"timelike_convexity": tc.witness}, G, False,
                               {"failed": "timelike convexity"})
    C = causal_complement(R, G)
    S = G.evaluate(R)
    Ip, Im = lat.causal_future(S, True), lat.causal_past(S, True)
    dirs = lat.timelike_directions(G.s, radius)
    checked = clipped_total = 0
    witness = {}
    for d in dirs:
        if witness:
            break
        groups, clipped = _line_groups(G, d)
        clipped_total += clipped
        m = int(np.abs(d).max())
        for starts, K in groups:
            ks = np.arange(K * m + 1) / m
            idx = starts[:, None, :] + ks[None, :, None] * np.array(d)
            pts = (idx - G.offset) * G.h
            hit = (R.contains(pts) | C.contains(pts)).any(axis=1)
            lat_idx = tuple(np.moveaxis(idx[:, ::m, :].astype(np.int64), -1, 0))
            im, ip = Im[lat_idx], Ip[lat_idx]
            n = im.shape[1]
            first_im = np.where(im.any(axis=1), np.argmax(im, axis=1), n)
            last_ip = np.where(ip.any(axis=1), n - 1 - np.argmax(ip[:, ::-1], axis=1), -1)
            ok = hit | (first_im <= last_ip)
            checked += len(ok)
            if not ok.all():
                j = int(np.argmin(ok))
                witness["line"] = {"start": pts[j, 0], "direction": np.array(d) * G.h,
                                   "samples": pts[j, ::max(1, len(ks) // 8)]}
                break
    details = {"lines": checked, "clipped_lines": clipped_total, "directions": len(dirs)}
    for c_i, curve in enumerate(curves or []):
        curve = np.asarray(curve, dtype=float)
        hit = (R.contains(curve) | C.contains(curve)).any()
        if not hit:
            S_pts = G.points()[S.ravel()]
            fm = _exact_related(S_pts, curve, future=False)
            fp = _exact_related(S_pts, curve, future=True)
            crosses = fm.any() and fp.any() and np.argmax(fm) <= len(fp) - 1 - np.argmax(fp[::-1])
            if not crosses:
                witness["curve"] = {"index": c_i, "samples": curve}
                break
    if witness:
        return PredicateReport(False, witness, G, False, details)
    return PredicateReport(True, None, G, False, details)


def union_preserves_timelike_convexity(R: Region, S: Region, T: Region,
                                       G: GridWindow) -> PredicateReport:
    """Check the shared Cauchy-surface sample T, then timelike convexity of R u S."""
    mT = G.evaluate(T)
    if not mT.any():
        raise PreconditionError("surface sample has no lattice points")
    bad = mT & ~(G.evaluate(R) & G.evaluate(S))
    if bad.any():
        z = np.argwhere(bad)[0]
        raise PreconditionError("surface sample leaves R n S", {"point": G.point(z)})
    rep = is_timelike_convex(Union((R, S)), G)
    rep.details["surface_points"] = int(mT.sum())
    return rep


def convexity_defect(mask: np.ndarray, G: GridWindow):
    """A lattice point of conv(S) outside S, or None when S is lattice convex."""
    from scipy.spatial import Delaunay
    idx = np.argwhere(mask)
    if len(idx) <= 1:
        return None
    lo, hi = idx.min(axis=0), idx.max(axis=0)
    box = np.stack(np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)],
                               indexing="ij"), axis=-1).reshape(-1, idx.shape[1])
    box = box[~mask[tuple(box.T)]]
    if len(box) == 0:
        return None
    c = idx.mean(axis=0)
    _, sv, Vt = np.linalg.svd(idx - c, full_matrices=False)
    r = int(np.sum(sv > 1e-9 * max(1.0, sv[0])))
    B = Vt[:r]
    resid = (box - c) - ((box - c) @ B.T) @ B
    near = np.linalg.norm(resid, axis=1) < 1e-7
    cand = box[near]
    if len(cand) == 0:
        return None
    P, Q = (idx - c) @ B.T, (cand - c) @ B.T
    if r == 1:
        inside = (Q[:, 0] >= P.min() - 1e-9) & (Q[:, 0] <= P.max() + 1e-9)
    else:
        inside = Delaunay(P).find_simplex(Q, tol=1e-9) >= 0
    if not inside.any():
        return None
    return G.point(cand[np.argmax(inside)])


def is_convex(R: Region, G: GridWindow) -> PredicateReport:
    """Lattice convexity: lattice points of conv(R n L) all lie in R."""
    mask = G.evaluate(R) if not isinstance(R, Sampled) else R.mask
    z = convexity_defect(mask, G)
    if z is None:
        return PredicateReport(True, None, G, False, {"points": int(mask.sum())})
    return PredicateReport(False, {"point": z}, G, False, {"points": int(mask.sum())})
