"""Mass hyperboloids, apex regions, the epsilon induction, shifted inputs and the envelope N."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from .causal_ops import PredicateReport, is_jld_region, is_timelike_convex
from .cylinder import CylinderSpacetime, cylinder_restrict, cylinder_timelike_convex
from .minkowski import TAU, as_coords, interval, rest_frame
from .regions import (ConeComplement, DoubleCone, Intersection, PointSet, Region,
                      Sampled, Union, Wedge)
from .window import GridWindow


# --------------------------------------------------------------- hyperboloids

@dataclass(frozen=True)
class MassHyperboloid:
    a: tuple
    sigma: float

    def __init__(self, a, sigma):
        if sigma < 0:
            raise ValueError("mass must be non-negative")
        object.__setattr__(self, "a", tuple(float(v) for v in np.ravel(a)))
        object.__setattr__(self, "sigma", float(sigma))

    @property
    def s(self):
        return len(self.a) - 1

    def residual(self, points) -> np.ndarray:
        return interval(as_coords(points) - np.array(self.a)) - self.sigma ** 2

    def contains(self, points, band: float = 0.0) -> np.ndarray:
        """Points within (approximate Euclidean) distance band of the surface."""
        p = as_coords(points)
        f = np.abs(self.residual(p))
        grad = 2.0 * np.linalg.norm(p - np.array(self.a), axis=-1)
        return f <= band * grad + TAU * (1.0 + self.sigma ** 2)


def is_admissible(H: MassHyperboloid, R: Region, G: GridWindow) -> PredicateReport:
    """No lattice point of R within max(h, tau) of H."""
    band = max(G.h, TAU)
    hit = G.evaluate(R) & H.contains(G.coords, band)
    if not hit.any():
        return PredicateReport(True, None, G, False, {"band": band})
    idx = np.argwhere(hit)
    # report the hit closest to the surface
    pts = np.array([G.point(i) for i in idx])
    j = int(np.argmin(np.abs(H.residual(pts))))
    return PredicateReport(False, {"point": pts[j]}, G, False, {"band": band, "hits": len(idx)})


def shifted_cone_disjoint(a, R: Region, G: GridWindow) -> bool:
    """True when the closed full light cone a + closure(V) misses R on the lattice."""
    d = G.coords - np.asarray(a, dtype=float)
    q = interval(d)
    cone = q >= -TAU * np.sum(d * d, axis=-1)
    return not (cone & G.evaluate(R)).any()


# ------------------------------------------------------------- support data

def cone_support_min(n, a, b) -> float:
    """min of the Euclidean pairing n.x over the closed double cone with tips a, b."""
    n, a, b = (np.asarray(v, dtype=float) for v in (n, a, b))
    if np.allclose(a, b):
        return float(n @ a)
    L = rest_frame(a, b)
    r = np.sqrt(interval(b - a)) / 2
    w = L.T @ n
    return float(n @ ((a + b) / 2) - r * max(abs(w[0]), np.linalg.norm(w[1:])))


def _tips(P):
    if isinstance(P, DoubleCone):
        return np.array(P.a), np.array(P.b)
    if isinstance(P, PointSet) and len(P.points) == 1:
        return P.points[0], P.points[0]
    p = np.asarray(P, dtype=float).ravel()
    return p, p


def minkowski_sum_completion(R: Region, P) -> Region:
    """(R + P)^cc for a double cone or wedge R and a double cone (or point) P."""
    aP, bP = _tips(P)
    if isinstance(R, DoubleCone):
        return DoubleCone(np.array(R.a) + aP, np.array(R.b) + bP, R.closed)
    if isinstance(R, Wedge):
        return Wedge(R.nplus, R.dplus + cone_support_min(R.nplus, aP, bP),
                     R.nminus, R.dminus + cone_support_min(R.nminus, aP, bP), R.closed)
    raise TypeError(f"no closed form for {type(R).__name__} + P")


def shrink_inputs(O: DoubleCone, wedges: list, P) -> tuple:
    """(O - P)^cc and (W - P)^cc for each wedge."""
    aP, bP = _tips(P)
    minus_P = (-bP, -aP)
    Ot = DoubleCone(np.array(O.a) - bP, np.array(O.b) - aP, O.closed)
    Wt = []
    for W in wedges:
        Wt.append(Wedge(W.nplus, W.dplus + cone_support_min(W.nplus, *minus_P),
                        W.nminus, W.dminus + cone_support_min(W.nminus, *minus_P), W.closed))
    return Ot, Wt


# ------------------------------------------------------------------ apex sets

def _sphere_directions(s: int, k: int) -> np.ndarray:
    if s == 1:
        return np.array([[1.0], [-1.0]])
    if s == 2:
        th = 2 * np.pi * np.arange(k) / k
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    # quasi-uniform directions: axes plus a Fibonacci-like spread in the first three axes
    rng = np.random.default_rng(0)
    v = rng.normal(size=(k, s))
    v = np.concatenate([v, np.eye(s), -np.eye(s)])
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _cone_outer(c: DoubleCone, k: int):
    """Half-spaces A x <= b circumscribing the closed cone (tangent facets)."""
    a, b = np.array(c.a), np.array(c.b)
    L = rest_frame(a, b)
    Linv = np.linalg.inv(L)
    m = (a + b) / 2
    r = np.sqrt(interval(b - a)) / 2
    rows = []
    for w in _sphere_directions(c.s, k):
        for sgn in (1.0, -1.0):
            rows.append(np.concatenate([[sgn], w]))
    A_rest = np.array(rows) / np.sqrt(2.0)
    A = A_rest @ Linv
    bvec = np.full(len(A), r / np.sqrt(2.0)) + A @ m
    return A, bvec


def _cone_inner(c: DoubleCone, k: int, shrink: float = 1e-6) -> np.ndarray:
    """Vertices of a polytope inscribed in the open cone."""
    a, b = np.array(c.a), np.array(c.b)
    L = rest_frame(a, b)
    m = (a + b) / 2
    r = np.sqrt(interval(b - a)) / 2 * (1 - shrink)
    V = [np.concatenate([[r], np.zeros(c.s)]), np.concatenate([[-r], np.zeros(c.s)])]
    for w in _sphere_directions(c.s, k):
        V.append(np.concatenate([[0.0], r * w]))
    return m + np.array(V) @ L.T


def _wedge_rows(wedges):
    A, b = [], []
    for W in wedges:
        for n, d in ((W.nplus, W.dplus), (W.nminus, W.dminus)):
            n = np.array(n)
            nn = np.linalg.norm(n)
            A.append(-n / nn)
            b.append(-d / nn)
    dim = wedges[0].s + 1 if wedges else None
    return np.array(A).reshape(-1, dim) if A else None, np.array(b)


def max_slack(A, b, extra_box: float = 1e3):
    """max t subject to A x + t <= b, t <= 1, |x_i| <= box; returns (t, x)."""
    m, n = A.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    bounds = [(-extra_box, extra_box)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"slack LP failed: {res.message}")
    return float(res.x[-1]), res.x[:-1]


def farkas_certificate(A, b, tol: float = 1e-9):
    """y >= 0 with A^T y = 0 and b.y = -1 proving A x <= b infeasible, or None."""
    m, n = A.shape
    A_eq = np.vstack([A.T, b[None, :]])
    b_eq = np.concatenate([np.zeros(n), [-1.0]])
    res = linprog(np.ones(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    if res.status != 0:
        return None
    y = res.x
    if np.abs(A.T @ y).max() > tol * max(1.0, np.abs(y).max()) or b @ y > -0.5:
        return None
    return y


@dataclass
class ApexRegion:
    region: Region
    empty: Optional[bool]
    bracket: str
    slack_outer: float
    slack_inner: Optional[float]
    lattice_empty: bool
    lattice_witness: Optional[np.ndarray] = None
    certificate: Optional[np.ndarray] = None
    window: Optional[GridWindow] = None
    warning: Optional[str] = None

    def to_json(self) -> dict:
        from .causal_ops import _jsonable
        return _jsonable({
            "empty": self.empty, "bracket": self.bracket,
            "slack_outer": self.slack_outer, "slack_inner": self.slack_inner,
            "lattice_empty": self.lattice_empty, "lattice_witness": self.lattice_witness,
            "farkas": self.certificate, "warning": self.warning,
            "resolution": None if self.window is None else self.window.to_dict(),
        })


def _default_window(s: int, cones) -> GridWindow:
    ext = 4.0
    for c in cones:
        ext = max(ext, np.abs(c.a).max() + 1, np.abs(c.b).max() + 1)
    return GridWindow(ext, ext, ext / 40, s)


def apex_region(wedges: list, cones: list, G: Optional[GridWindow] = None,
                facets: int = 64) -> ApexRegion:
    """Intersection of the inputs with an emptiness verdict for its closure.

    Bracket: an LP over a circumscribed polytope of each cone proves emptiness
    (max common slack < 0); an LP over inscribed polytopes proves nonemptiness
    (slack > 0). The lattice search runs independently; disagreement with a
    decided bracket is reported as a warning.
    """
    parts = list(cones) + list(wedges)
    if not parts:
        raise ValueError("apex_region needs at least one region")
    s = parts[0].s
    region = Intersection(parts) if len(parts) > 1 else parts[0]
    Aw, bw = _wedge_rows(wedges)
    rows_A = [] if Aw is None else [Aw]
    rows_b = [] if Aw is None else [bw]
    for c in cones:
        A, b = _cone_outer(c, facets)
        rows_A.append(A)
        rows_b.append(b)
    A_out, b_out = np.vstack(rows_A), np.concatenate(rows_b)
    t_out, _ = max_slack(A_out, b_out)
    t_in = None
    x_in = None
    if cones:
        # x = V lambda over the product of inscribed polytopes is not convex in
        # general; use the first cone's inscribed polytope and the other cones'
        # circumscribed facets, which is still inner for the first cone only
        # when there is one cone (the case used throughout).
        if len(cones) == 1:
            V = _cone_inner(cones[0], facets)
            k = len(V)
            if Aw is None:
                t_in, x_in = 1.0, V.mean(axis=0)
            else:
                A_l = Aw @ V.T
                c = np.zeros(k + 1)
                c[-1] = -1.0
                A_ub = np.hstack([A_l, np.ones((len(A_l), 1))])
                A_eq = np.concatenate([np.ones(k), [0.0]])[None, :]
                res = linprog(c, A_ub=A_ub, b_ub=bw, A_eq=A_eq, b_eq=[1.0],
                              bounds=[(0, None)] * k + [(None, 1.0)], method="highs")
                if res.status == 0:
                    t_in, x_in = float(res.x[-1]), V.T @ res.x[:-1]
    else:
        t_in = t_out
    tol = 1e-9
    certificate = None
    if t_out < -tol:
        bracket = "empty"
        certificate = farkas_certificate(A_out, b_out)
    elif t_in is not None and t_in > tol:
        bracket = "nonempty"
    elif t_in is not None and abs(t_in) <= tol and not cones:
        bracket = "touching"
    else:
        bracket = "undecided"

    G = G or _default_window(s, cones)
    closure = Intersection([p.closure() for p in parts])
    hit = G.evaluate(closure)
    lattice_empty = not hit.any()
    witness = G.point(np.argwhere(hit)[0]) if not lattice_empty else None
    warning = None
    if bracket == "empty":
        empty = lattice_empty
        if not lattice_empty:
            warning = "LP proves emptiness but the lattice found a point"
    elif bracket in ("nonempty", "touching"):
        empty = False
        if lattice_empty:
            warning = "bracket proves a common point the lattice does not resolve"
            witness = x_in
    else:
        empty = None
        warning = "bracket undecided; lattice verdict only: " + \
            ("empty" if lattice_empty else "nonempty")
    return ApexRegion(region, empty, bracket, t_out, t_in, lattice_empty, witness,
                      certificate, G, warning)


# ------------------------------------------------------------ epsilon induction

def _masks(regions, G):
    return [R.mask if isinstance(R, Sampled) else G.evaluate(R) for R in regions]


def _distance(G, m1, m2) -> float:
    p1, p2 = G.coords[m1], G.coords[m2]
    d, _ = cKDTree(p1).query(p2, k=1)
    return float(d.min())


def _eps_recursive(G, masks) -> float:
    """delta/3 with delta the largest gap between one region and the rest."""
    if not all(m.any() for m in masks):
        raise ValueError("a region of the family is empty")
    best = 0.0
    for i in range(len(masks)):
        head = np.logical_and.reduce(masks[:i] + masks[i + 1:])
        if head.any():
            best = max(best, _distance(G, head, masks[i]) / 3.0)
    if best == 0.0 and len(masks) > 2:
        # some proper subfamily is already disjoint
        return _eps_recursive(G, masks[1:])
    return best


def inflate(mask: np.ndarray, G: GridWindow, eps: float) -> np.ndarray:
    if not mask.any():
        return mask.copy()
    return distance_transform_edt(~mask) <= eps / G.h + 1e-9


def neighborhoods_disjoint(masks, G, eps) -> bool:
    return not np.logical_and.reduce([inflate(m, G, eps) for m in masks]).any()


def epsilon_shrink(regions: list, G: GridWindow, return_trace: bool = False):
    """epsilon > 0 whose neighbourhoods of the regions still share no lattice point."""
    masks = _masks(regions, G)
    if len(masks) < 2:
        raise ValueError("need at least two regions with empty common intersection")
    if np.logical_and.reduce(masks).any():
        raise ValueError("regions have a common lattice point")
    eps_raw = _eps_recursive(G, masks)
    eps = np.floor(eps_raw / G.h + 1e-9) * G.h
    if eps <= 0:
        raise ValueError("separation below the lattice spacing")
    trace = [(float(eps), None)]
    while not neighborhoods_disjoint(masks, G, eps):
        eps = np.floor(eps / 2 / G.h + 1e-9) * G.h
        if eps <= 0:
            raise ValueError("no lattice-resolved epsilon found")
        trace.append((float(eps), None))
    eps = float(round(eps, 12))
    if return_trace:
        return eps, {"delta_over_3": eps_raw, "attempts": [t[0] for t in trace]}
    return eps


# -------------------------------------------------------------- envelope N

@dataclass
class EnvelopeResult:
    N: Sampled
    rho_hat: float
    radii: list
    contains_R: bool
    timelike_convex: PredicateReport
    jld: PredicateReport
    apex: ApexRegion
    cylinder_reports: list = field(default_factory=list)
    missing: Optional[np.ndarray] = None

    def to_json(self) -> dict:
        from .causal_ops import _jsonable
        return _jsonable({
            "rho_hat": self.rho_hat, "radii": self.radii, "contains_R": self.contains_R,
            "missing_point": self.missing,
            "timelike_convex": self.timelike_convex.to_json(),
            "jld": self.jld.to_json(), "apex": self.apex.to_json(),
            "cylinder_timelike_convex": [r.to_json() for r in self.cylinder_reports],
            "points": int(self.N.mask.sum()),
        })


def target_region(O: DoubleCone, wedges: list) -> Region:
    """O' u union of W': interiors of the causal complements."""
    parts = [ConeComplement(O.a, O.b, closed=False)]
    parts += [Wedge(-np.array(W.nplus), -W.dplus, -np.array(W.nminus), -W.dminus)
              for W in wedges]
    return Union(parts)


def spacelike_surface(W: Wedge) -> tuple[np.ndarray, float]:
    """Edge-containing hyperplane u.x = c inside W u W^c with slope 1/2 for W1."""
    Wn = W.normalized()
    u = np.array(Wn.nminus) - 3.0 * np.array(Wn.nplus)
    c = Wn.dminus - 3.0 * Wn.dplus
    return u, c


def _surface_in_strip(W, rho, rho0, n_angles) -> bool:
    u, c = spacelike_surface(W)
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    xs = rho * np.stack([np.cos(th), np.sin(th)], axis=1)
    t = (c - xs @ u[1:]) / u[0]
    return bool(np.abs(t).max() <= rho - rho0 + 1e-12)


def find_rho_hat(O: DoubleCone, wedges: list, G: GridWindow, n_angles: int = 360) -> float:
    rho0 = O.radius
    cap = float(np.sqrt(G.T ** 2 + G.s * G.X ** 2))
    rho_hat = rho0
    for W in wedges:
        lo, hi = 0.0, rho0
        while not _surface_in_strip(W, hi, rho0, n_angles):
            lo, hi = hi, 2 * hi
            if hi > 2 * cap:
                raise ValueError("window too small to enclose the spacelike surface")
        while hi - lo > G.h / 4:
            mid = (lo + hi) / 2
            if _surface_in_strip(W, mid, rho0, n_angles):
                hi = mid
            else:
                lo = mid
        rho_hat = max(rho_hat, hi)
        if hi > cap:
            raise ValueError("window too small: rho_hat exceeds the window radius")
    return float(rho_hat)


def _vertical_intervals(O: DoubleCone, wedges, rho, thetas):
    """Maximal time intervals of R on each vertical line of Z_rho."""
    rho0 = O.radius
    out = []
    for th in thetas:
        xs = rho * np.array([np.cos(th), np.sin(th)])
        iv = []
        if rho > rho0:
            iv.append((-(rho - rho0), rho - rho0))
        for W in wedges:
            lo, hi = -np.inf, np.inf
            for n, d in ((W.nplus, W.dplus), (W.nminus, W.dminus)):
                # opposite open wedge: n.x - d < 0 along x = (t, xs)
                n = np.array(n)
                a, b = n[0], n[1:] @ xs - d
                root = -b / a
                if a > 0:
                    hi = min(hi, root)
                else:
                    lo = max(lo, root)
            if lo < hi:
                iv.append((lo, hi))
        iv.sort()
        merged = []
        for a, b in iv:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        out.append((xs, merged))
    return out


def envelope_mask(O, wedges, G: GridWindow, radii, n_angles: int = 360) -> np.ndarray:
    pts = G.coords
    t = pts[..., 0]
    sp = pts[..., 1:]
    N = np.zeros(G.shape, dtype=bool)
    for rho in radii:
        th = 2 * np.pi * np.arange(n_angles) / n_angles
        for xs, ivs in _vertical_intervals(O, wedges, rho, th):
            r = np.linalg.norm(sp - xs, axis=-1)
            for a, b in ivs:
                N |= (t - a > r) & (b - t > r)
    return N


def jld_envelope(O: DoubleCone, wedges: list, G: GridWindow,
                 radii: Optional[list] = None, n_angles: int = 360,
                 radius: int = 2) -> EnvelopeResult:
    """Union over cylinder radii of the double cones spanned by vertical chords of R n Z_rho."""
    if G.s == 1:
        raise ValueError("the envelope needs s >= 2")
    if G.s != 2:
        raise ValueError("the envelope is implemented for s = 2")
    c = O.center
    if np.abs(c).max() > 1e-9 or np.abs(np.array(O.b)[1:] - np.array(O.a)[1:]).max() > 1e-9:
        raise ValueError("translate coordinates so the cone is centred on the time axis")
    rho0 = O.radius
    rho_hat = find_rho_hat(O, wedges, G, n_angles)
    if radii is None:
        radii = [rho_hat + 1, rho_hat + 2, rho_hat + 4]
    if len(radii) == 0:
        raise ValueError("empty radius list")
    if all(r <= rho0 for r in radii):
        raise ValueError("all radii below the cone radius: strips are empty")
    use = [float(r) for r in radii if r > rho_hat]
    if not use:
        raise ValueError("all radii <= rho_hat")
    R = target_region(O, wedges)
    cyl = []
    for rho in use:
        Z = CylinderSpacetime(rho, n_angles, max(G.T, rho) + rho)
        cyl.append(cylinder_timelike_convex(cylinder_restrict(R, Z)))
    N = envelope_mask(O, wedges, G, use, n_angles)
    Rm = G.evaluate(R)
    missing = Rm & ~N
    Ns = Sampled(N, G)
    tc = is_timelike_convex(Ns, G)
    jld = is_jld_region(Ns, G, radius=radius)
    apex = apex_region(wedges, [O], G)
    miss_pt = G.point(np.argwhere(missing)[0]) if missing.any() else None
    return EnvelopeResult(Ns, rho_hat, use, not missing.any(), tc, jld, apex, cyl, miss_pt)
