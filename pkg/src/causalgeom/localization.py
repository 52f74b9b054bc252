"""Localization regions of abstract observables and the associated decision procedures.

An observable is a tag carrying finite catalogs of regions whose algebras
contain it: direct catalogs (A in A(O)'') and dual catalogs (A in A(O')').
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lattice as lat
from .causal_ops import (PreconditionError, PredicateReport, _is_lorentz_any, _jsonable,
                         is_causally_complete, is_convex)
from .minkowski import classify, rest_frame
from .hyperboloid import apex_region, epsilon_shrink, inflate, shrink_inputs
from .regions import (DoubleCone, Intersection, Region, Sampled, Translate, Wedge,
                      LinearMap)
from .window import GridWindow

CATALOG_SCHEMA = "causalgeom.catalog/1"


# ------------------------------------------------------------------ tags

@dataclass(frozen=True, eq=False)
class ObservableTag:
    id: str
    cones: tuple = ()
    wedges: tuple = ()
    dual_cones: tuple = ()
    dual_wedges: tuple = ()
    dual: bool = True

    def __post_init__(self):
        # locality: every direct entry is also a dual entry
        dc = tuple(self.dual_cones) + tuple(c for c in self.cones if c not in self.dual_cones)
        dw = tuple(self.dual_wedges) + tuple(w for w in self.wedges if w not in self.dual_wedges)
        object.__setattr__(self, "cones", tuple(self.cones))
        object.__setattr__(self, "wedges", tuple(self.wedges))
        object.__setattr__(self, "dual_cones", dc)
        object.__setattr__(self, "dual_wedges", dw)

    @property
    def s(self) -> Optional[int]:
        for r in self.dual_cones + self.dual_wedges:
            return r.s
        return None

    def effective_wedges(self) -> tuple[tuple, tuple]:
        """(direct, dual) wedge catalogs after optional wedge-duality saturation."""
        if self.dual:
            both = self.wedges + tuple(w for w in self.dual_wedges if w not in self.wedges)
            return both, both
        return self.wedges, self.dual_wedges

    def to_json(self) -> dict:
        def cone(c):
            return [list(c.a), list(c.b)]
        return {"schema": CATALOG_SCHEMA, "id": self.id,
                "cones": [cone(c) for c in self.cones],
                "wedges": [w.to_json() for w in self.wedges],
                "dual_cones": [cone(c) for c in self.dual_cones if c not in self.cones],
                "dual_wedges": [w.to_json() for w in self.dual_wedges
                                if w not in self.wedges],
                "dual": self.dual}

    @classmethod
    def from_json(cls, doc) -> "ObservableTag":
        if isinstance(doc, str):
            doc = json.loads(doc)
        schema = doc.get("schema", CATALOG_SCHEMA)
        if schema != CATALOG_SCHEMA:
            raise ValueError(f"unsupported catalog schema {schema!r}")

        def wedge(w):
            return Wedge(w["nplus"], w["dplus"], w["nminus"], w["dminus"])
        return cls(str(doc["id"]),
                   tuple(DoubleCone(a, b) for a, b in doc.get("cones", [])),
                   tuple(wedge(w) for w in doc.get("wedges", [])),
                   tuple(DoubleCone(a, b) for a, b in doc.get("dual_cones", [])),
                   tuple(wedge(w) for w in doc.get("dual_wedges", [])),
                   bool(doc.get("dual", True)))


# --------------------------------------------------------------- localize

@dataclass
class LocalizationResult:
    regions: dict
    nonempty: dict
    diagram: dict
    window: GridWindow
    scalar: bool = False
    flag: Optional[str] = None
    bounded: dict = field(default_factory=dict)

    @property
    def L(self) -> np.ndarray:
        return self.regions["L^W"]

    def to_json(self) -> dict:
        return _jsonable({
            "points": {k: int(v.sum()) for k, v in self.regions.items()},
            "nonempty": self.nonempty, "bounded": self.bounded, "diagram": self.diagram,
            "scalar": self.scalar, "flag": self.flag, "resolution": self.window.to_dict()})


def _closure_mask(parts, G) -> np.ndarray:
    m = np.ones(G.shape, dtype=bool)
    for r in parts:
        m &= G.evaluate(r.closure())
    return m


def localize(A: ObservableTag, G: GridWindow) -> LocalizationResult:
    if not (A.cones or A.wedges or A.dual_cones or A.dual_wedges):
        raise ValueError("observable has empty catalogs")
    w_direct, w_dual = A.effective_wedges()
    LK_bold = _closure_mask(A.cones, G)
    LK = _closure_mask(A.dual_cones, G)
    # isotony: every wedge containing a catalog cone belongs to the wedge class,
    # and the intersection of those wedges is the cone's closure
    LW_bold = _closure_mask(w_direct + A.cones, G)
    LW = _closure_mask(w_dual + A.dual_cones, G)
    regions = {"bold L^K": LK_bold, "L^K": LK, "bold L^W": LW_bold, "L^W": LW,
               "bold L^B": LK_bold, "L^B": LK, "bold L^C": LW_bold, "L^C": LW}
    sub = lambda a, b: bool(not (regions[b] & ~regions[a]).any())
    diagram = {"bold L^K >= L^K": sub("bold L^K", "L^K"),
               "bold L^W >= L^W": sub("bold L^W", "L^W"),
               "bold L^K >= bold L^W": sub("bold L^K", "bold L^W"),
               "L^K >= L^W": sub("L^K", "L^W"),
               "bold L^B = bold L^K": True, "L^B = L^K": True,
               "bold L^C = bold L^W": True, "L^C = L^W": True}
    nonempty = {k: bool(v.any()) for k, v in regions.items() if not k.endswith(("B", "C"))}
    bounded = {k: not G.on_boundary(v) for k, v in regions.items()
               if not k.endswith(("B", "C"))}
    scalar, flag = False, None
    if not LW.any():
        wedges = list(w_dual)
        cones = list(A.dual_cones)
        dec = apex_region(wedges, cones, G) if wedges else None
        if dec is None or dec.bracket != "nonempty":
            scalar = True
            flag = ("violates the nonemptiness premise: inconsistent catalog "
                    "for a non-scalar observable")
    elif not all(bounded.values()):
        flag = "unbounded at window scale"
    return LocalizationResult(regions, nonempty, diagram, G, scalar, flag, bounded)


# ------------------------------------------------- empty-intersection decision

def containing_wedges(c: DoubleCone, k: int = 16, fatten: float = 0.0) -> list[Wedge]:
    """k wedges whose intersection is a circumscribed polyhedral approximation of c."""
    if c.s != 2:
        raise ValueError("containing_wedges is implemented for s = 2")
    L = rest_frame(np.array(c.a), np.array(c.b))
    # rest-frame wedges {e.x_vec < R - |x0|} circumscribe the cone of radius r
    R = (c.radius + fatten) / np.cos(np.pi / k)
    out = []
    for th in 2 * np.pi * np.arange(k) / k:
        ex, ey = np.cos(th), np.sin(th)
        W = Wedge([-1.0, -ex, -ey], -R, [1.0, -ex, -ey], -R)
        out.append(W.transformed(L, c.center))
    return out


@dataclass
class EmptyIntersectionDecision:
    empty: Optional[bool]
    witness: Optional[np.ndarray]
    eps: Optional[float]
    transcript: dict
    apex: object

    def to_json(self) -> dict:
        return _jsonable({"empty": self.empty, "witness": self.witness, "eps": self.eps,
                          "transcript": self.transcript, "apex": self.apex.to_json()})


def empty_intersection_decide(wedges: list, cone: Optional[DoubleCone] = None,
                              G: Optional[GridWindow] = None) -> EmptyIntersectionDecision:
    """Decide whether the closures share a point; on emptiness certify an epsilon."""
    cones = [cone] if cone is not None else []
    ap = apex_region(list(wedges), cones, G)
    G = ap.window
    if ap.empty is False:
        return EmptyIntersectionDecision(False, ap.lattice_witness, None, {}, ap)
    if ap.empty is None:
        return EmptyIntersectionDecision(None, None, None, {"warning": ap.warning}, ap)
    # compactify inside the window when no cone bounds the family
    parts = [r.closure() for r in cones + list(wedges)]
    eps, trace = epsilon_shrink(parts, G, return_trace=True)
    # shrink transcript: a centred double cone P of radius eps/2 lies in the eps-ball
    transcript = {"delta_over_3": trace["delta_over_3"], "attempts": trace["attempts"]}
    r = eps / 2
    for _ in range(20):
        s = parts[0].s
        e0 = np.zeros(s + 1)
        e0[0] = r
        P = DoubleCone(-e0, e0)
        if cone is not None:
            Ot, Wt = shrink_inputs(cone, list(wedges), P)
            chk = apex_region(Wt, [Ot], G)
        else:
            _, Wt = shrink_inputs(DoubleCone(-e0 * 2, e0 * 2), list(wedges), P)
            Ot = None
            chk = apex_region(Wt, [], G)
        if chk.empty:
            transcript.update({"P_radius": r, "shrunk_cone": None if Ot is None else [Ot.a, Ot.b],
                               "shrunk_wedges": [w.to_json() for w in Wt],
                               "shrunk_empty": True})
            break
        r /= 2
    else:
        transcript["shrunk_empty"] = False
    return EmptyIntersectionDecision(True, None, eps, transcript, ap)


# -------------------------------------------------------------- separation

def _mask_of(K, G):
    if isinstance(K, np.ndarray):
        return K
    if isinstance(K, Sampled):
        return K.mask
    return G.evaluate(K)


def spacelike_witness(m1, m2, G):
    """A causally related cross pair of lattice points, or None if all are spacelike."""
    related = m2 & ~lat.sampled_complement(m1)
    if not related.any():
        return None
    z = np.argwhere(related)[0]
    pts = np.argwhere(m1)
    d = pts - z
    q = d[:, 0] ** 2 - np.sum(d[:, 1:] ** 2, axis=1)
    j = int(np.argmax(q))
    x, y = G.point(pts[j]), G.point(z)
    return {"x": x, "y": y, "class": classify(x, y)}


def _best_null(P1, P2, sign, dirs):
    """Direction v maximising min_{P1} n.x - max_{P2} n.x for n = (sign, v)."""
    N = np.concatenate([np.full((len(dirs), 1), sign), dirs], axis=1)
    v1 = P1 @ N.T
    v2 = P2 @ N.T
    gap = v1.min(axis=0) - v2.max(axis=0)
    j = int(np.argmax(gap))
    return N[j], gap[j], v1[:, j].min(), v2[:, j].max()


def _directions(s, k=720):
    if s == 1:
        return np.array([[1.0], [-1.0]])
    if s == 2:
        th = 2 * np.pi * np.arange(k) / k
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    rng = np.random.default_rng(0)
    v = rng.normal(size=(k * 4, s))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def separating_wedge(K1, K2, G: GridWindow) -> Wedge:
    """A wedge X with K1 inside X and K2 inside its causal complement on the lattice."""
    m1, m2 = _mask_of(K1, G), _mask_of(K2, G)
    if not m1.any() or not m2.any():
        raise ValueError("both sets must contain lattice points")
    w = spacelike_witness(m1, m2, G)
    if w is not None:
        raise PreconditionError(f"sets are not spacelike separated ({w['class']})", w)
    P1, P2 = G.coords[m1], G.coords[m2]
    c1, c2 = P1.mean(axis=0), P2.mean(axis=0)
    dirs = _directions(G.s)
    toward = (c1 - c2)[1:]
    if np.linalg.norm(toward) > 0:
        dirs = np.concatenate([dirs, toward[None, :] / np.linalg.norm(toward)])
    for refine in range(3):
        nplus, gp, minp, maxp = _best_null(P1, P2, -1.0, dirs)
        nminus, gm, minm, maxm = _best_null(P1, P2, 1.0, dirs)
        if gp > 0 and gm > 0:
            break
        dirs = _directions(G.s, 720 * 4 ** (refine + 1))
    else:
        raise ValueError("no separating wedge found at this angular resolution")
    # offsets halfway across each gap
    X = Wedge(nplus, (maxp + minp) / 2, nminus, (maxm + minm) / 2)
    ok1 = X.contains(P1).all()
    ok2 = X.opposite().contains(P2).all()
    if not (ok1 and ok2):
        raise ValueError("candidate wedge failed lattice validation")
    return X


# --------------------------------------------------------- finite subcover

def _fattened(W: Wedge, delta: float) -> Wedge:
    Wn = W.normalized()
    k = np.sqrt(2.0)
    return Wedge(Wn.nplus, Wn.dplus - delta * k, Wn.nminus, Wn.dminus - delta * k)


def wedge_class_candidates(A: ObservableTag, eps: float, levels=(4, 8, 16),
                           cone_facets: int = 48) -> list[Wedge]:
    """Wedges W with closure(X) inside W for a catalog wedge X, plus wedges containing cones."""
    _, wedges = A.effective_wedges()
    out = []
    for L in levels:
        d = eps / L
        out += [_fattened(W, d) for W in wedges]
        for c in A.dual_cones:
            out += containing_wedges(c, cone_facets, fatten=d)
    return out


def finite_subcover_select(A: ObservableTag, eps: float, G: GridWindow,
                           loc: Optional[LocalizationResult] = None) -> list[Wedge]:
    """Greedy choice of wedges from the class W_A with intersection inside B_eps(L(A))."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps >= min(G.T, G.X):
        raise ValueError("eps larger than the window")
    loc = loc or localize(A, G)
    L = loc.L
    if not L.any():
        raise ValueError("L(A) is empty")
    ball = inflate(L, G, eps)
    cands = wedge_class_candidates(A, eps)
    masks = [G.evaluate(W.closure()) for W in cands]
    run = np.ones(G.shape, dtype=bool)
    chosen = []
    while (run & ~ball).any():
        outside = run & ~ball
        gains = [int((outside & ~m).sum()) for m in masks]
        j = int(np.argmax(gains))
        if gains[j] == 0:
            raise ValueError("catalog insufficient to confine the intersection at this "
                             "eps and resolution")
        chosen.append(cands[j])
        run &= masks[j]
    if G.on_boundary(run):
        raise ValueError("selected intersection touches the window: unbounded at window scale")
    return chosen


# ------------------------------------------------------------- criterion

def _known_complete(R: Region) -> bool:
    if isinstance(R, (Wedge, DoubleCone)):
        return True
    if isinstance(R, Intersection):
        return all(_known_complete(p) for p in R.parts)
    if isinstance(R, Translate):
        return _known_complete(R.inner)
    if isinstance(R, LinearMap):
        return _is_lorentz_any(R.matrix) and _known_complete(R.inner)
    return False


def nonempty_intersection_criterion(wedges: list, R: Region, G: GridWindow) -> PredicateReport:
    """Geometric premise: the closures of the wedges intersect inside R (on the lattice)."""
    if not wedges:
        return PredicateReport(False, None, G, True,
                               {"reason": "empty wedge list: the full space is not inside R"})
    if R.closed:
        raise PreconditionError("R must be open")
    conv = is_convex(R, G)
    if not conv.verdict:
        raise PreconditionError("R is not convex", conv.witness)
    if not _known_complete(R):
        cc = is_causally_complete(R, G)
        if not cc.verdict:
            raise PreconditionError("R is not causally complete", cc.witness)
    inter = _closure_mask(wedges, G)
    bad = inter & ~G.evaluate(R)
    details = {"intersection_points": int(inter.sum()),
               "touches_window": G.on_boundary(inter)}
    if bad.any():
        return PredicateReport(False, {"point": G.point(np.argwhere(bad)[0])}, G, False, details)
    return PredicateReport(True, None, G, False, details)


# ------------------------------------------------------------------ audit

def wedges_spacelike(W1: Wedge, W2: Wedge, G: Optional[GridWindow] = None) -> bool:
    """W2 inside the causal complement of W1 (closed form via normal matching)."""
    a, b = W1.normalized(), W2.normalized()
    for p2, d2, m2, e2 in ((b.nplus, b.dplus, b.nminus, b.dminus),
                           (b.nminus, b.dminus, b.nplus, b.dplus)):
        if np.allclose(p2, -np.array(a.nplus)) and np.allclose(m2, -np.array(a.nminus)):
            # W2: -n.x > d2  implies  -n.x >= -d_a  when d2 >= -d_a
            return d2 >= -a.dplus - 1e-12 and e2 >= -a.dminus - 1e-12
    return False


def locality_audit(A: ObservableTag, B: ObservableTag, G: GridWindow,
                   eps: Optional[float] = None) -> dict:
    report = {"A": A.id, "B": B.id, "resolution": G.to_dict(), "steps": {}}
    la, lb = localize(A, G), localize(B, G)
    for name, loc in (("A", la), ("B", lb)):
        if loc.scalar:
            report.update({"aborted": True, "scalar": name, "flag": loc.flag,
                           "chain_complete": False})
            return _jsonable(report)
    La, Lb = la.L, lb.L
    w = spacelike_witness(La, Lb, G)
    report["spacelike_separated"] = w is None
    pairs = [(i, j) for i, Wa in enumerate(A.effective_wedges()[1])
             for j, Wb in enumerate(B.effective_wedges()[1]) if wedges_spacelike(Wa, Wb)]
    report["catalog_wedge_pairs_spacelike"] = pairs
    report["obstruction"] = (w is None and not pairs)
    if w is not None:
        report.update({"witness": w, "chain_complete": False})
        return _jsonable(report)
    if eps is None:
        from scipy.spatial import cKDTree
        gap = float(cKDTree(G.coords[La]).query(G.coords[Lb])[0].min())
        eps = np.floor(gap / 2 / G.h + 1e-9) * G.h
        while eps > 0:
            Ba, Bb = inflate(La, G, eps), inflate(Lb, G, eps)
            if not (spacelike_witness(Ba, Bb, G) or G.on_boundary(Ba) or G.on_boundary(Bb)):
                break
            eps = np.floor(eps / 2 / G.h + 1e-9) * G.h
        report["gap"] = gap
    if eps <= 0:
        report.update({"chain_complete": False, "reason": "no lattice-resolved eps"})
        return _jsonable(report)
    report["eps"] = float(eps)
    Ba, Bb = inflate(La, G, eps), inflate(Lb, G, eps)
    steps = report["steps"]
    try:
        X = separating_wedge(Ba, Bb, G)
        steps["separating_wedge"] = X.to_json()
    except ValueError as e:
        steps["separating_wedge"] = str(e)
        report["chain_complete"] = False
        return _jsonable(report)
    try:
        sa = finite_subcover_select(A, eps, G, la)
        sb = finite_subcover_select(B, eps, G, lb)
    except ValueError as e:
        steps["subcover"] = str(e)
        report["chain_complete"] = False
        return _jsonable(report)
    steps["subcover_A"] = len(sa)
    steps["subcover_B"] = len(sb)
    ca = not (_closure_mask(sa, G) & ~G.evaluate(X)).any()
    cb = not (_closure_mask(sb, G) & ~G.evaluate(X.opposite().closure())).any()
    steps["subcover_A_inside_X"] = ca
    steps["subcover_B_inside_X_complement"] = cb
    report["chain_complete"] = bool(ca and cb)
    return _jsonable(report)
