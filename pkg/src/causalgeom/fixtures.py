"""Named regions and catalogs: the counterexample suite and the 120-degree wedge family."""
from __future__ import annotations

import time

import numpy as np

from .causal_ops import (asgeirsson_hull, is_asgeirsson_complete, is_causally_complete,
                         is_convex, is_jld_region, is_timelike_convex)
from .localization import ObservableTag
from .minkowski import rotation
from .regions import (DoubleCone, HalfSpace, Intersection, LightlikeHalfPlane, Region, Shell,
                      TimeSlice, Union, Wedge, wedge_from_poincare)
from .window import GridWindow


def time_slice(s: int = 2) -> Region:
    return TimeSlice(0.0, 1.0)


def timelike_cones(s: int = 2) -> Region:
    e = np.zeros(s + 1)
    e[0] = 1.0
    return Union([DoubleCone(-2.5 * e, -0.5 * e), DoubleCone(0.5 * e, 2.5 * e)])


def r_plus(s: int = 2, rho: float = 0.5) -> Region:
    """rho x1 < x0 < rho x1 + 1."""
    n = np.zeros(s + 1)
    n[0], n[1] = 1.0, -rho
    return Intersection([HalfSpace(n, 0.0), HalfSpace(-n, -1.0)])


def r_minus(s: int = 2, rho: float = 0.5) -> Region:
    """-rho x1 < x0 < 1 - rho x1."""
    n = np.zeros(s + 1)
    n[0], n[1] = 1.0, rho
    return Intersection([HalfSpace(n, 0.0), HalfSpace(-n, -1.0)])


def shell(s: int = 2) -> Region:
    return Shell(1.0, 2.0)


def hyperbola(s: int = 2, tmax: float = 3.0, samples: int = 200) -> np.ndarray:
    """The timelike curve t -> (sinh t, cosh t, 0, ...) restricted to |sinh t| <= tmax."""
    t = np.linspace(-np.arcsinh(tmax), np.arcsinh(tmax), samples)
    out = np.zeros((samples, s + 1))
    out[:, 0], out[:, 1] = np.sinh(t), np.cosh(t)
    return out


def witness_curves(R: Region, G: GridWindow) -> list:
    """Fixture curves attached to regions containing a shell."""
    stack = [R]
    while stack:
        r = stack.pop()
        if isinstance(r, Shell):
            return [hyperbola(G.s, min(G.T, G.X))]
        stack.extend(r.children())
    return []


def half_plane(s: int = 2) -> Region:
    return LightlikeHalfPlane(s)


def x120(s: int = 2, offset: float = 1.0) -> list[Wedge]:
    """X = W1 + offset e1 and its images under 120 and 240 degree rotations in the 1-2 plane."""
    if s < 2:
        raise ValueError("the 120-degree family needs s >= 2")
    e = np.zeros(s + 1)
    e[1] = offset
    X = wedge_from_poincare(s, translation=e)
    out = [X]
    for k in (1, 2):
        out.append(X.transformed(rotation(s, 1, 2, 2 * np.pi * k / 3), np.zeros(s + 1)))
    return out


def centered_cone(s: int = 2, radius: float = 1.0) -> DoubleCone:
    e = np.zeros(s + 1)
    e[0] = radius
    return DoubleCone(-e, e)


def audit_tags(s: int = 2, radius: float = 2.5) -> tuple[ObservableTag, ObservableTag]:
    X, Y, Z = x120(s)
    O = centered_cone(s, radius)
    return ObservableTag("A", (O,), (X, Y)), ObservableTag("B", (O,), (Y, Z))


def scalar_tag(s: int = 2) -> ObservableTag:
    return ObservableTag("S", (), tuple(x120(s)))


def triangle_tag(s: int = 2) -> ObservableTag:
    """Opposite wedges X', Y', Z' meeting in a compact triangular double pyramid."""
    ws = []
    for W in x120(s):
        o = W.opposite()
        ws.append(Wedge(o.nplus, o.dplus, o.nminus, o.dminus))
    return ObservableTag("T", (), tuple(ws))


CORPUS = {
    "time_slice": "timeslice(0, 1)",
    "timelike_cones": "union(dcone((-2.5,0,0),(-0.5,0,0)), dcone((0.5,0,0),(2.5,0,0)))",
    "r_plus": "{x0 - 0.5*x1 > 0} ∩ {x0 - 0.5*x1 < 1}",
    "r_minus": "{x0 + 0.5*x1 > 0} ∩ {x0 + 0.5*x1 < 1}",
    "r_union": "({x0 - 0.5*x1 > 0} ∩ {x0 - 0.5*x1 < 1}) ∪ ({x0 + 0.5*x1 > 0} ∩ {x0 + 0.5*x1 < 1})",
    "shell": "shell(1,2) ∩ {x₀>0}",
    "half_plane": "lhp",
    "w1": "w1",
    "x120_X": "translate(w1, (0,1,0))",
}


def run_fixture_suite(G: GridWindow, hull: bool = True) -> dict:
    """Boolean verdicts of the counterexample suite on window G."""
    s = G.s
    results = []
    timings = {}

    def add(name, check, value, witness=None):
        results.append({"fixture": name, "check": check, "pass": bool(value),
                        **({"witness": witness} if witness is not None else {})})

    t = time.perf_counter()
    TS = time_slice(s)
    add("time_slice", "timelike convex", is_timelike_convex(TS, G).verdict)
    add("time_slice", "JLD", is_jld_region(TS, G).verdict)
    add("time_slice", "not causally complete", not is_causally_complete(TS, G).verdict)
    timings["time_slice"] = time.perf_counter() - t

    t = time.perf_counter()
    C = timelike_cones(s)
    add("timelike_cones", "Asgeirsson complete", is_asgeirsson_complete(C, G).verdict)
    tc = is_timelike_convex(C, G)
    add("timelike_cones", "not timelike convex", not tc.verdict, tc.witness)
    timings["timelike_cones"] = time.perf_counter() - t

    t = time.perf_counter()
    Rp, Rm = r_plus(s), r_minus(s)
    add("r_plus", "Asgeirsson complete", is_asgeirsson_complete(Rp, G).verdict)
    add("r_minus", "Asgeirsson complete", is_asgeirsson_complete(Rm, G).verdict)
    U = Union([Rp, Rm])
    uc = is_asgeirsson_complete(U, G)
    add("r_union", "not Asgeirsson complete", not uc.verdict, uc.witness)
    if hull:
        H = asgeirsson_hull(U, G)
        add("r_union", "hull saturates window", H.saturated,
            {"hull_points": int(H.mask.sum()), "window_points": G.size,
             "converged": H.converged})
    timings["r_pm"] = time.perf_counter() - t

    t = time.perf_counter()
    S = shell(s)
    add("shell", "timelike convex", is_timelike_convex(S, G).verdict)
    j = is_jld_region(S, G, curves=witness_curves(S, G))
    add("shell", "not JLD", not j.verdict, j.witness)
    add("shell", "hyperbola witness", bool(j.witness) and "curve" in j.witness)
    timings["shell"] = time.perf_counter() - t

    t = time.perf_counter()
    HP = half_plane(s)
    add("half_plane", "causally complete", is_causally_complete(HP, G).verdict)
    add("half_plane", "convex", is_convex(HP, G).verdict)
    timings["half_plane"] = time.perf_counter() - t

    return {"results": results, "all_pass": all(r["pass"] for r in results),
            "timings": timings}
