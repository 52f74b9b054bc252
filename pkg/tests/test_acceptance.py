"""Acceptance criteria 1-8, each at its stated tolerance. One PASS/FAIL line per criterion."""
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from causalgeom import fixtures
from causalgeom import lattice as lat
from causalgeom.causal_ops import is_convex
from causalgeom.dsl import DSLError, parse_region, print_region
from causalgeom.hyperboloid import (apex_region, epsilon_shrink, jld_envelope,
                                    minkowski_sum_completion, neighborhoods_disjoint)
from causalgeom.localization import (ObservableTag, containing_wedges, localize,
                                     locality_audit, separating_wedge, spacelike_witness)
from causalgeom.minkowski import boost, rotation
from causalgeom.regions import (DoubleCone, HalfSpace, Intersection, Sampled, Wedge,
                                wedge_from_poincare)
from causalgeom.wave import (SpectralMeasure, dependence_experiment, evaluate_F, evaluate_f,
                             wave_residual)
from causalgeom.window import GridWindow

CORPUS = Path(__file__).parent / "corpus"


# ------------------------------------------------------------------ 1

def test_criterion_1_fixture_suite(record):
    G = GridWindow(3, 3, 0.1, 2)
    t0 = time.perf_counter()
    doc = fixtures.run_fixture_suite(G)
    elapsed = time.perf_counter() - t0
    for r in doc["results"]:
        print(f"  {r['fixture']}: {r['check']} -> {'ok' if r['pass'] else 'FAILED'}")
    failed = [f"{r['fixture']}:{r['check']}" for r in doc["results"] if not r["pass"]]
    ok = not failed and elapsed < 300
    record("CRITERION 1 fixture suite", ok,
           f"({elapsed:.0f}s; failed: {', '.join(failed) or 'none'})")
    assert elapsed < 300
    assert not failed, failed


# ------------------------------------------------------------------ 2

def _lattice_sum(G, mA, mB):
    """Lattice Minkowski sum of two masks (window origin at index G.offset)."""
    out = np.zeros_like(mA)
    for p in np.argwhere(mB) - np.array(G.offset):
        out |= lat.shift(mA, -p)
    return out


def _rand_cone(rng, lo, hi, tmax):
    while True:
        a = rng.integers(lo, hi + 1, size=3).astype(float)
        d = np.concatenate([[rng.integers(1, tmax + 1)], rng.integers(-2, 3, size=2)]).astype(float)
        if d[0] > np.hypot(d[1], d[2]):
            return DoubleCone(a, a + d, closed=True)


def _rand_wedge(rng):
    perm = rng.permutation(2)
    sign = rng.choice([-1, 1], size=2)
    L = np.eye(3)
    L[1:, 1:] = 0
    for i in range(2):
        L[1 + perm[i], 1 + i] = sign[i]
    return Wedge.w1(2).transformed(L, rng.integers(-3, 4, size=3).astype(float)).closure()


def test_criterion_2_minkowski_sum_oracle(record):
    rng = np.random.default_rng(2026)
    n, margin = 14, 8
    G = GridWindow(n, n, 1.0, 2)
    Gb = GridWindow(n + margin, n + margin, 1.0, 2)
    inner = tuple(slice(margin, margin + 2 * n + 1) for _ in range(3))
    cone_bad = 0
    for _ in range(200):
        O, P = _rand_cone(rng, -3, 3, 4), _rand_cone(rng, -3, 3, 3)
        S = _lattice_sum(G, G.evaluate(O), G.evaluate(P))
        oracle = lat.sampled_complement(lat.sampled_complement(S))
        cone_bad += int((oracle != G.evaluate(minkowski_sum_completion(O, P))).sum())
    wedge_bad = 0
    for _ in range(50):
        W, P = _rand_wedge(rng), _rand_cone(rng, -3, 3, 3)
        S = _lattice_sum(Gb, Gb.evaluate(W), Gb.evaluate(P))
        oracle = lat.sampled_complement(lat.sampled_complement(S))[inner]
        wedge_bad += int((oracle != G.evaluate(minkowski_sum_completion(W, P))).sum())
    ok = cone_bad == 0 and wedge_bad == 0
    record("CRITERION 2 Minkowski-sum completion oracle", ok,
           f"(cone mismatches {cone_bad}, wedge mismatches {wedge_bad})")
    assert cone_bad == 0 and wedge_bad == 0


# ------------------------------------------------------------------ 3

def _farkas_ok(wedges, y):
    rows, b = [], []
    for W in wedges:
        for nv, d in ((W.nplus, W.dplus), (W.nminus, W.dminus)):
            nv = np.array(nv)
            rows.append(-nv / np.linalg.norm(nv))
            b.append(-d / np.linalg.norm(nv))
    A, b = np.array(rows), np.array(b)
    y = np.asarray(y)
    return bool(y.min() >= -1e-12 and np.abs(A.T @ y).max() < 1e-9 and b @ y < 0)


def _pipeline(wedges, cones, G):
    """Emptiness via LP bracket and lattice, then a re-verified eps."""
    ap = apex_region(wedges, cones, G)
    parts = [c.closure() for c in cones] + [w.closure() for w in wedges]
    eps = epsilon_shrink(parts, G)
    masks = [G.evaluate(p) for p in parts]
    reverify = eps > 0 and neighborhoods_disjoint(masks, G, eps)
    return ap, eps, reverify


def test_criterion_3_empty_intersection(record):
    G = GridWindow(3, 3, 0.1, 2)
    X, Y, Z = fixtures.x120(2)
    pair_ok = True
    for A, B in ((X, Y), (X, Z), (Y, Z)):
        ap = apex_region([A, B], [], G)
        w = ap.lattice_witness
        pair_ok &= ap.empty is False and w is not None and \
            bool(A.closure().contains(w)) and bool(B.closure().contains(w))
    ap, eps, reverify = _pipeline([X, Y, Z], [], G)
    triple_ok = (ap.bracket == "empty" and ap.lattice_empty and ap.empty is True
                 and ap.certificate is not None and _farkas_ok([X, Y, Z], ap.certificate)
                 and reverify)
    # two strictly disjoint cones; each side fattened to a containing wedge family
    O = DoubleCone((-0.5, -1.5, 0), (0.5, -1.5, 0))
    P = DoubleCone((-0.5, 1.5, 0), (0.5, 1.5, 0))
    disjoint_ok = True
    for cone, other in ((O, P), (P, O)):
        ws = containing_wedges(other, 16)
        assert all(w.contains(G.coords[G.evaluate(other.closure())]).all() for w in ws)
        ap2, eps2, rev2 = _pipeline(ws, [cone], G)
        disjoint_ok &= ap2.bracket == "empty" and ap2.lattice_empty and rev2
    ok = pair_ok and triple_ok and disjoint_ok
    record("CRITERION 3 empty-intersection core", ok,
           f"(pairs {pair_ok}, triple {triple_ok} eps={eps}, disjoint cones {disjoint_ok})")
    assert ok


# ------------------------------------------------------------------ 4

def test_criterion_4_envelope(record):
    G = GridWindow(3, 3, 0.15, 2)
    O = fixtures.centered_cone(2, 1.0)
    t0 = time.perf_counter()
    res = jld_envelope(O, fixtures.x120(2), G)
    elapsed = time.perf_counter() - t0
    expected = [res.rho_hat + 1, res.rho_hat + 2, res.rho_hat + 4]
    ok = (np.allclose(res.radii, expected) and res.contains_R and res.timelike_convex.verdict
          and res.jld.verdict and res.apex.empty is True and elapsed < 900)
    record("CRITERION 4 envelope N", ok,
           f"(rho_hat={res.rho_hat}, N>=R {res.contains_R}, TC {res.timelike_convex.verdict}, "
           f"JLD {res.jld.verdict}, apex empty {res.apex.empty}, {elapsed:.0f}s)")
    assert ok


# ------------------------------------------------------------------ 5

def _random_catalog(rng, G, k):
    p = np.round(rng.uniform(-0.6, 0.6, 3) / G.h) * G.h

    def cone(rmax):
        t1, t2 = rng.uniform(0.4, rmax, 2)
        v1, v2 = rng.uniform(-0.3, 0.3, 2) * t1, rng.uniform(-0.3, 0.3, 2) * t2
        return DoubleCone(p - np.r_[t1, v1], p + np.r_[t2, v2])

    def wedge():
        b, th, r = rng.uniform(-0.8, 0.8), rng.uniform(0, 2 * np.pi), rng.uniform(0.1, 1.0)
        inside = rotation(2, 1, 2, th) @ boost(2, b) @ np.array([0.0, r, 0.0])
        return wedge_from_poincare(2, boost=b, angle=th, translation=p - inside)

    cones = tuple(cone(1.2) for _ in range(rng.integers(1, 3)))
    dual_cones = tuple(cone(1.8) for _ in range(rng.integers(0, 3)))
    ws = [wedge() for _ in range(rng.integers(1, 3) + rng.integers(0, 3))]
    nd = int(rng.integers(1, len(ws) + 1))
    return ObservableTag(f"c{k}", cones, tuple(ws[:nd]), dual_cones, tuple(ws[nd:]),
                         dual=bool(rng.integers(0, 2)))


def test_criterion_5_localization_diagram(record):
    G = GridWindow(3, 3, 0.2, 2)
    rng = np.random.default_rng(321)
    bad = []
    for k in range(100):
        A = _random_catalog(rng, G, k)
        res = localize(A, G)
        R = res.regions
        sub = lambda a, b: not (R[b] & ~R[a]).any()
        diagram = (sub("bold L^K", "L^K") and sub("bold L^W", "L^W")
                   and sub("bold L^K", "bold L^W") and sub("L^K", "L^W")
                   and np.array_equal(R["bold L^B"], R["bold L^K"])
                   and np.array_equal(R["L^B"], R["L^K"])
                   and np.array_equal(R["bold L^C"], R["bold L^W"])
                   and np.array_equal(R["L^C"], R["L^W"]))
        four = ("bold L^K", "L^K", "bold L^W", "L^W")
        nonempty = all(R[n].any() for n in four)
        compact = all(not G.on_boundary(R[n]) for n in four)
        convex = all(is_convex(Sampled(R[n], G), G).verdict for n in four)
        if not (diagram and nonempty and compact and convex and not res.scalar):
            bad.append(k)
    # inconsistent catalogs: the empty 120-degree triple, alone or with extra cones
    scal = [fixtures.scalar_tag(2),
            ObservableTag("S2", (fixtures.centered_cone(2, 2.0),), tuple(fixtures.x120(2))),
            ObservableTag("S3", (), tuple(fixtures.x120(2)[:2]), (),
                          (fixtures.x120(2)[2],))]
    flagged = [localize(t, G).scalar for t in scal]
    ok = not bad and all(flagged)
    record("CRITERION 5 localization diagram", ok,
           f"(bad catalogs {bad}, scalar flags {flagged})")
    assert ok


# ------------------------------------------------------------------ 6

def _convex_shape(rng, G, c, r):
    kind = rng.integers(0, 3)
    e = np.r_[r, 0, 0]
    if kind == 0:
        return G.evaluate(DoubleCone(c - e, c + e, closed=True))
    if kind == 1:
        n = np.r_[0, rng.normal(size=2)]
        cut = HalfSpace(n, n @ c - 0.3 * r * np.linalg.norm(n), True)
        return G.evaluate(Intersection([DoubleCone(c - e, c + e, closed=True), cut]))
    pts = c + rng.uniform(-r, r, (6, 3)) * np.r_[0.5, 1, 1]
    tri = Delaunay(pts)
    return (tri.find_simplex(G.coords.reshape(-1, 3)) >= 0).reshape(G.shape)


def test_criterion_6_separation_and_audit(record):
    G = GridWindow(3, 3, 0.2, 2)
    rng = np.random.default_rng(606)
    n = fails = 0
    while n < 500:
        r1, r2 = rng.uniform(0.3, 0.8, 2)
        c1 = rng.uniform(-1.5, 1.5, 3) * np.r_[0.6, 1, 1]
        ang, dt = rng.uniform(0, 2 * np.pi), rng.uniform(-0.6, 0.6)
        dist = abs(dt) + (r1 + r2) * rng.uniform(1.0, 2.2)
        c2 = c1 + np.r_[dt, dist * np.cos(ang), dist * np.sin(ang)]
        if np.abs(c2).max() > 2.2:
            continue
        m1, m2 = _convex_shape(rng, G, c1, r1), _convex_shape(rng, G, c2, r2)
        if not m1.any() or not m2.any() or spacelike_witness(m1, m2, G) is not None:
            continue
        n += 1
        try:
            X = separating_wedge(m1, m2, G)
            valid = X.contains(G.coords[m1]).all() and X.opposite().contains(G.coords[m2]).all()
        except ValueError:
            valid = False
        fails += not valid
    Ga = GridWindow(3, 3, 0.1, 2)
    A, B = fixtures.audit_tags(2)
    audit = locality_audit(A, B, Ga)
    scalar = locality_audit(fixtures.scalar_tag(2), B, Ga)
    ok = (fails == 0 and audit["chain_complete"] and audit["obstruction"]
          and audit["catalog_wedge_pairs_spacelike"] == [] and scalar.get("aborted"))
    record("CRITERION 6 separation and locality audit", ok,
           f"(separation failures {fails}/500, chain {audit['chain_complete']}, "
           f"obstruction {audit['obstruction']}, eps {audit.get('eps')})")
    assert ok


# ------------------------------------------------------------------ 7

def test_criterion_7_wave(record):
    rng = np.random.default_rng(77)
    G = GridWindow(0.5, 0.5, 0.1, 2)
    ratios = []
    for _ in range(5):
        m = SpectralMeasure.random(2, int(rng.integers(1, 9)), rng)
        ratios.append(wave_residual(m, G, 0.1) / wave_residual(m, G, 0.05))
    conv_ok = all(3.2 <= r <= 4.8 for r in ratios)
    m = SpectralMeasure.random(2, 8, rng)
    x = rng.uniform(-2, 2, (200, 3))
    direct = np.array([sum(c * np.exp(1j * (k[0] * p[0] - k[1:] @ p[1:]))
                           for k, c in zip(m.momenta, m.weights)) for p in x])
    F0 = evaluate_F(m, x, np.zeros(200))
    f_ok = np.array_equal(F0, evaluate_f(m, x)) and np.allclose(F0, direct, rtol=0, atol=1e-12)
    d1 = dependence_experiment(1, seed=1)
    d2 = dependence_experiment(2, seed=2)
    dep1 = d1.details["leakage"] == 0.0
    dep2 = d2.details["leakage"] < 1e-8 * d2.details["data_norm"]
    ok = conv_ok and f_ok and dep1 and dep2
    record("CRITERION 7 wave machinery", ok,
           f"(ratios {[round(r, 3) for r in ratios]}, F(x,0)=f {f_ok}, "
           f"1+1 leak {d1.details['leakage']}, 1+2 light-cone leak "
           f"{d2.details['leakage'] / d2.details['data_norm']:.1e} x norm, "
           f"lattice-cone leak {d2.details['lattice_cone_leakage']})")
    assert ok


# ------------------------------------------------------------------ 8

ERROR_CASES = [
    ("dcone((0,0,0),(0,1,0))", 1, 1, "DSLSemanticError"),
    ("union(w1, ", 1, 11, "DSLSyntaxError"),
    ("dcone((1,0,0),(2,0))", 1, 15, "DSLSemanticError"),
    ("wedge((1,0,0),0,(1,1,0),0)", 1, 1, "DSLSemanticError"),
    ("timeslice(1 0)", 1, 13, "DSLSyntaxError"),
    ("w1 ∩\n  $", 2, 3, "DSLSyntaxError"),
    ("inter(w1,\n   lhp,\n   foo)", 3, 4, "DSLSyntaxError"),
    ("{x0 > }", 1, 7, "DSLSyntaxError"),
    ("shell(2,1)", 1, 1, "DSLSemanticError"),
    ("", 1, 1, "DSLSyntaxError"),
    ("w1 w1", 1, 4, "DSLSyntaxError"),
    ("{x5 > 0} ∩ dcone((-1,0,0),(1,0,0))", 1, 1, "DSLSemanticError"),
]


def test_criterion_8_parser(record):
    files = sorted(CORPUS.glob("*.rgn"))
    names = {f.stem for f in files}
    trip_bad = [f.name for f in files
                if parse_region(print_region(parse_region(f.read_text("utf-8"))))
                != parse_region(f.read_text("utf-8"))]
    fixtures_covered = set(fixtures.CORPUS) <= names
    pos_bad = []
    for src, line, col, kind in ERROR_CASES:
        try:
            parse_region(src)
            pos_bad.append(src)
        except DSLError as e:
            if (e.line, e.col, type(e).__name__) != (line, col, kind):
                pos_bad.append((src, e.line, e.col, type(e).__name__))
    cmd = [sys.executable, "-m", "causalgeom", "--json", "--seed", "7", "--h", "0.2",
           "wave", "residual", "--measures", "2"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    cmd2 = [sys.executable, "-m", "causalgeom", "--json", "--h", "0.2",
            "empty-intersection", "--wedges", "x120"]
    outs2 = [subprocess.run(cmd2, capture_output=True, check=True).stdout for _ in range(2)]
    det = outs[0] == outs[1] and outs2[0] == outs2[1] and json.loads(outs[0])["schema"]
    ok = len(files) == 50 and not trip_bad and fixtures_covered and not pos_bad and bool(det)
    record("CRITERION 8 parser and deterministic JSON", ok,
           f"({len(files)} scripts, round-trip failures {trip_bad}, "
           f"position failures {pos_bad}, deterministic {bool(det)})")
    assert ok
