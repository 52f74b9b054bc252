"""Command-line interface: JSON on stdout, short human summaries on stderr."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bitmap, fixtures
from .causal_ops import (PreconditionError, _jsonable, asgeirsson_hull, causal_complement,
                         causal_completion, is_asgeirsson_complete, is_causally_complete,
                         is_closed_form, is_convex, is_jld_region, is_timelike_convex)
from .dsl import DSLError, bind_window, parse_region, print_region
from .hyperboloid import apex_region, jld_envelope
from .localization import (ObservableTag, empty_intersection_decide, localize,
                           separating_wedge)
from .minkowski import classify
from .regions import DoubleCone, Sampled, Wedge
from .wave import SpectralMeasure, dependence_experiment, residual_ratio, wave_residual
from .window import GridWindow

WEDGES_SCHEMA = "causalgeom.wedges/1"


def _vector(text: str) -> np.ndarray:
    return np.array([float(c) for c in text.replace("(", "").replace(")", "").split(",")])


def _window(args) -> GridWindow:
    T, X = args.window
    return GridWindow(T, X, args.h, args.dim)


def _region(args, G: GridWindow, key="region"):
    src = getattr(args, key)
    path = getattr(args, key + "_file", None)
    if path:
        src = Path(path).read_text(encoding="utf-8")
    if src is None:
        raise ValueError(f"--{key.replace('_', '-')} or --{key.replace('_', '-')}-file required")
    return bind_window(parse_region(src, args.dim), G)


def load_wedges(spec: str, s: int):
    """Wedge family from a JSON file or a named fixture ('x120')."""
    if spec in ("x120", "x120.json") and not Path(spec).exists():
        return fixtures.x120(s), []
    doc = json.loads(Path(spec).read_text(encoding="utf-8"))
    if isinstance(doc, list):
        doc = {"wedges": doc}
    if doc.get("schema", WEDGES_SCHEMA) != WEDGES_SCHEMA:
        raise ValueError(f"unsupported wedge schema {doc.get('schema')!r}")
    wedges = [Wedge(w["nplus"], w["dplus"], w["nminus"], w["dminus"]) for w in doc["wedges"]]
    cones = [DoubleCone(a, b) for a, b in doc.get("cones", [])]
    return wedges, cones


def _mask_summary(mask, G):
    return {"points": int(mask.sum()), "sha256": bitmap.region_hash(mask)}


# ----------------------------------------------------------------- commands

def cmd_classify(args):
    c = classify(_vector(args.x), _vector(args.y))
    return {"class": c.value}, c.value


def cmd_pred(args):
    G = _window(args)
    R = _region(args, G)
    if args.timelike_convex:
        rep, name = is_timelike_convex(R, G), "timelike_convex"
    elif args.asgeirsson:
        rep, name = is_asgeirsson_complete(R, G, args.radius), "asgeirsson_complete"
    elif args.causally_complete:
        rep, name = is_causally_complete(R, G), "causally_complete"
    elif args.convex:
        rep, name = is_convex(R, G), "convex"
    else:
        rep = is_jld_region(R, G, args.radius, fixtures.witness_curves(R, G))
        name = "jld"
    return {"predicate": name, "region": print_region(R), **rep.to_json()}, \
        f"{name}: {rep.verdict}"


def cmd_hull(args):
    G = _window(args)
    R = _region(args, G)
    H = asgeirsson_hull(R, G, args.radius)
    doc = {"region": print_region(R), "converged": H.converged, "saturated": H.saturated,
           "iterations": H.iterations, **_mask_summary(H.mask, G),
           "window_points": G.size, "resolution": G.to_dict()}
    if args.bitmap:
        Path(args.bitmap).write_text(bitmap.dumps(H.mask, G), encoding="utf-8")
        doc["bitmap"] = args.bitmap
    return doc, f"hull: {int(H.mask.sum())}/{G.size} points"


def _complement_doc(R, C, G, args):
    exact = is_closed_form(C)
    doc = {"region": print_region(R), "exact": exact}
    if exact:
        try:
            doc["result"] = print_region(C)
        except TypeError:
            doc["result"] = type(C).__name__
    else:
        mask = C.mask if isinstance(C, Sampled) else G.evaluate(C)
        doc.update(_mask_summary(mask, G))
        doc["resolution"] = G.to_dict()
        if args.bitmap:
            Path(args.bitmap).write_text(bitmap.dumps(mask, G), encoding="utf-8")
            doc["bitmap"] = args.bitmap
    return doc


def cmd_complement(args):
    G = _window(args)
    R = _region(args, G)
    doc = _complement_doc(R, causal_complement(R, G), G, args)
    return doc, f"complement exact={doc['exact']}"


def cmd_completion(args):
    G = _window(args)
    R = _region(args, G)
    doc = _complement_doc(R, causal_completion(R, G), G, args)
    return doc, f"completion exact={doc['exact']}"


def _cones_arg(args, s):
    out = []
    for c in args.cone or []:
        a, b = c.split(";")
        out.append(DoubleCone(_vector(a), _vector(b)))
    return out


def cmd_apex(args):
    wedges, cones = load_wedges(args.wedges, args.dim)
    cones += _cones_arg(args, args.dim)
    G = _window(args) if args.use_window else None
    ap = apex_region(wedges, cones, G)
    return ap.to_json(), f"apex: {ap.bracket}"


def cmd_empty_intersection(args):
    wedges, cones = load_wedges(args.wedges, args.dim)
    cones += _cones_arg(args, args.dim)
    if len(cones) > 1:
        raise ValueError("at most one cone")
    G = _window(args)
    pairs = []
    for i in range(len(wedges)):
        for j in range(i + 1, len(wedges)):
            ap = apex_region([wedges[i], wedges[j]], [], G)
            pairs.append({"pair": [i, j], "empty": ap.empty, "witness": ap.lattice_witness})
    d = empty_intersection_decide(wedges, cones[0] if cones else None, G)
    doc = d.to_json()
    doc["pairwise"] = _jsonable(pairs)
    return doc, f"empty={d.empty} eps={d.eps}"


def cmd_localize(args):
    G = _window(args)
    tag = ObservableTag.from_json(Path(args.catalog).read_text(encoding="utf-8"))
    res = localize(tag, G)
    doc = {"id": tag.id, **res.to_json()}
    return doc, f"localize: scalar={res.scalar}"


def cmd_envelope(args):
    G = _window(args)
    wedges, cones = load_wedges(args.wedges, args.dim)
    O = cones[0] if cones else fixtures.centered_cone(args.dim, args.cone_radius)
    res = jld_envelope(O, wedges, G, args.radii, args.angles)
    return res.to_json(), f"envelope: rho_hat={res.rho_hat}"


def cmd_separate(args):
    G = _window(args)
    K1 = _region(args, G, "k1")
    K2 = _region(args, G, "k2")
    X = separating_wedge(K1, K2, G)
    return {"wedge": X.to_json(), "resolution": G.to_dict()}, "separating wedge found"


def cmd_wave(args):
    rng = np.random.default_rng(args.seed)
    if args.mode == "residual":
        G = GridWindow(args.extent, args.extent, args.h, args.dim)
        out = []
        for _ in range(args.measures):
            m = SpectralMeasure.random(args.dim, int(rng.integers(1, args.points + 1)), rng)
            r = wave_residual(m, G)
            out.append({"points": len(m.weights), "residual": r,
                        "ratio": residual_ratio(m, G, args.h)})
        ok = all(abs(o["ratio"] - 4) <= 0.8 for o in out)
        return {"mode": "residual", "measures": out, "second_order": ok}, \
            f"second order: {ok}"
    rep = dependence_experiment(args.dim, h=args.step, seed=args.seed)
    return {"mode": "dependence", **rep.to_json()}, f"dependence: {rep.verdict}"


def cmd_fixtures(args):
    G = _window(args)
    doc = fixtures.run_fixture_suite(G, hull=not args.no_hull)
    timings = doc.pop("timings")
    if args.timing:
        doc["timings"] = timings
    doc["resolution"] = G.to_dict()
    failed = [f"{r['fixture']}: {r['check']}" for r in doc["results"] if not r["pass"]]
    return doc, "all fixtures pass" if not failed else "failed: " + "; ".join(failed)


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalgeom", description=__doc__)
    p.add_argument("--dim", type=int, default=2, help="number of space dimensions s")
    p.add_argument("--window", type=float, nargs=2, default=[3.0, 3.0], metavar=("T", "X"))
    p.add_argument("--h", type=float, default=0.1, help="lattice spacing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="suppress the stderr summary")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing to the JSON")
    sub = p.add_subparsers(dest="command", required=True)

    def region_args(q, key="region"):
        flag = "--" + key.replace("_", "-")
        q.add_argument(flag, dest=key)
        q.add_argument(flag + "-file", dest=key + "_file")

    q = sub.add_parser("classify")
    q.add_argument("x")
    q.add_argument("y")
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("pred")
    g = q.add_mutually_exclusive_group(required=True)
    for f in ("--timelike-convex", "--asgeirsson", "--causally-complete", "--jld", "--convex"):
        g.add_argument(f, action="store_true")
    region_args(q)
    q.add_argument("--radius", type=int, default=2, help="direction-set radius")
    q.set_defaults(func=cmd_pred)

    q = sub.add_parser("hull")
    region_args(q)
    q.add_argument("--radius", type=int, default=2)
    q.add_argument("--bitmap")
    q.set_defaults(func=cmd_hull)

    for name, fn in (("complement", cmd_complement), ("completion", cmd_completion)):
        q = sub.add_parser(name)
        region_args(q)
        q.add_argument("--bitmap")
        q.set_defaults(func=fn)

    for name, fn in (("apex", cmd_apex), ("empty-intersection", cmd_empty_intersection)):
        q = sub.add_parser(name)
        q.add_argument("--wedges", required=True, help="wedge JSON file or 'x120'")
        q.add_argument("--cone", action="append", help="'a;b' tips, e.g. '-1,0,0;1,0,0'")
        if name == "apex":
            q.add_argument("--use-window", action="store_true",
                           help="search the global window instead of a fitted one")
        q.set_defaults(func=fn)

    q = sub.add_parser("localize")
    q.add_argument("--catalog", required=True)
    q.set_defaults(func=cmd_localize)

    q = sub.add_parser("envelope")
    q.add_argument("--wedges", default="x120")
    q.add_argument("--cone-radius", type=float, default=1.0)
    q.add_argument("--radii", type=float, nargs="+")
    q.add_argument("--angles", type=int, default=360)
    q.set_defaults(func=cmd_envelope)

    q = sub.add_parser("separate")
    region_args(q, "k1")
    region_args(q, "k2")
    q.set_defaults(func=cmd_separate)

    q = sub.add_parser("wave")
    q.add_argument("mode", choices=["residual", "dependence"])
    q.add_argument("--measures", type=int, default=5)
    q.add_argument("--points", type=int, default=8)
    q.add_argument("--extent", type=float, default=0.5)
    q.add_argument("--step", type=float, help="solver grid spacing for dependence "
                   "(default 0.05 in 1+1, 0.0125 in 1+2)")
    q.set_defaults(func=cmd_wave)

    q = sub.add_parser("fixtures")
    q.add_argument("--no-hull", action="store_true", help="skip the R+ u R- hull fixpoint")
    q.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    schema = "causalgeom." + args.command.replace("-", "_") + "/1"
    t0 = time.perf_counter()
    try:
        doc, summary = args.func(args)
        code = 0
        if args.command == "fixtures" and not doc["all_pass"]:
            code = 1
    except (DSLError, PreconditionError, ValueError, TypeError, OSError) as e:
        doc = {"error": type(e).__name__, "message": str(e)}
        if isinstance(e, DSLError):
            doc.update(e.to_json())
        if isinstance(e, PreconditionError) and e.witness is not None:
            doc["witness"] = e.witness
        schema, summary, code = "causalgeom.error/1", f"error: {e}", 2
    elapsed = time.perf_counter() - t0
    doc = _jsonable(doc)
    doc["schema"] = schema
    if args.timing:
        doc["timing"] = round(elapsed, 3)
    sys.stdout.write(json.dumps(doc, sort_keys=True, ensure_ascii=False) + "\n")
    if not args.json:
        print(f"{summary} ({elapsed:.2f}s)", file=sys.stderr)
    return code
