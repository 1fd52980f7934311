"""Command-line interface.

Subcommands:

  build    construct a hypersurface pair and write it to a JSON file
  verify   recheck a stored pair (geometry rebuilt from the stored inputs,
           envelope tested against the congruence table in the file)
  bonnet   run the prescribed-mean-curvature frame identity battery
  weyl     run the conformal-curvature checks for a product metric
  curve    integrate the curve-level transform and dump a CSV table

Exit codes: 0 all checks passed, 1 a check failed, 2 bad usage or a bad
input file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import verifier
from ._util import stable_json
from .bonnet_oracle import (
    BRANCHES,
    cross_display_residual,
    cross_true_residual,
    first_order_identity_check,
    make_admissible_jet,
    norm_display_residual,
    second_order_identity_check,
)
from .curve_ribaucour import (
    curve_from_spec,
    first_integral,
    integrate_states,
    project_initial_state,
    ribaucour_curve_transform,
)
from .darboux_factory import FAMILIES, build_pair_from_inputs
from .hypersurface import jet_eval

_DEFAULT_CURVES = {
    0.0: "circle:R=1",
    1.0: "sphere_circle:d=0.5",
    -1.0: "hyperbolic_circle:r=1",
}

_TOL_FLAGS = (
    ("envelope", "envelope tangency"),
    ("common-congruence", "shared congruence"),
    ("conformality", "metric anisotropy"),
    ("b-squared", "squared shape operator match"),
    ("radius-trace", "curvature/radius trace identity"),
    ("darboux", "recovered transform structure"),
)


def _float_list(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated floats, got {text!r}")


def _span(text: str):
    vals = _float_list(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise argparse.ArgumentTypeError(
            f"expected 'lo,hi' with lo < hi, got {text!r}")
    return (vals[0], vals[1])


def _canonical_transverse(family: str, n: int) -> np.ndarray:
    if family == "cone":
        return np.concatenate([[1.0], np.zeros(n - 2)])
    return np.zeros(n - 1)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darboux-forge",
        description="Construct and check sphere-congruence hypersurface pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a pair and write JSON")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--curve", required=True,
                   help="curve spec, e.g. circle:R=1 or ellipse:a=2,b=1")
    p.add_argument("--A", required=True, type=float,
                   help="transform parameter (must exceed the curve's c)")
    p.add_argument("--h0", required=True, type=_float_list,
                   help="initial state h1,h2,h3 (projected before use)")
    p.add_argument("--dim", type=int, default=3,
                   help="hypersurface dimension n (default 3)")
    p.add_argument("--s-range", type=_span, default=(0.0, 2.0 * math.pi))
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="recheck a stored pair file")
    p.add_argument("path")
    for flag, blurb in _TOL_FLAGS:
        key = flag.replace("-", "_")
        p.add_argument(f"--tol-{flag}", type=float, default=None,
                       dest=f"tol_{key}", help=f"tolerance for {blurb}")

    p = sub.add_parser("bonnet", help="frame identity battery")
    p.add_argument("--c", required=True, type=float, choices=[-1.0, 0.0, 1.0])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--branch", choices=BRANCHES + ("both",), default="both")

    p = sub.add_parser("weyl", help="conformal curvature of a product metric")
    p.add_argument("--c", required=True, type=float,
                   help="curvature of the first factor (must exceed -1)")
    p.add_argument("--points", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("curve", help="curve-level transform to CSV")
    p.add_argument("--c", required=True, type=float, choices=[-1.0, 0.0, 1.0])
    p.add_argument("--A", required=True, type=float)
    p.add_argument("--h0", required=True, type=_float_list)
    p.add_argument("--curve", default=None,
                   help="curve spec (default: the unit circle of that geometry)")
    p.add_argument("--s-range", type=_span, default=(0.0, 2.0 * math.pi))
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", required=True)
    return parser


# ---------------------------------------------------------------------------
# build

def _cmd_build(args) -> int:
    try:
        pair = build_pair_from_inputs(args.family, args.curve, args.A,
                                      args.h0, n=args.dim,
                                      s_range=args.s_range, step=args.step)
    except ValueError as exc:
        print(f"build: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"build: {exc}", file=sys.stderr)
        return 1
    doc = pair.to_json()
    with open(args.out, "w") as fh:
        fh.write(stable_json(doc))
        fh.write("\n")
    print(f"built {args.family} pair over {pair.curve.name} "
          f"(n={pair.n}, A={args.A:g})")
    print(f"wrote {args.out} with {len(doc['congruence'])} congruence rows")
    return 0


# ---------------------------------------------------------------------------
# verify

def _file_envelope_report(surface, rows, family: str, n: int,
                          tol: float) -> verifier.CheckReport:
    """Envelope residual of a surface against spheres read from the file.

    Rows hold the congruence at the base transverse point; endpoints are
    skipped to keep finite differencing inside the domain."""
    trans = _canonical_transverse(family, n)
    worst = 0.0
    used = rows[1:-1]
    for row in used:
        u = np.concatenate([[float(row["s"])], trans])
        jet = jet_eval(surface, u)
        center = np.asarray(row["center"], dtype=float)
        d = jet.point - center
        nd = float(np.linalg.norm(d))
        resid = abs(nd - float(row["radius"]))
        dhat = d / nd
        for i in range(jet.first.shape[1]):
            x = jet.first[:, i]
            resid += abs(float(dhat @ x)) / float(np.linalg.norm(x))
        worst = max(worst, resid)
    return verifier.CheckReport(
        name=f"envelope[file:{surface.name}]", max_residual=float(worst),
        tolerance=tol, passed=bool(worst <= tol), samples=len(used))


def _cmd_verify(args) -> int:
    try:
        with open(args.path) as fh:
            doc = json.load(fh)
        if doc.get("format") != "darboux-forge/pair-v1":
            raise KeyError("format")
        family = doc["family"]
        n = int(doc["n"])
        curve_spec = doc["curve"]
        big_a = float(doc["A"])
        h0 = [float(v) for v in doc["h0"]]
        s_range = tuple(float(v) for v in doc["s_range"])
        step = float(doc["step"])
        rows = doc["congruence"]
        phi_rows = doc["conformal_factor"]
        if len(rows) < 4:
            raise ValueError("congruence table too short")
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        print(f"verify: unreadable pair file: {exc!r}", file=sys.stderr)
        return 2

    try:
        pair = build_pair_from_inputs(family, curve_spec, big_a, h0, n=n,
                                      s_range=s_range, step=step)
    except ValueError as exc:
        print(f"verify: stored inputs rejected: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"verify: rebuild failed: {exc}", file=sys.stderr)
        return 1

    tols = dict(verifier.DEFAULT_TOLS)
    for flag, _ in _TOL_FLAGS:
        key = flag.replace("-", "_")
        val = getattr(args, f"tol_{key}")
        if val is not None:
            tols[key] = val

    reports = []
    reports.append(_file_envelope_report(pair.f, rows, family, n,
                                         tols["envelope"]))
    reports.append(_file_envelope_report(pair.f_tilde, rows, family, n,
                                         tols["envelope"]))
    phi_worst = max(abs(pair.conformal_factor(float(r["s"])) - float(r["phi"]))
                    for r in phi_rows)
    reports.append(verifier.CheckReport(
        name="conformal_factor[file]", max_residual=float(phi_worst),
        tolerance=tols["conformality"],
        passed=bool(phi_worst <= tols["conformality"]),
        samples=len(phi_rows)))

    battery = verifier.run_all(pair, tols=tols)
    for item in battery["checks"]:
        reports.append(verifier.CheckReport(
            name=item["name"], max_residual=item["max_residual"],
            tolerance=item["tolerance"], passed=item["pass"],
            samples=item["samples"], detail=item.get("detail", "")))

    for rep in reports:
        print(rep)
    failing = [rep.name for rep in reports if not rep.passed]
    if failing:
        print(f"verify: FAIL ({', '.join(failing)})")
        return 1
    print("verify: PASS")
    return 0


# ---------------------------------------------------------------------------
# bonnet

def _cmd_bonnet(args) -> int:
    if args.trials < 1:
        print("bonnet: --trials must be positive", file=sys.stderr)
        return 2
    branches = BRANCHES if args.branch == "both" else (args.branch,)
    print(f"bonnet identities: c={args.c:g} trials={args.trials} "
          f"seed={args.seed}")
    ok = True
    for branch in branches:
        fo = 0.0
        so = 0.0
        disp_min, disp_max = math.inf, 0.0
        true_max = 0.0
        norm_min = math.inf
        for i in range(args.trials):
            jet = make_admissible_jet(args.seed + i, args.c, branch)
            fo = max(fo, first_order_identity_check(jet).max_residual)
            rep = second_order_identity_check(jet)
            so = max(so, rep.max_residual)
            r = cross_display_residual(jet)
            disp_min, disp_max = min(disp_min, r), max(disp_max, r)
            true_max = max(true_max, cross_true_residual(jet))
            if args.c == 0:
                norm_min = min(norm_min, norm_display_residual(jet))
        fo_ok = fo <= 1e-10
        so_ok = so <= 1e-10
        ok = ok and fo_ok and so_ok
        print(f"[{branch}] first_order: {'pass' if fo_ok else 'FAIL'}  "
              f"max residual {fo:.3e}")
        print(f"[{branch}] second_order: {'pass' if so_ok else 'FAIL'}  "
              f"max residual {so:.3e}")
        if branch == "corrected":
            print(f"[{branch}] mixed term vs derived closed form: "
                  f"max residual {true_max:.3e}")
        verdict = "matches" if disp_max <= 1e-9 else "differs"
        print(f"[{branch}] mixed term vs printed closed form: {verdict}  "
              f"residual range [{disp_min:.3e}, {disp_max:.3e}]")
        if args.c == 0:
            print(f"[{branch}] normal norm vs printed closed form: differs  "
                  f"min residual {norm_min:.3e}")
    print(f"overall: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# weyl

def _cmd_weyl(args) -> int:
    if args.c <= -1.0:
        print("weyl: factor curvature must exceed -1", file=sys.stderr)
        return 2
    if args.points < 1:
        print("weyl: --points must be positive", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    pts = rng.uniform(-0.35, 0.35, size=(args.points, 4))
    rep = verifier.weyl_product_check(args.c, pts, tol=args.tol,
                                      seed=args.seed)
    print(rep)
    resid = verifier.weyl_display_quadratic_residual(args.c, pts,
                                                     seed=args.seed)
    print(f"display quadratic deviation: {resid:.3e} "
          "(nonzero: mixed-block terms are absent from that closed form)")
    return 0 if rep.passed else 1


# ---------------------------------------------------------------------------
# curve

def _cmd_curve(args) -> int:
    spec = args.curve or _DEFAULT_CURVES[args.c]
    try:
        curve = curve_from_spec(spec)
    except ValueError as exc:
        print(f"curve: {exc}", file=sys.stderr)
        return 2
    if curve.c != args.c:
        print(f"curve: spec {spec!r} lives in c={curve.c:g}, "
              f"not c={args.c:g}", file=sys.stderr)
        return 2
    try:
        h = project_initial_state(args.h0, args.A, args.c)
        states = integrate_states(curve, h, args.A, args.s_range, args.step)
    except ValueError as exc:
        print(f"curve: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"curve: {exc}", file=sys.stderr)
        return 1
    transformed = ribaucour_curve_transform(curve, states)
    ncomp = 2 if args.c == 0 else 3
    comp_names = ["x", "y", "z"][:ncomp]
    header = (["s", "h1", "h2", "h3", "K"]
              + [f"phi{cn}" for cn in comp_names]
              + [f"phitil{cn}" for cn in comp_names])
    drift = 0.0
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for st in states:
            kval = first_integral(st.h, st.A, args.c)
            drift = max(drift, abs(kval))
            phi = curve.position(st.s)
            phit = transformed.position(st.s)
            row = [st.s, *st.h, kval, *phi, *phit]
            writer.writerow([f"{v:.17g}" for v in row])
    print(f"wrote {args.out} with {len(states)} rows "
          f"(first integral drift {drift:.3e})")
    if drift > 1e-10:
        print("curve: first-integral drift exceeds 1e-10", file=sys.stderr)
        return 1
    return 0


_DISPATCH = {
    "build": _cmd_build,
    "verify": _cmd_verify,
    "bonnet": _cmd_bonnet,
    "weyl": _cmd_weyl,
    "curve": _cmd_curve,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return _DISPATCH[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
