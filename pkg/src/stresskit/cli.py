"""Command-line front end.

Exit codes: 0 stressable (or success), 2 not stressable, 1 input or usage
error, 3 the requested routes disagree.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import catalog, io
from .affine import Tolerances
from .criteria import METHODS, check_all
from .errors import DegenerateEdgeError, StressKitError
from .framework import stress_space, validate
from .oneform import build_dual_graph, exactness, fundamental_face_cycles, one_form
from .paths import induced_face_path, is_trivial_monodromy, monodromy, three_cycle_stressable
from .rframework import RFramework, induced_d_framework
from .surgery import resolve

EXIT_OK, EXIT_INPUT, EXIT_NOT_STRESSABLE, EXIT_DISAGREE = 0, 1, 2, 3
REPORT_SCHEMA = 1


class InputError(Exception):
    pass


def _tolerances(args):
    raw = args.tol if args.tol is not None else os.environ.get("STRESSKIT_TOL")
    if raw is None:
        return Tolerances()
    try:
        return Tolerances(eps_rank=float(raw))
    except (ValueError, StressKitError) as exc:
        raise InputError(f"bad tolerance {raw!r}: {exc}") from None


def _load(source, tol):
    """A framework file, or ``catalog:NAME`` for a built-in example."""
    if source.startswith("catalog:"):
        try:
            obj = catalog.get(source.split(":", 1)[1]).build()
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    else:
        try:
            obj = io.read(source)
        except OSError as exc:
            raise InputError(f"{source}: {exc.strerror}") from None
        except StressKitError as exc:
            raise InputError(f"{source}: {exc}") from None
    try:
        fw = induced_d_framework(obj, tol) if isinstance(obj, RFramework) else obj
    except StressKitError as exc:
        raise InputError(f"{source}: {exc}") from None
    rep = validate(fw, tol)
    if not rep.valid:
        raise InputError(f"{source}: invalid framework: {'; '.join(rep.violations[:3])}")
    return fw


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _emit(args, payload, text_lines):
    if getattr(args, "report", "text") == "structured":
        print(json.dumps(_jsonable({"schema": REPORT_SCHEMA, **payload}), indent=1, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _verdict_word(v):
    return {True: "stressable", False: "not stressable", None: "undecided"}[v]


# --- commands ------------------------------------------------------------------------

def cmd_check(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    rng = np.random.default_rng(args.seed)
    methods = METHODS if args.method == "all" else (args.method,)
    agreement = check_all(fw, tol, rng, methods)
    lines = [f"{fw.name or args.path}: {len(fw.faces)} faces, {len(fw.edges)} edges, d={fw.d}"]
    for m, r in agreement.results.items():
        extra = f" ({r.detail['reason']})" if "reason" in r.detail else ""
        lines.append(f"  {m:<10} {_verdict_word(r.verdict)}{extra}")
    payload = {"name": fw.name, "methods": {m: {"verdict": r.verdict, **{k: v for k, v in r.detail.items()
                                                                        if k != "values"}}
                                            for m, r in agreement.results.items()},
               "agree": agreement.agree, "verdict": agreement.verdict}
    if not agreement.agree:
        lines.append("  routes DISAGREE")
        _emit(args, payload, lines)
        return EXIT_DISAGREE
    v = agreement.verdict
    lines.append(f"verdict: {_verdict_word(v)}")
    _emit(args, payload, lines)
    if v is None:
        return EXIT_INPUT
    return EXIT_OK if v else EXIT_NOT_STRESSABLE


def cmd_stress_basis(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    sp = stress_space(fw, tol)
    basis = []
    for s in sp.basis:
        if args.normalize == "first-face":
            anchor = next((s[f] for f in sorted(fw.faces, key=str) if abs(s[f]) > 1e-12), 1.0)
            s = s.scaled(1.0 / anchor)
        basis.append({str(f): s[f] for f in sorted(fw.faces, key=str)})
    lines = [f"dimension {sp.dimension}"]
    for k, b in enumerate(basis):
        lines.append(f"basis[{k}]")
        lines += [f"  {f:<12} {v: .12g}" for f, v in b.items()]
    _emit(args, {"dimension": sp.dimension, "basis": basis}, lines)
    return EXIT_OK if sp.dimension else EXIT_NOT_STRESSABLE


def _cycles(fw, args, rng):
    if args.cycle:
        faces = [f.strip() for f in args.cycle.split(",") if f.strip()]
        try:
            return [induced_face_path(fw, faces, cycle=True)]
        except StressKitError as exc:
            raise InputError(f"--cycle: {exc}") from None
    return fundamental_face_cycles(fw, rng=rng)


def cmd_monodromy(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    try:
        cycles = _cycles(fw, args, np.random.default_rng(args.seed))
        rows = [{"faces": list(c.rail_ids), "monodromy": monodromy(c, tol)} for c in cycles]
    except DegenerateEdgeError as exc:
        _emit(args, {"cycles": [], "reason": str(exc)}, [f"monodromy undefined: {exc}"])
        return EXIT_NOT_STRESSABLE
    for r in rows:
        r["trivial"] = is_trivial_monodromy(r["monodromy"], tol)
    lines = [f"{','.join(map(str, r['faces']))}: m = {r['monodromy']:.12g}" for r in rows]
    _emit(args, {"cycles": rows}, lines)
    return EXIT_OK if all(r["trivial"] for r in rows) else EXIT_NOT_STRESSABLE


def cmd_surgery(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    cycles = _cycles(fw, args, np.random.default_rng(args.seed))
    rows, lines, status = [], [], EXIT_OK
    for c in cycles:
        if len(c) < 3:
            rows.append({"faces": list(c.rail_ids), "resolved": False, "reason": "cycle shorter than 3"})
            lines.append(f"{','.join(map(str, c.rail_ids))}: too short")
            continue
        res = resolve(c, tol)
        row = {"faces": list(c.rail_ids), "length": len(c), "resolved": res.resolved,
               "steps": [str(s) for s in res.steps], "reason": res.reason}
        lines.append(f"{','.join(map(str, c.rail_ids))}: {len(res.steps)} HF steps, "
                     f"{'resolved' if res.resolved else 'unresolved: ' + str(res.reason)}")
        lines += [f"  {s}" for s in res.steps]
        if res.resolved and args.resolve:
            ok = three_cycle_stressable(res.cycle, tol)
            row["condition"] = ok
            lines.append(f"  Cayley condition: {'holds' if ok else 'fails'}")
            if not ok:
                status = EXIT_NOT_STRESSABLE
        rows.append(row)
    _emit(args, {"cycles": rows}, lines)
    return status


def cmd_oneform(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    rng = np.random.default_rng(args.seed)
    try:
        dg = build_dual_graph(fw)
        q = one_form(fw, dg, tol)
    except StressKitError as exc:
        payload = {"exact": False, "defect": math.inf, "reason": str(exc)}
        _emit(args, payload, [f"1-form undefined: {exc}", "max defect inf"])
        return EXIT_NOT_STRESSABLE
    rep = exactness(fw, dg, q, rng=rng)
    rows = [{"arc": [str(c.arc.tail), str(c.arc.head), str(c.arc.edge)], "defect": c.defect} for c in rep.cycles]
    lines = [f"{a['arc'][0]} -> {a['arc'][1]} via {a['arc'][2]}: defect {a['defect']:.3e}" for a in rows]
    lines.append(f"max defect {rep.defect:.3e}: {'exact' if rep.exact else 'not exact'}")
    _emit(args, {"exact": rep.exact, "defect": rep.defect, "cycles": rows}, lines)
    return EXIT_OK if rep.exact else EXIT_NOT_STRESSABLE


def cmd_examples(args):
    if not args.name:
        for name, e in catalog.CATALOG.items():
            print(f"{name:<22} {json.dumps(_jsonable(e.expected))}")
        return EXIT_OK
    try:
        obj = catalog.get(args.name).build()
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    text = io.dumps(obj)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export_mesh(args):
    tol = _tolerances(args)
    fw = _load(args.path, tol)
    sp = stress_space(fw, tol)
    try:
        text = io.to_ply(fw, sp.basis[0] if sp.dimension else None)
    except StressKitError as exc:
        raise InputError(str(exc)) from None
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {len(fw.faces)} faces to {args.out}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stresskit", description="Self-stress analysis of d-frameworks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, report=True):
        sp.add_argument("path", help="framework file, or catalog:NAME")
        sp.add_argument("--tol", type=float, default=None, help="relative rank cutoff (env STRESSKIT_TOL)")
        sp.add_argument("--seed", type=int, default=0, help="seed for spanning-tree choices")
        if report:
            sp.add_argument("--report", choices=("text", "structured"), default="text")

    sp = sub.add_parser("check", help="decide stressability")
    common(sp)
    sp.add_argument("--method", choices=METHODS + ("all",), default="nullspace")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("stress-basis", help="print a basis of the stress space")
    common(sp)
    sp.add_argument("--normalize", choices=("first-face", "unit"), default="unit")
    sp.set_defaults(func=cmd_stress_basis)

    sp = sub.add_parser("monodromy", help="monodromy around face-cycles")
    common(sp)
    sp.add_argument("--cycle", help="comma-separated face ids; default: a fundamental set")
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("surgery", help="HF surgery log for face-cycles")
    common(sp)
    sp.add_argument("--cycle", help="comma-separated face ids; default: a fundamental set")
    sp.add_argument("--resolve", action="store_true", help="also test the resolved 3-cycle")
    sp.set_defaults(func=cmd_surgery)

    sp = sub.add_parser("oneform", help="exactness defects of the dual 1-form")
    common(sp)
    sp.set_defaults(func=cmd_oneform)

    sp = sub.add_parser("examples", help="list or write built-in examples")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("export-mesh", help="write an ASCII PLY mesh with per-face stress")
    common(sp, report=False)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_export_mesh)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StressKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
