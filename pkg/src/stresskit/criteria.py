"""The four stressability tests side by side.

``nullspace`` solves the equilibrium system directly.  The other three only
apply to trivalent, face-connected frameworks: ``monodromy`` transports a
stress around a fundamental set of face-cycles, ``oneform`` checks exactness
of the dual 1-form, and ``cayley`` resolves each of those face-cycles to a
3-cycle and tests the incidence condition.  A route that cannot decide
returns ``None``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .affine import DEFAULT_TOL
from .errors import DegenerateEdgeError, StressKitError
from .framework import is_face_connected, stress_space
from .oneform import EXACTNESS_TOL, build_dual_graph, fundamental_face_cycles, oneform_check
from .paths import is_trivial_monodromy, monodromy
from .surgery import framework_cayley_check

METHODS = ("nullspace", "monodromy", "oneform", "cayley")


@dataclass
class MethodResult:
    method: str
    verdict: object  # True, False or None
    detail: dict = field(default_factory=dict)


def _applicable(fw):
    if not fw.faces or not fw.edges:
        return "empty framework"
    if any(len(fw.faces_at(e)) != 3 for e in fw.edges):
        return "framework is not trivalent"
    if not is_face_connected(fw):
        return "framework is not face-connected"
    return None


def check_nullspace(fw, tol=DEFAULT_TOL, rng=None):
    sp = stress_space(fw, tol)
    return MethodResult("nullspace", sp.dimension > 0, {"dimension": sp.dimension})


def check_monodromy(fw, tol=DEFAULT_TOL, rng=None):
    why = _applicable(fw)
    if why:
        return MethodResult("monodromy", None, {"reason": why})
    try:
        cycles = fundamental_face_cycles(fw, rng=rng)
        values = [monodromy(c, tol) for c in cycles]
    except DegenerateEdgeError as exc:
        return MethodResult("monodromy", False, {"reason": str(exc), "edge": exc.edge})
    worst = max((abs(m - 1.0) for m in values), default=0.0)
    return MethodResult("monodromy", all(is_trivial_monodromy(m, tol) for m in values),
                        {"cycles": len(values), "max_deviation": worst,
                         "values": values})


def check_oneform(fw, tol=DEFAULT_TOL, rng=None, exact_tol=EXACTNESS_TOL):
    why = _applicable(fw)
    if why:
        return MethodResult("oneform", None, {"reason": why})
    rep = oneform_check(fw, tol, exact_tol, rng)
    detail = {"defect": rep.defect, "cycles": len(rep.cycles)}
    if rep.degenerate_edges:
        detail["degenerate_edges"] = rep.degenerate_edges
    return MethodResult("oneform", rep.exact, detail)


def check_cayley(fw, tol=DEFAULT_TOL, rng=None):
    why = _applicable(fw)
    if why:
        return MethodResult("cayley", None, {"reason": why})
    try:
        cycles = fundamental_face_cycles(fw, build_dual_graph(fw), rng=rng)
    except DegenerateEdgeError as exc:
        return MethodResult("cayley", None, {"reason": str(exc)})
    short = [c for c in cycles if len(c) < 3]
    if short:
        return MethodResult("cayley", None, {"reason": f"{len(short)} face-cycles shorter than 3"})
    try:
        rep = framework_cayley_check(fw, cycles, tol)
    except StressKitError as exc:
        return MethodResult("cayley", None, {"reason": str(exc)})
    return MethodResult("cayley", rep.verdict, {"cycles": rep.cycles})


CHECKS = {
    "nullspace": check_nullspace,
    "monodromy": check_monodromy,
    "oneform": check_oneform,
    "cayley": check_cayley,
}


@dataclass
class Agreement:
    results: dict

    @property
    def decided(self):
        return {m: r.verdict for m, r in self.results.items() if r.verdict is not None}

    @property
    def agree(self):
        return len(set(self.decided.values())) <= 1

    @property
    def verdict(self):
        vals = set(self.decided.values())
        return vals.pop() if len(vals) == 1 else None


def check_all(fw, tol=DEFAULT_TOL, rng=None, methods=METHODS):
    """Run the requested routes; undecided routes do not count against agreement."""
    return Agreement({m: CHECKS[m](fw, tol, rng) for m in methods})


def finite(x):
    return x if isinstance(x, (int, bool)) or math.isfinite(x) else None
