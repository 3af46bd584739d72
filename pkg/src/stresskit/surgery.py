"""HF-surgeries, the elementary flips, and reduction of cycles to length three.

An HF step at position ``i`` replaces the consecutive edges ``i`` and
``i + 1`` by the meet of the two outer rails and drops the rail between them.
The new hat joins the new edge with the meet of the two old hats, which is
where the resultant force of the removed piece acts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .affine import DEFAULT_TOL, canonical_sign, flats_equal, join, meet, normal_directions
from .errors import SurgeryError, UsageError
from .paths import FacePath, in_general_position, is_edge_orientable, three_cycle_stressable


@dataclass
class SurgeryStep:
    kind: str
    index: int
    derived_plane: object = None

    def __str__(self):
        return f"{self.kind}({self.index})"


@dataclass
class Resolution:
    steps: list
    cycle: FacePath = None
    resolved: bool = False
    reason: str = ""
    rotation: int = 0


@dataclass
class CayleyReport:
    verdict: object  # True, False, or None when some cycle is unresolvable
    cycles: list = field(default_factory=list)


def _rail(c, j):
    return c.rails[j % len(c.rails)] if c.is_cycle else c.rails[j]


def _same_rail(c, j, m, tol):
    n = len(c.rails)
    return c.same_rail(j % n, m % n, tol) if c.is_cycle else c.same_rail(j, m, tol)


def _hf_positions(c, i):
    k = len(c)
    if c.is_cycle:
        return i % k, (i + 1) % k
    if not 0 <= i <= k - 2:
        raise UsageError(f"HF position {i} out of range for a path with {k} edges")
    return i, i + 1


def hf_admissible(c, i, tol=DEFAULT_TOL):
    """(admissible, reason) for an HF step at position ``i``."""
    if len(c) < 4:
        raise UsageError("HF surgery needs a face-cycle of length at least 4")
    a, b = _hf_positions(c, i)
    r0, r2 = _rail(c, i), _rail(c, i + 2)
    if _same_rail(c, i, i + 1, tol) or _same_rail(c, i + 1, i + 2, tol):
        return False, "(i) consecutive rails coincide"
    if _same_rail(c, i, i + 2, tol) or flats_equal(r0, r2, tol):
        return False, "(i) outer rails coincide"
    new_edge = meet(r0, r2, tol)
    if new_edge.dim != c.d - 1:
        return False, "(i) outer rails do not meet in a (d-1)-flat"
    if c.same_hat(a, b, tol):
        return False, "(ii) hats coincide"
    hat_meet = meet(c.hats[a], c.hats[b], tol)
    if hat_meet.dim != c.d - 1:
        return False, "(ii) hats do not meet in a (d-1)-flat"
    if flats_equal(new_edge, hat_meet, tol):
        return False, "(iii) new edge coincides with the meet of the hats"
    if join(new_edge, hat_meet, tol).dim != c.d:
        return False, "(iii) new hat plane has the wrong dimension"
    return True, ""


def hf_surgery(c, i, tol=DEFAULT_TOL):
    """Apply HF at position ``i``; returns (new path, SurgeryStep)."""
    ok, reason = hf_admissible(c, i, tol)
    if not ok:
        raise SurgeryError(f"HF({i}) not admissible: {reason}")
    k = len(c)
    if c.is_cycle:
        rot = c.rotated(i)
        out, step = _hf_at(rot, 0, tol)
        out = out.rotated(-i % (k - 1))
        step.index = i
        return out, step
    return _hf_at(c, i, tol)


def _orient_new_normals(c, i, new_edge, new_hat, tol):
    r0, r1, r2 = _rail(c, i), _rail(c, i + 1), _rail(c, i + 2)
    a, b = _hf_positions(c, i)
    n0 = canonical_sign(normal_directions(r0, new_edge))
    n2 = canonical_sign(normal_directions(r2, new_edge))
    nh = canonical_sign(normal_directions(new_hat, new_edge))
    pa, na, ha = c.normals[a]
    pb, nb, hb = c.normals[b]
    for sign in (1.0, -1.0):
        local = FacePath([c.edges[a], new_edge, c.edges[b]], [r1, r0, r2],
                         [c.hats[a], new_hat, c.hats[b]],
                         [(na, pa, ha), (n0, sign * n2, nh), (nb, pb, hb)], cycle=True)
        if is_edge_orientable(local, tol):
            return n0, sign * n2, nh
    raise SurgeryError("could not orient the new edge")  # unreachable: one sign always works


def _hf_at(c, i, tol):
    a, b = i, i + 1
    r0, r2 = _rail(c, i), _rail(c, i + 2)
    new_edge = meet(r0, r2, tol)
    new_hat = join(new_edge, meet(c.hats[a], c.hats[b], tol), tol)
    normals = _orient_new_normals(c, i, new_edge, new_hat, tol)

    def splice(xs, new):
        return xs[:a] + [new] + xs[b + 1:]

    edges = splice(c.edges, new_edge)
    hats = splice(c.hats, new_hat)
    nrm = splice(c.normals, normals)
    rails = c.rails[:i + 1] + c.rails[i + 2:]
    label = None
    eids = rids = hids = None
    if c.edge_ids is not None:
        label = f"({c.edge_ids[a]}|{c.edge_ids[b]})"
        eids = splice(c.edge_ids, label)
    if c.rail_ids is not None:
        rids = c.rail_ids[:i + 1] + c.rail_ids[i + 2:]
    if c.hat_ids is not None:
        hids = splice(c.hat_ids, f"hat{label or i}")
    out = FacePath(edges, rails, hats, nrm, c.is_cycle, eids, rids, hids)
    return out, SurgeryStep("HF", i, new_hat)


# --- elementary flips ------------------------------------------------------------

def _drop(xs, idx):
    return None if xs is None else [x for n, x in enumerate(xs) if n not in idx]


def has_duplicate(c, j, tol=DEFAULT_TOL):
    """Edge ``j + 1`` repeats edge ``j`` and crosses from a rail to itself."""
    k = len(c)
    if c.is_cycle:
        c, j = c.rotated(j), 0
    if not 0 <= j < k - 1:
        return False
    return (c.same_edge(j, j + 1, tol) and _same_rail(c, j + 1, j + 2, tol)
            and c.same_hat(j, j + 1, tol))


def remove_duplicate(c, j, tol=DEFAULT_TOL):
    if not has_duplicate(c, j, tol):
        raise SurgeryError(f"no duplicate at position {j}")

    def op(p, m):
        n_r = len(p.rails)
        r_drop = {(m + 2) % n_r} if p.is_cycle else {m + 2}
        return FacePath(_drop(p.edges, {m + 1}), _drop(p.rails, r_drop), _drop(p.hats, {m + 1}),
                        _drop(p.normals, {m + 1}), p.is_cycle, _drop(p.edge_ids, {m + 1}),
                        _drop(p.rail_ids, r_drop), _drop(p.hat_ids, {m + 1}))

    if c.is_cycle:
        out = op(c.rotated(j), 0)
        return out.rotated(-j % len(out))
    return op(c, j)


def add_duplicate(c, j):
    """Insert a copy of edge ``j`` right after it, crossing its next rail onto itself."""
    if not 0 <= j < len(c):
        raise UsageError("position out of range")
    nxt = c.next_index(j)
    n_prev, n_next, n_hat = c.normals[j]

    def ins(xs, pos, val):
        return None if xs is None else xs[:pos] + [val] + xs[pos:]

    edges = ins(c.edges, j + 1, c.edges[j])
    hats = ins(c.hats, j + 1, c.hats[j])
    normals = ins(c.normals, j + 1, (n_next, n_next, n_hat))
    eids = ins(c.edge_ids, j + 1, c.edge_ids[j]) if c.edge_ids is not None else None
    hids = ins(c.hat_ids, j + 1, c.hat_ids[j]) if c.hat_ids is not None else None
    rails = ins(c.rails, j + 2, c.rails[nxt])
    rids = ins(c.rail_ids, j + 2, c.rail_ids[nxt]) if c.rail_ids is not None else None
    return FacePath(edges, rails, hats, normals, c.is_cycle, eids, rids, hids)


def has_loop2(c, i, tol=DEFAULT_TOL):
    """Edges ``i`` and ``i + 1`` coincide and the path returns to rail ``i``."""
    k = len(c)
    if c.is_cycle:
        if k < 3:
            return False
        c, i = c.rotated(i), 0
    if not 0 <= i < k - 1:
        return False
    return (c.same_edge(i, i + 1, tol) and _same_rail(c, i, i + 2, tol)
            and c.same_hat(i, i + 1, tol))


def remove_loop2(c, i, tol=DEFAULT_TOL):
    if not has_loop2(c, i, tol):
        raise SurgeryError(f"no loop of length 2 at position {i}")

    def op(p, m):
        n_r = len(p.rails)
        r_drop = {(m + 1) % n_r, (m + 2) % n_r} if p.is_cycle else {m + 1, m + 2}
        e_drop = {m, m + 1}
        return FacePath(_drop(p.edges, e_drop), _drop(p.rails, r_drop), _drop(p.hats, e_drop),
                        _drop(p.normals, e_drop), p.is_cycle, _drop(p.edge_ids, e_drop),
                        _drop(p.rail_ids, r_drop), _drop(p.hat_ids, e_drop))

    if c.is_cycle:
        out = op(c.rotated(i), 0)
        return out.rotated(-i % len(out)) if len(out) else out
    return op(c, i)


def add_loop2(c, i, edge, rail, hat, normals, edge_id=None, rail_id=None, hat_id=None):
    """Step off rail ``i`` through ``edge`` onto ``rail`` and straight back.

    ``normals`` is ``(n(edge, rails[i]), n(edge, rail), n(edge, hat))``.
    """
    if not 0 <= i < len(c.rails):
        raise UsageError("rail position out of range")
    n_back, n_out, n_hat = (np.asarray(n, dtype=float) for n in normals)

    def ins(xs, pos, vals):
        return None if xs is None else xs[:pos] + vals + xs[pos:]

    labelled = c.edge_ids is not None
    edges = ins(c.edges, i, [edge, edge])
    hats = ins(c.hats, i, [hat, hat])
    nrm = ins(c.normals, i, [(n_back, n_out, n_hat), (n_out, n_back, n_hat)])
    rails = ins(c.rails, i + 1, [rail, c.rails[i]])
    eids = ins(c.edge_ids, i, [edge_id, edge_id]) if labelled else None
    hids = ins(c.hat_ids, i, [hat_id, hat_id]) if c.hat_ids is not None else None
    rids = ins(c.rail_ids, i + 1, [rail_id, c.rail_ids[i]]) if c.rail_ids is not None else None
    return FacePath(edges, rails, hats, nrm, c.is_cycle, eids, rids, hids)


# --- resolution --------------------------------------------------------------------

def _greedy(c, tol, max_steps):
    steps = []
    while len(c) > 3:
        if len(steps) >= max_steps:
            return Resolution(steps, c, False, "step limit reached")
        for i in range(len(c)):
            if hf_admissible(c, i, tol)[0]:
                c, step = hf_surgery(c, i, tol)
                steps.append(step)
                break
        else:
            return Resolution(steps, c, False, "no admissible HF step")
    if not in_general_position(c, tol):
        return Resolution(steps, c, False, "final 3-cycle not in general position")
    return Resolution(steps, c, True)


def resolve(c, tol=DEFAULT_TOL, max_steps=None):
    """Reduce a face-cycle to a general-position 3-cycle by lowest-index HF steps.

    If the greedy run from the given start fails, the same greedy run is
    retried from each cyclic rotation.
    """
    if not c.is_cycle:
        raise UsageError("resolve expects a face-cycle")
    if len(c) < 3:
        raise UsageError("resolve needs a cycle of length at least 3")
    if max_steps is None:
        max_steps = 4 * len(c)
    first = _greedy(c, tol, max_steps)
    if first.resolved:
        return first
    for r in range(1, len(c)):
        res = _greedy(c.rotated(r), tol, max_steps)
        if res.resolved:
            res.rotation = r
            return res
    return first


def cayley_condition(c, tol=DEFAULT_TOL):
    """Three-cycle criterion evaluated on the resolved cycle."""
    res = resolve(c, tol)
    if not res.resolved:
        raise SurgeryError(f"cycle is not resolvable: {res.reason}")
    return three_cycle_stressable(res.cycle, tol)


def framework_cayley_check(fw, cycles, tol=DEFAULT_TOL):
    """Combine per-cycle Cayley conditions over a generating set of face-cycles.

    A failing resolved cycle decides False.  Otherwise unresolvable cycles
    leave the verdict undecided (None).
    """
    entries = []
    for c in cycles:
        res = resolve(c, tol)
        ok = three_cycle_stressable(res.cycle, tol) if res.resolved else None
        entries.append({"length": len(c), "resolved": res.resolved, "steps": [str(s) for s in res.steps],
                        "condition": ok, "reason": res.reason,
                        "rails": list(c.rail_ids) if c.rail_ids is not None else None})
    if any(e["condition"] is False for e in entries):
        verdict = False
    elif any(e["condition"] is None for e in entries):
        verdict = None
    else:
        verdict = True
    return CayleyReport(verdict, entries)
