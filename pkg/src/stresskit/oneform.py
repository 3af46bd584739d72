"""Dual graph of a trivalent framework and its multiplicative 1-form.

Across an edge with faces (f, g, h) and normal relation
``l_f n_f + l_g n_g + l_h n_h = 0`` the arc f -> g carries ``q = l_g / l_f``,
the ratio any self-stress must have between g and f.  The framework is
self-stressable exactly when q multiplies to 1 around every dual cycle.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .affine import DEFAULT_TOL
from .errors import DegenerateEdgeError, StressKitError, UsageError
from .framework import Stress, coplanar_decompose, equilibrium_residual
from .paths import induced_face_path

EXACTNESS_TOL = 1e-7


class InconsistentStressError(StressKitError):
    """Propagating the 1-form produced a stress that violates equilibrium."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Arc:
    tail: object
    head: object
    edge: object
    hat: object

    def reversed(self):
        return Arc(self.head, self.tail, self.edge, self.hat)

    @property
    def key(self):
        return (self.tail, self.head, self.edge)


class DualGraph:
    """Faces as nodes; three undirected arcs per trivalent edge."""

    def __init__(self, nodes, arcs):
        self.nodes = list(nodes)
        self.arcs = list(arcs)
        self.adjacency = {f: [] for f in self.nodes}
        for a in self.arcs:
            self.adjacency[a.tail].append(a)
            self.adjacency[a.head].append(a.reversed())

    def components(self):
        seen, comps = set(), []
        for start in self.nodes:
            if start in seen:
                continue
            comp, queue = [], deque([start])
            seen.add(start)
            while queue:
                f = queue.popleft()
                comp.append(f)
                for a in self.adjacency[f]:
                    if a.head not in seen:
                        seen.add(a.head)
                        queue.append(a.head)
            comps.append(comp)
        return comps

    def is_connected(self):
        return len(self.components()) <= 1


def build_dual_graph(fw):
    arcs = []
    for eid in fw.edges:
        at = fw.faces_at(eid)
        if len(at) != 3:
            raise UsageError(f"edge {eid!r} has {len(at)} incident faces; the dual graph needs trivalence")
        f, g, h = at
        arcs += [Arc(f, g, eid, h), Arc(g, h, eid, f), Arc(f, h, eid, g)]
    return DualGraph(fw.faces, arcs)


class OneForm:
    """Directed arc key (tail, head, edge) -> nonzero weight."""

    def __init__(self, values):
        self.values = dict(values)

    def __getitem__(self, arc):
        return self.values[arc.key if isinstance(arc, Arc) else arc]

    def reciprocity_defect(self):
        worst = 0.0
        for (f, g, e), q in self.values.items():
            worst = max(worst, abs(q * self.values[(g, f, e)] - 1.0))
        return worst


def one_form(fw, dg, tol=DEFAULT_TOL):
    values = {}
    by_edge = {}
    for a in dg.arcs:
        by_edge.setdefault(a.edge, set()).update((a.tail, a.head))
    for eid in by_edge:
        at = fw.faces_at(eid)
        lam = dict(zip(at, coplanar_decompose(fw, eid, at, tol)))
        for f in at:
            for g in at:
                if f != g:
                    values[(f, g, eid)] = lam[g] / lam[f]
    return OneForm(values)


def affine_ratio(na, nb, nh):
    """q read off the normals: r = chord(na, nb) meets the line along nh.

    Returns (na - r) : (r - nb) measured along the chord, which equals the
    weight of the arc from the face of ``na`` to the face of ``nb``.
    """
    # r = na + t (nb - na) lies on the line spanned by nh
    chord = nb - na
    A = np.column_stack([chord, -nh])
    t, _ = np.linalg.lstsq(A, -na, rcond=None)[0]
    # (na - r) : (r - nb) = -t : (t - 1)
    return t / (1.0 - t)


@dataclass
class SpanningTree:
    root: object
    parent: dict  # face -> arc from the parent, None for the root
    depth: dict


def spanning_tree(dg, root=None, rng=None):
    """BFS tree; ``rng`` shuffles neighbour order to get different trees."""
    if not dg.nodes:
        raise UsageError("empty dual graph")
    if root is None:
        root = dg.nodes[0] if rng is None else dg.nodes[int(rng.integers(len(dg.nodes)))]
    parent, depth = {root: None}, {root: 0}
    queue = deque([root])
    while queue:
        f = queue.popleft()
        arcs = list(dg.adjacency[f])
        if rng is not None:
            arcs = [arcs[i] for i in rng.permutation(len(arcs))]
        for a in arcs:
            if a.head not in parent:
                parent[a.head] = a
                depth[a.head] = depth[f] + 1
                queue.append(a.head)
    return SpanningTree(root, parent, depth)


def _ancestors(tree, f):
    chain = [f]
    while tree.parent[f] is not None:
        f = tree.parent[f].tail
        chain.append(f)
    return chain


def fundamental_cycle(tree, arc):
    """Directed arcs of the cycle closed by a non-tree ``arc``.

    Goes tail -> head along the arc, up the tree to the common ancestor, then
    down to the tail again.
    """
    tail_chain = _ancestors(tree, arc.tail)
    on_tail_side = set(tail_chain)
    up = []
    g = arc.head
    while g not in on_tail_side:
        a = tree.parent[g]
        up.append(a.reversed())
        g = a.tail
    down = []
    for f in tail_chain:
        if f == g:
            break
        down.append(tree.parent[f])
    return [arc] + up + down[::-1]


@dataclass
class CycleDefect:
    arc: Arc
    log_abs: float
    sign: float

    @property
    def defect(self):
        return math.inf if self.sign < 0 else abs(self.log_abs)


@dataclass
class ExactnessReport:
    exact: bool
    defect: float
    cycles: list = field(default_factory=list)
    tree: SpanningTree = None
    degenerate_edges: list = field(default_factory=list)


def exactness(fw, dg, q, tol=EXACTNESS_TOL, rng=None, root=None):
    """Check that q multiplies to 1 around every fundamental cycle.

    Products are tracked as log-magnitude plus sign; a negative product has
    infinite defect.
    """
    if not dg.is_connected():
        raise UsageError("exactness needs a connected dual graph")
    tree = spanning_tree(dg, root, rng)
    logp, sign = {tree.root: 0.0}, {tree.root: 1.0}
    order = sorted(tree.depth, key=tree.depth.__getitem__)
    for f in order[1:]:
        a = tree.parent[f]
        w = q[a]
        logp[f] = logp[a.tail] + math.log(abs(w))
        sign[f] = sign[a.tail] * math.copysign(1.0, w)
    tree_keys = {a.key for a in tree.parent.values() if a is not None}
    tree_keys |= {a.reversed().key for a in tree.parent.values() if a is not None}
    cycles = []
    for a in dg.arcs:
        if a.key in tree_keys:
            continue
        w = q[a]
        cycles.append(CycleDefect(a, math.log(abs(w)) + logp[a.tail] - logp[a.head],
                                  math.copysign(1.0, w) * sign[a.tail] * sign[a.head]))
    defect = max((c.defect for c in cycles), default=0.0)
    return ExactnessReport(defect < tol, defect, cycles, tree)


def oneform_check(fw, tol=DEFAULT_TOL, exact_tol=EXACTNESS_TOL, rng=None):
    """Exactness verdict, reporting degenerate edges instead of raising.

    An edge whose normals admit no relation with all coefficients nonzero
    leaves the 1-form undefined; the verdict is then False with infinite
    defect and the offending edges listed.
    """
    dg = build_dual_graph(fw)
    bad = []
    for eid in fw.edges:
        try:
            coplanar_decompose(fw, eid, fw.faces_at(eid), tol)
        except DegenerateEdgeError:
            bad.append(eid)
    if bad:
        return ExactnessReport(False, math.inf, [], None, bad)
    q = one_form(fw, dg, tol)
    return exactness(fw, dg, q, exact_tol, rng)


def stress_from_one_form(fw, dg, q, root, s0=1.0, tol=DEFAULT_TOL, exact_tol=EXACTNESS_TOL):
    """Integrate q from ``root`` along a spanning tree and verify equilibrium."""
    tree = spanning_tree(dg, root)
    s = {root: float(s0)}
    for f in sorted(tree.depth, key=tree.depth.__getitem__)[1:]:
        a = tree.parent[f]
        s[f] = s[a.tail] * q[a]
    stress = Stress({f: s[f] for f in fw.faces})
    resid = equilibrium_residual(fw, stress)
    scale = max(abs(v) for v in s.values())
    if resid > exact_tol * scale:
        raise InconsistentStressError(f"propagated stress leaves residual {resid:.3e}", resid)
    return stress


# --- dual cycles as face-cycles -------------------------------------------------------

def merge_dual_cycle(arcs):
    """Collapse consecutive arcs through the same edge.

    f -> g and g -> h across one edge become f -> h; a step that returns to
    its own face disappears.  Returns a list of (face, edge) steps, possibly
    empty when the cycle only circles a single edge.
    """
    steps = [(a.tail, a.head, a.edge) for a in arcs]
    changed = True
    while changed and steps:
        changed = False
        out = []
        for st in steps:
            if out and out[-1][2] == st[2]:
                f, _, e = out.pop()
                st = (f, st[1], e)
                changed = True
            if st[0] != st[1]:
                out.append(st)
            else:
                changed = True
        if len(out) > 1 and out[0][2] == out[-1][2]:
            f, _, e = out.pop()
            first = out.pop(0)
            merged = (f, first[1], e)
            if merged[0] != merged[1]:
                out.insert(0, merged)
            changed = True
        steps = out
    return [(f, e) for f, _, e in steps]


def fundamental_face_cycles(fw, dg=None, rng=None, root=None):
    """Face-cycles for a fundamental cycle basis of the dual graph.

    Cycles that merge down to nothing carry no condition and are skipped.
    """
    dg = dg or build_dual_graph(fw)
    tree = spanning_tree(dg, root, rng)
    tree_keys = {a.key for a in tree.parent.values() if a is not None}
    tree_keys |= {a.reversed().key for a in tree.parent.values() if a is not None}
    out = []
    seen = set()
    for a in dg.arcs:
        if a.key in tree_keys:
            continue
        steps = merge_dual_cycle(fundamental_cycle(tree, a))
        if not steps:
            continue
        key = tuple(steps)
        if key in seen:
            continue
        seen.add(key)
        faces = [f for f, _ in steps]
        edges = [e for _, e in steps]
        out.append(induced_face_path(fw, faces, cycle=True, edge_seq=edges))
    return out
