"""Realized cell complexes: normals from cell orientations, lifts and local stresses.

Cells are given combinatorially (id -> boundary ids) and realized by a vertex
placement in R^(d+1).  The d-cells become faces and the (d-1)-cells edges of
an ordinary d-framework.  The normal at an edge of a cell is the inward
normal of the simplex that contains it (in a fan triangulation of the cell),
corrected by the simplex's orientation, so that convex cells get inward
normals and self-crossing cells get mixed signs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
import numpy as np

from .affine import DEFAULT_TOL, flats_equal, span_of_points, unit_normal_within
from .errors import ConstructionError, GenericityError, UnsupportedCellError, UsageError
from .framework import DFramework, equilibrium_matrix, locally_stressable, null_space, stress_space


class CWComplex:
    """Cells by dimension: ``cells[k]`` maps a k-cell id to its boundary (k-1)-cell ids.

    ``orientation`` maps a cell id to +1 or -1 relative to the lexicographic
    reference orientation (sorted vertices for simplices, cyclic order from the
    smallest vertex toward its smaller neighbour for polygons).  Ids must be
    unique across dimensions.
    """

    def __init__(self, cells, orientation=None):
        self.cells = {int(k): {c: tuple(b) for c, b in v.items()} for k, v in cells.items()}
        for k in range(max(self.cells, default=0) + 1):
            self.cells.setdefault(k, {})
        self.dim_of = {}
        for k, level in self.cells.items():
            for c, bnd in level.items():
                if c in self.dim_of:
                    raise UsageError(f"cell id {c!r} used twice")
                self.dim_of[c] = k
        for k, level in self.cells.items():
            for c, bnd in level.items():
                if k == 0 and bnd:
                    raise UsageError(f"vertex {c!r} cannot have a boundary")
                for b in bnd:
                    if self.dim_of.get(b) != k - 1:
                        raise UsageError(f"boundary {b!r} of cell {c!r} is not a {k - 1}-cell")
        self.orientation = {c: 1 for c in self.dim_of}
        for c, s in (orientation or {}).items():
            if s not in (1, -1):
                raise UsageError("orientations must be +1 or -1")
            self.orientation[c] = s
        self._vertices = {}

    @property
    def top_dim(self):
        return max((k for k, v in self.cells.items() if v), default=0)

    def vertices(self, c):
        if c not in self._vertices:
            if self.dim_of[c] == 0:
                vs = frozenset([c])
            else:
                vs = frozenset().union(*(self.vertices(b) for b in self.cells[self.dim_of[c]][c]))
            self._vertices[c] = vs
        return self._vertices[c]

    def boundary(self, c):
        return self.cells[self.dim_of[c]][c]

    def cofaces(self, c):
        k = self.dim_of[c] + 1
        return [f for f, bnd in self.cells.get(k, {}).items() if c in bnd]

    def check_regular(self):
        """Pairwise closed-cell intersections are empty or a single closed cell.

        Returns a list of offending pairs; the check is on vertex sets only.
        """
        by_vertices = {self.vertices(c) for c in self.dim_of}
        bad = []
        ids = list(self.dim_of)
        for a, b in itertools.combinations(ids, 2):
            common = self.vertices(a) & self.vertices(b)
            if common and common not in by_vertices:
                bad.append((a, b))
        return bad

    @classmethod
    def from_vertex_sets(cls, levels, orientation=None):
        """Build from ``levels[k] = {cell id: vertex collection}`` for k >= 1.

        Boundaries are found by inclusion of vertex sets; vertices are the ids
        appearing in ``levels[1]``.
        """
        verts = sorted({v for vs in levels[1].values() for v in vs}, key=str)
        cells = {0: {v: () for v in verts}}
        prev = {frozenset([v]): v for v in verts}
        for k in sorted(levels):
            cur = {}
            cells[k] = {}
            for cid, vs in levels[k].items():
                vs = frozenset(vs)
                bnd = [pid for pvs, pid in prev.items() if pvs < vs]
                cells[k][cid] = tuple(sorted(bnd, key=str))
                cur[vs] = cid
            prev = cur
        return cls(cells, orientation)


class RFramework:
    """A CW complex with a vertex placement; d-cells are the faces.

    ``d`` defaults to the top dimension, or one less when the complex carries
    chambers (cells one dimension higher than the faces).  ``diagonals`` lists
    edges introduced by triangulation.
    """

    def __init__(self, complex, placement, d=None, name="", diagonals=(), parent=None):
        self.complex = complex
        self.placement = {v: np.asarray(p, dtype=float) for v, p in placement.items()}
        dims = {p.shape[0] for p in self.placement.values()}
        if len(dims) != 1:
            raise UsageError("all vertices must live in the same R^D")
        self.D = dims.pop()
        top = complex.top_dim
        self.d = int(d) if d is not None else (top - 1 if top == self.D else top)
        if self.D != self.d + 1:
            raise UsageError(f"an R-framework of dimension {self.d} lives in R^{self.d + 1}, got R^{self.D}")
        missing = set(complex.cells[0]) - set(self.placement)
        if missing:
            raise UsageError(f"vertices without placement: {sorted(missing, key=str)[:5]}")
        self.name = name
        self.diagonals = set(diagonals)
        self.parent = dict(parent or {})
        self.green = set()

    @property
    def faces(self):
        return self.complex.cells[self.d]

    @property
    def edges(self):
        return self.complex.cells[self.d - 1]

    @property
    def chambers(self):
        return self.complex.cells.get(self.d + 1, {})

    @property
    def d_vertices(self):
        return self.complex.cells[self.d - 2] if self.d >= 2 else {}

    def points(self, c):
        return [self.placement[v] for v in sorted(self.complex.vertices(c), key=str)]

    def span(self, c, tol=DEFAULT_TOL):
        return span_of_points(self.points(c), tol)

    def with_placement(self, placement, name=None):
        return RFramework(self.complex, placement, self.d, name if name is not None else self.name,
                          self.diagonals, self.parent)

    def transformed(self, rotation, translation):
        R = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        return self.with_placement({v: R @ p + t for v, p in self.placement.items()})

    def check_realization(self, tol=DEFAULT_TOL):
        """Cells whose vertex images span the wrong dimension."""
        bad = []
        for k in range(1, self.complex.top_dim + 1):
            for c in self.complex.cells[k]:
                if self.span(c, tol).dim != k:
                    bad.append(c)
        return bad

    def genericity_violations(self, tol=DEFAULT_TOL):
        spans = {f: self.span(f, tol) for f in self.faces}
        bad = []
        for e in self.edges:
            at = self.complex.cofaces(e)
            for f, g in itertools.combinations(at, 2):
                if flats_equal(spans[f], spans[g], tol):
                    bad.append((e, f, g))
        return bad

    def __repr__(self):
        return (f"RFramework({self.name or 'unnamed'}: d={self.d}, |faces|={len(self.faces)}, "
                f"|edges|={len(self.edges)}, |chambers|={len(self.chambers)})")


# --- orientation and triangulation ---------------------------------------------------

def _polygon_order(cx, f):
    """Cyclic vertex order of a 2-cell, from its smallest vertex toward the smaller neighbour."""
    nbr = {}
    for e in cx.boundary(f):
        a, b = sorted(cx.vertices(e), key=str)
        nbr.setdefault(a, []).append(b)
        nbr.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in nbr.values()):
        raise UnsupportedCellError(f"cell {f!r} boundary is not a simple cycle")
    start = min(nbr, key=str)
    order = [start]
    prev, cur = start, min(nbr[start], key=str)
    while cur != start:
        order.append(cur)
        nxt = nbr[cur][0] if nbr[cur][0] != prev else nbr[cur][1]
        prev, cur = cur, nxt
    if len(order) != len(nbr):
        raise UnsupportedCellError(f"cell {f!r} boundary is not a single cycle")
    return order


def cell_simplices(cx, f, d, apex=None):
    """Oriented fan simplices of a d-cell as (vertex tuple, sign) pairs.

    A simplex ``(v0, ..., vd)`` with sign +1 carries the orientation of that
    vertex order.  ``apex`` selects the fan vertex of a polygon.
    """
    verts = sorted(cx.vertices(f), key=str)
    s = cx.orientation[f]
    if len(verts) == d + 1:
        return [(tuple(verts), s)]
    if d != 2:
        raise UnsupportedCellError(f"cannot fan-triangulate non-simplicial {d}-cell {f!r}")
    order = _polygon_order(cx, f)
    if apex is not None:
        if apex not in order:
            raise UsageError(f"apex {apex!r} is not a vertex of {f!r}")
        k = order.index(apex)
        order = order[k:] + order[:k]
    return [((order[0], order[i], order[i + 1]), s) for i in range(1, len(order) - 1)]


def _simplex_sign(points, basis):
    m = np.array([p - points[0] for p in points[1:]]) @ basis.T
    return float(np.linalg.det(m))


def triangulate(r, apex=None):
    """Fan-triangulate every d-cell; new simplices remember their parent cell.

    ``apex`` maps cell ids to the fan vertex (default: the smallest vertex).
    """
    apex = apex or {}
    cx = r.complex
    d = r.d
    if d == 1:
        return r
    levels = {k: {c: cx.vertices(c) for c in cx.cells[k]} for k in range(1, d)}
    faces, orient, parent = {}, {}, {}
    diagonals = set(r.diagonals)
    edge_of = {cx.vertices(e): e for e in cx.cells[d - 1]}
    for f in cx.cells[d]:
        simplices = cell_simplices(cx, f, d, apex.get(f))
        if len(simplices) == 1 and set(simplices[0][0]) == set(cx.vertices(f)):
            faces[f] = cx.vertices(f)
            orient[f] = cx.orientation[f]
            parent[f] = r.parent.get(f, f)
            continue
        for i, (vs, s) in enumerate(simplices):
            tid = f"{f}/{i}"
            faces[tid] = frozenset(vs)
            ref = tuple(sorted(vs, key=str))
            perm_sign = _permutation_sign([ref.index(v) for v in vs])
            orient[tid] = s * perm_sign
            parent[tid] = r.parent.get(f, f)
            for a, b in itertools.combinations(vs, 2):
                key = frozenset((a, b))
                if key not in edge_of:
                    eid = f"{f}/diag-{'-'.join(sorted(map(str, key)))}"
                    edge_of[key] = eid
                    diagonals.add(eid)
    levels[d - 1] = {e: vs for vs, e in edge_of.items()}
    levels[d] = faces
    for k in range(d + 1, cx.top_dim + 1):
        levels[k] = {c: cx.vertices(c) for c in cx.cells[k]}
    orientation = {c: cx.orientation[c] for c in cx.dim_of if cx.dim_of[c] != d}
    orientation.update(orient)
    new = CWComplex.from_vertex_sets(levels, None)
    for c, s in orientation.items():
        if c in new.orientation:
            new.orientation[c] = s
    return RFramework(new, r.placement, d, r.name, diagonals, parent)


def _permutation_sign(perm):
    sign, perm = 1, list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def face_normals(r, f, tol=DEFAULT_TOL, apex=None):
    """Normals of face ``f`` at each of its d-edges, keyed by edge id."""
    cx, d = r.complex, r.d
    span = r.span(f, tol)
    if span.dim != d:
        raise GenericityError(f"face {f!r} spans dimension {span.dim}, expected {d}")
    simplices = cell_simplices(cx, f, d, apex)
    signed = []
    for vs, s in simplices:
        pts = [r.placement[v] for v in vs]
        signed.append((vs, s, _simplex_sign(pts, span.basis)))
    total = sum(s * g for _, s, g in signed)
    ref = np.sign(total) if abs(total) > tol.eps_geom else np.sign(signed[0][1] * signed[0][2])
    out = {}
    for e in cx.boundary(f):
        ev = cx.vertices(e)
        for vs, s, g in signed:
            if ev <= set(vs):
                (w,) = set(vs) - ev
                simplex = span_of_points([r.placement[v] for v in vs], tol)
                edge = r.span(e, tol)
                n = unit_normal_within(simplex, edge, r.placement[w], tol)
                out[e] = ref * s * np.sign(g) * n
                break
        else:
            raise UnsupportedCellError(f"edge {e!r} of {f!r} lies in no fan simplex")
    return out


def induced_d_framework(r, tol=DEFAULT_TOL, apex=None, check_generic=True):
    """The d-framework whose faces are the d-cells and edges the (d-1)-cells."""
    if check_generic:
        bad = r.genericity_violations(tol)
        if bad:
            e, f, g = bad[0]
            raise GenericityError(f"faces {f!r} and {g!r} have the same span at edge {e!r}")
    apex = apex or {}
    edges = {e: r.span(e, tol) for e in r.edges}
    faces = {f: r.span(f, tol) for f in r.faces}
    normals = {}
    for f in r.faces:
        for e, n in face_normals(r, f, tol, apex.get(f)).items():
            normals[(e, f)] = n
    return DFramework(r.d, edges, faces, normals, name=r.name)


# --- lifts --------------------------------------------------------------------------

@dataclass
class Lift:
    """Chamber id -> (gradient, constant) of an affine function on R^(d+1)."""

    functions: dict

    def __call__(self, chamber, x):
        a, b = self.functions[chamber]
        return float(a @ np.asarray(x, dtype=float) + b)


@dataclass
class LiftSpace:
    dimension: int
    basis: list = field(default_factory=list)


def _affine_basis_points(points, k, tol):
    chosen = [points[0]]
    for p in points[1:]:
        trial = chosen + [p]
        m = np.array([q - trial[0] for q in trial[1:]])
        if np.linalg.matrix_rank(m, tol=tol.eps_geom) == len(trial) - 1:
            chosen = trial
        if len(chosen) == k + 1:
            break
    return chosen


def lift_space(r, base=None, tol=DEFAULT_TOL):
    """Lifts vanishing on the base chamber, as the nullspace of face agreement."""
    chambers = list(r.chambers)
    if not chambers:
        raise UsageError("the complex has no chambers")
    base = chambers[0] if base is None else base
    if base not in r.chambers:
        raise UsageError(f"unknown chamber {base!r}")
    n = r.D + 1
    col = {c: i * n for i, c in enumerate(chambers)}
    rows = []
    for f in r.faces:
        owners = r.complex.cofaces(f)
        if len(owners) < 2:
            continue
        pts = _affine_basis_points(r.points(f), r.d, tol)
        for c1, c2 in zip(owners, owners[1:]):
            for x in pts:
                row = np.zeros(n * len(chambers))
                row[col[c1]:col[c1] + n] = np.append(x, 1.0)
                row[col[c2]:col[c2] + n] -= np.append(x, 1.0)
                rows.append(row)
    for j in range(n):
        row = np.zeros(n * len(chambers))
        row[col[base] + j] = 1.0
        rows.append(row)
    N, _ = null_space(np.array(rows), tol.eps_rank)
    basis = []
    for k in range(N.shape[1]):
        v = N[:, k]
        basis.append(Lift({c: (v[col[c]:col[c] + n - 1], float(v[col[c] + n - 1])) for c in chambers}))
    return LiftSpace(N.shape[1], basis)


# --- vertex links -------------------------------------------------------------------

@dataclass
class SphericalLink:
    vertex: object
    nodes: dict  # d-edge id -> unit vector in the 3-dim complement
    arcs: list  # (face id, d-edge id, d-edge id)

    @property
    def valence(self):
        return len(self.nodes)


def _incident(r, v):
    vv = r.complex.vertices(v)
    edges = [e for e in r.edges if vv <= r.complex.vertices(e)]
    faces = []
    for e in edges:
        for f in r.complex.cofaces(e):
            if f not in faces:
                faces.append(f)
    return edges, faces


def spherical_link(r, v, tol=DEFAULT_TOL):
    """Directions of the d-edges at a d-vertex, joined by one arc per incident face."""
    if v not in r.d_vertices:
        raise UsageError(f"{v!r} is not a d-vertex")
    vflat = r.span(v, tol)
    comp = np.eye(r.D) - vflat.direction_projector()
    w, vecs = np.linalg.eigh(comp)
    frame = vecs[:, w > 0.5].T
    if frame.shape[0] != 3:
        raise UsageError("the complement of a d-vertex must be 3-dimensional")
    edges, faces = _incident(r, v)
    vv = r.complex.vertices(v)
    nodes = {}
    for e in edges:
        (extra,) = r.complex.vertices(e) - vv if len(r.complex.vertices(e) - vv) == 1 else \
            (sorted(r.complex.vertices(e) - vv, key=str)[0],)
        u = frame @ (r.placement[extra] - vflat.project_point(r.placement[extra]))
        nodes[e] = u / np.linalg.norm(u)
    arcs = []
    for f in faces:
        at = [e for e in r.complex.boundary(f) if e in nodes]
        if len(at) == 2:
            arcs.append((f, at[0], at[1]))
    return SphericalLink(v, nodes, arcs)


def local_stress_space(r, v, fw=None, tol=DEFAULT_TOL):
    """Nullspace of the equilibrium rows at the d-edges through ``v``."""
    fw = fw or induced_d_framework(r, tol, check_generic=False)
    edges, faces = _incident(r, v)
    sub = fw.restricted(edges)
    N, _ = null_space(equilibrium_matrix(sub), tol.eps_rank)
    return sub, N


def is_locally_stressable(r, v, tol=DEFAULT_TOL, fw=None):
    """A local self-stress at ``v`` that is nonzero on every incident face exists."""
    fw = fw or induced_d_framework(r, tol, check_generic=False)
    edges, _ = _incident(r, v)
    return locally_stressable(fw, edges, tol)


@dataclass
class StressabilityReport:
    global_stressable: bool
    stress_dim: int
    local: dict
    monodromy: dict = field(default_factory=dict)


def global_stressability_report(r, tol=DEFAULT_TOL, cycles=None):
    """Global verdict, per-vertex local verdicts and monodromy on given face-cycles."""
    from .paths import induced_face_path, monodromy

    fw = induced_d_framework(r, tol)
    space = stress_space(fw, tol)
    local = {v: is_locally_stressable(r, v, tol, fw) for v in r.d_vertices}
    mono = {}
    for seq in cycles or ():
        c = induced_face_path(fw, list(seq), cycle=True)
        mono[tuple(seq)] = monodromy(c, tol)
    return StressabilityReport(space.dimension > 0, space.dimension, local, mono)


# --- perturbation ---------------------------------------------------------------------

def _planarity_residuals(r, pts, idx):
    res, jac_rows = [], []
    nvar = 3 * len(idx)
    for k in range(2, r.complex.top_dim + 1):
        for c in r.complex.cells[k]:
            vs = sorted(r.complex.vertices(c), key=str)
            if len(vs) <= k + 1 or k != 2:
                continue
            p0, p1, p2 = (pts[idx[v]] for v in vs[:3])
            for v in vs[3:]:
                pj = pts[idx[v]]
                a, b, c3 = p1 - p0, p2 - p0, pj - p0
                res.append(float(np.dot(a, np.cross(b, c3))))
                row = np.zeros(nvar)
                ga, gb, gc = np.cross(b, c3), np.cross(c3, a), np.cross(a, b)
                for vert, g in ((vs[1], ga), (vs[2], gb), (v, gc), (vs[0], -(ga + gb + gc))):
                    row[3 * idx[vert]:3 * idx[vert] + 3] += g
                jac_rows.append(row)
    return np.array(res), np.array(jac_rows).reshape(len(res), nvar)


def perturb_realization(r, rng, scale=0.05, tol=DEFAULT_TOL, max_iter=50):
    """Move every vertex at random, then restore planarity of polygonal 2-cells."""
    verts = sorted(r.placement, key=str)
    idx = {v: i for i, v in enumerate(verts)}
    pts = np.array([r.placement[v] for v in verts]) + rng.normal(0.0, scale, (len(verts), r.D))
    # 2-cells of a planar complex are full-dimensional and stay flat for free
    needs = r.D > 2 and any(len(r.complex.vertices(c)) > 3 for c in r.complex.cells.get(2, {}))
    if needs:
        if r.D != 3:
            raise UnsupportedCellError("planarity restoration is implemented for 2-cells in R^3")
        for _ in range(max_iter):
            res, J = _planarity_residuals(r, pts, idx)
            # residuals are triple products, so they scale with the cube of the size
            if not res.size or np.max(np.abs(res)) < 1e-12 * max(1.0, np.abs(pts).max()) ** 3:
                break
            step = np.linalg.lstsq(J, -res, rcond=None)[0]
            pts = pts + step.reshape(pts.shape)
        else:
            raise ConstructionError("planarity restoration did not converge", float(np.max(np.abs(res))))
    out = r.with_placement({v: pts[idx[v]] for v in verts}, name=f"{r.name}-perturbed")
    bad = out.genericity_violations(tol)
    if bad:
        raise GenericityError(f"perturbation produced coincident faces at edge {bad[0][0]!r}")
    return out


# --- patching and the prism chain ------------------------------------------------------

def patch_along_faces(r1, r2, identify, remove=(), tol=DEFAULT_TOL, name=""):
    """Glue ``r2`` onto ``r1`` by identifying vertices, then drop the given faces.

    ``identify`` maps vertex ids of ``r2`` to vertex ids of ``r1``; ids present
    in both are identified as well.  Identified points must coincide, and
    cells with the same vertex set merge.
    """
    if r1.d != r2.d:
        raise UsageError("cannot patch frameworks of different dimension")
    rename = {v: identify.get(v, v) for v in r2.complex.cells[0]}
    shared = [(v2, v1) for v2, v1 in rename.items() if v1 in r1.placement]
    worst = max((float(np.linalg.norm(r2.placement[a] - r1.placement[b])) for a, b in shared), default=0.0)
    if worst > 1e-9:
        raise ConstructionError(f"patched vertices are {worst:.3e} apart", worst)
    placement = dict(r1.placement)
    placement.update({rename[v]: p for v, p in r2.placement.items()})
    levels = {}
    drop = {frozenset(r1.complex.vertices(f)) for f in remove if f in r1.complex.dim_of}
    drop |= {frozenset(rename[v] for v in r2.complex.vertices(f)) for f in remove if f in r2.complex.dim_of}
    for k in range(1, max(r1.complex.top_dim, r2.complex.top_dim) + 1):
        by_set = {}
        for c in r1.complex.cells.get(k, {}):
            by_set.setdefault(frozenset(r1.complex.vertices(c)), c)
        for c in r2.complex.cells.get(k, {}):
            by_set.setdefault(frozenset(rename[v] for v in r2.complex.vertices(c)), c)
        levels[k] = {c: vs for vs, c in by_set.items() if not (k == r1.d and vs in drop)}
    return RFramework(CWComplex.from_vertex_sets(levels), placement, r1.d, name)


@dataclass(frozen=True)
class PrismChainParams:
    """Shape of the prism chain.

    The three vertex families live in half-planes through the z-axis at the
    given azimuths.  Perspective centres sit on the axis at ``centres``;
    consecutive green triangles are perspective from them, which keeps every
    lateral quadrilateral planar.  ``apex_offsets`` place the pyramid apex of
    each prism relative to the prism's vertex centroid.
    """

    azimuths: tuple = (0.0, 2.2, 4.1)
    radii: tuple = (1.0, 1.3, 0.8)
    heights: tuple = (0.0, 0.25, -0.15)
    centres: tuple = (-3.0, 7.5, -9.0)
    stretch: tuple = (1.6, 1.45, 1.75)
    open_stretch: tuple = (1.3, 1.2, 1.35)
    apex_offsets: tuple = ((0.11, 0.07, 0.13), (-0.09, 0.12, 0.05), (0.06, -0.1, -0.08))


def _meet_2d(p, u, q, w):
    A = np.column_stack([u, -w])
    if abs(np.linalg.det(A)) < 1e-12:
        raise ConstructionError("perspective lines are parallel", float("inf"))
    t, _ = np.linalg.solve(A, q - p)
    return p + t * u


def prism_chain_triangles(params=PrismChainParams()):
    """Green triangles T0..T3 as 3x3 arrays; T3 equals T0 when closed."""
    az, rad, hgt = params.azimuths, params.radii, params.heights
    z0, z1, z2 = (np.array([0.0, c]) for c in params.centres)
    fams_closed, fams_open = [], []
    for j in range(3):
        a0 = np.array([rad[j], hgt[j]])
        a1 = z0 + params.stretch[j] * (a0 - z0)
        a2 = _meet_2d(a1, a1 - z1, a0, a0 - z2)
        a3_open = z2 + params.open_stretch[j] * (a2 - z2)
        fams_closed.append([a0, a1, a2, a0])
        fams_open.append([a0, a1, a2, a3_open])

    def lift(fams):
        out = []
        for k in range(4):
            tri = []
            for j in range(3):
                rho, z = fams[j][k]
                tri.append([rho * np.cos(az[j]), rho * np.sin(az[j]), z])
            out.append(np.array(tri))
        return out

    return lift(fams_closed), lift(fams_open)


def pyramid_over_prism(bottom, top, apex, labels=("a", "b", "c"), k=0, name="R"):
    """Pyramid over the prism between two perspective triangles, projected to R^3."""
    lo = [f"{x}{k}" for x in labels]
    hi = [f"{x}{k + 1}" for x in labels]
    q = f"q{k}"
    placement = {v: p for v, p in zip(lo, bottom)}
    placement.update({v: p for v, p in zip(hi, top)})
    placement[q] = np.asarray(apex, dtype=float)
    prism_edges = [(lo[0], lo[1]), (lo[1], lo[2]), (lo[0], lo[2]),
                   (hi[0], hi[1]), (hi[1], hi[2]), (hi[0], hi[2]),
                   (lo[0], hi[0]), (lo[1], hi[1]), (lo[2], hi[2])]
    edges = {f"{a}{b}": (a, b) for a, b in prism_edges}
    edges.update({f"{q}{v}": (q, v) for v in lo + hi})
    faces = {f"T{k}": lo, f"T{k + 1}": hi}
    for i, j in ((0, 1), (1, 2), (0, 2)):
        faces[f"Q{k}{labels[i]}{labels[j]}"] = (lo[i], lo[j], hi[j], hi[i])
    for a, b in prism_edges:
        faces[f"{q}{a}{b}"] = (q, a, b)
    cx = CWComplex.from_vertex_sets({1: edges, 2: faces})
    for f in faces:
        cx.orientation[f] = 1
    r = RFramework(cx, placement, 2, name)
    r.green = {f"T{k}", f"T{k + 1}"}
    return r


def prism_chain(count=1, close_up=False, params=PrismChainParams(), tol=DEFAULT_TOL):
    """Chain of ``count`` pyramid-over-prism frameworks glued along green triangles.

    With ``close_up`` (only for three copies) the last green triangle is the
    first one and both glued triangles are removed.
    """
    if count not in (1, 2, 3):
        raise UsageError("count must be 1, 2 or 3")
    if close_up and count != 3:
        raise UsageError("close_up requires count=3")
    closed, opened = prism_chain_triangles(params)
    tris = closed if close_up else opened
    mismatch = float(np.max(np.abs(closed[3] - closed[0])))
    if close_up and mismatch > 1e-9:
        raise ConstructionError(f"green faces miss by {mismatch:.3e}", mismatch)
    pieces = []
    for k in range(count):
        apex = tris[k].mean(axis=0) * 0.5 + tris[k + 1].mean(axis=0) * 0.5 + np.asarray(params.apex_offsets[k])
        pieces.append(pyramid_over_prism(tris[k], tris[k + 1], apex, k=k, name=f"R{k + 1}"))
    out = pieces[0]
    for k in range(1, count):
        out = patch_along_faces(out, pieces[k], {}, remove=(f"T{k}",), tol=tol, name="chain")
    green = {"T0", f"T{count}"}
    if close_up:
        last = {f"{x}3": f"{x}0" for x in "abc"}
        out = _identify_vertices(out, last, remove=("T0", "T3"), tol=tol)
        green = set()
    names = {(1, False): "R", (2, False): "R12", (3, False): "R123", (3, True): "R-tilde"}
    out.name = names[(count, close_up)]
    out.green = green
    return out


def _identify_vertices(r, mapping, remove=(), tol=DEFAULT_TOL):
    worst = max(float(np.linalg.norm(r.placement[a] - r.placement[b])) for a, b in mapping.items())
    if worst > 1e-9:
        raise ConstructionError(f"identified vertices are {worst:.3e} apart", worst)
    ren = {v: mapping.get(v, v) for v in r.complex.cells[0]}
    drop = {frozenset(ren[v] for v in r.complex.vertices(f)) for f in remove}
    levels = {}
    for k in range(1, r.complex.top_dim + 1):
        by_set = {}
        for c in r.complex.cells[k]:
            by_set.setdefault(frozenset(ren[v] for v in r.complex.vertices(c)), c)
        levels[k] = {c: vs for vs, c in by_set.items() if not (k == r.d and vs in drop)}
    placement = {v: p for v, p in r.placement.items() if v not in mapping}
    return RFramework(CWComplex.from_vertex_sets(levels), placement, r.d, r.name)
