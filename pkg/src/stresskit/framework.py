"""d-frameworks: edges and faces as flats, incidences with unit normals.

The equilibrium condition at an edge ``e`` is

    sum over incident faces f of  s(f) * n(e, f) = 0,

assembled here as one block of ``D`` rows per edge.  A framework is
self-stressable when that system has a nonzero solution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .affine import (
    DEFAULT_TOL,
    AffineSubspace,
    contains,
    flats_equal,
    numeric_rank,
)
from .errors import DegenerateEdgeError, UsageError


class DFramework:
    """Edges (dim d-1), faces (dim d), and a unit normal per incidence.

    ``normals`` maps ``(edge_id, face_id)`` to a vector in R^D; its keys are the
    incidences.  Ids are arbitrary hashables; the same flat may appear under
    several face ids, which is how multiplicity is represented.
    """

    def __init__(self, d, edges, faces, normals, name=""):
        self.d = int(d)
        self.edges = dict(edges)
        self.faces = dict(faces)
        self.normals = {k: np.asarray(v, dtype=float).reshape(-1) for k, v in dict(normals).items()}
        self.name = name
        flats = list(self.edges.values()) + list(self.faces.values())
        if not flats:
            self.D = self.d + 1
        else:
            self.D = flats[0].ambient_dim
        if not self.D > self.d >= 1:
            raise UsageError(f"need D > d >= 1, got d={self.d}, D={self.D}")
        for eid, e in self.edges.items():
            if e.ambient_dim != self.D or e.dim != self.d - 1:
                raise UsageError(f"edge {eid!r} must be a {self.d - 1}-flat in R^{self.D}")
        for fid, f in self.faces.items():
            if f.ambient_dim != self.D or f.dim != self.d:
                raise UsageError(f"face {fid!r} must be a {self.d}-flat in R^{self.D}")
        for (eid, fid), n in self.normals.items():
            if eid not in self.edges or fid not in self.faces:
                raise UsageError(f"incidence ({eid!r}, {fid!r}) references an unknown id")
            if n.shape != (self.D,):
                raise UsageError(f"normal at ({eid!r}, {fid!r}) has wrong length")
        self._faces_at = {e: [] for e in self.edges}
        for eid, fid in self.normals:
            self._faces_at[eid].append(fid)
        self._face_index = {f: i for i, f in enumerate(self.faces)}
        self._edge_index = {e: i for i, e in enumerate(self.edges)}

    @property
    def incidences(self):
        return list(self.normals)

    @property
    def edge_ids(self):
        return list(self.edges)

    @property
    def face_ids(self):
        return list(self.faces)

    def face_index(self, fid):
        return self._face_index[fid]

    def edge_index(self, eid):
        return self._edge_index[eid]

    def faces_at(self, eid):
        return list(self._faces_at[eid])

    def edges_of(self, fid):
        return [e for (e, f) in self.normals if f == fid]

    def normal(self, eid, fid):
        return self.normals[(eid, fid)]

    def transformed(self, rotation, translation):
        """Apply the rigid (or any affine-orthogonal) motion x -> R x + t."""
        R = np.asarray(rotation, dtype=float)
        return DFramework(
            self.d,
            {k: v.transformed(R, translation) for k, v in self.edges.items()},
            {k: v.transformed(R, translation) for k, v in self.faces.items()},
            {k: R @ v for k, v in self.normals.items()},
            name=self.name,
        )

    def with_normals(self, normals):
        return DFramework(self.d, self.edges, self.faces, normals, name=self.name)

    def restricted(self, edge_ids):
        """Sub-framework on the given edges and every face incident to them."""
        edge_ids = [e for e in self.edges if e in set(edge_ids)]
        keep_faces = []
        for e in edge_ids:
            for f in self._faces_at[e]:
                if f not in keep_faces:
                    keep_faces.append(f)
        keep_faces.sort(key=self._face_index.__getitem__)
        return DFramework(
            self.d,
            {e: self.edges[e] for e in edge_ids},
            {f: self.faces[f] for f in keep_faces},
            {(e, f): n for (e, f), n in self.normals.items() if e in set(edge_ids)},
            name=self.name,
        )

    def __repr__(self):
        return (f"DFramework({self.name or 'unnamed'}: d={self.d}, D={self.D}, "
                f"|E|={len(self.edges)}, |F|={len(self.faces)}, |I|={len(self.normals)})")


@dataclass
class ValidationReport:
    generic: bool
    trivalent: bool
    valid: bool
    violations: list = field(default_factory=list)


def validate(fw, tol=DEFAULT_TOL):
    """Check the incidence invariants, genericity and trivalence."""
    violations = []
    valid = True
    for (eid, fid), n in fw.normals.items():
        e, f = fw.edges[eid], fw.faces[fid]
        if not contains(f, e, tol):
            valid = False
            violations.append(f"edge {eid!r} not contained in face {fid!r}")
        if abs(np.linalg.norm(n) - 1.0) > tol.eps_orth * 1e2:
            valid = False
            violations.append(f"normal at ({eid!r}, {fid!r}) is not unit length")
        if np.linalg.norm(f.complement_projector() @ n) > tol.eps_geom or \
                np.linalg.norm(e.direction_projector() @ n) > tol.eps_geom:
            valid = False
            violations.append(f"normal at ({eid!r}, {fid!r}) not in face or not orthogonal to edge")
    generic = True
    trivalent = True
    for eid in fw.edges:
        at = fw.faces_at(eid)
        if len(at) != 3:
            trivalent = False
            violations.append(f"edge {eid!r} has {len(at)} incident faces")
        for i in range(len(at)):
            for j in range(i + 1, len(at)):
                if flats_equal(fw.faces[at[i]], fw.faces[at[j]], tol):
                    generic = False
                    violations.append(f"faces {at[i]!r} and {at[j]!r} coincide at edge {eid!r}")
    return ValidationReport(generic=generic, trivalent=trivalent, valid=valid, violations=violations)


def equilibrium_matrix(fw):
    """Matrix M with M @ s == 0 exactly for equilibrium stresses ``s``.

    Rows come in blocks of D per edge (edge order), columns follow face order.
    """
    M = np.zeros((len(fw.edges) * fw.D, len(fw.faces)))
    for (eid, fid), n in fw.normals.items():
        r = fw.edge_index(eid) * fw.D
        M[r:r + fw.D, fw.face_index(fid)] += n
    return M


class Stress:
    """Face id -> stress value."""

    def __init__(self, values):
        self.values = dict(values)

    def __getitem__(self, fid):
        return self.values[fid]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def vector(self, fw):
        return np.array([self.values[f] for f in fw.faces], dtype=float)

    @classmethod
    def from_vector(cls, fw, vec):
        return cls(dict(zip(fw.faces, map(float, vec))))

    def scaled(self, c):
        return Stress({k: c * v for k, v in self.values.items()})

    def __repr__(self):
        return f"Stress({self.values!r})"


@dataclass
class StressSpace:
    dimension: int
    basis: list
    singular_values: np.ndarray = None

    @property
    def stressable(self):
        return self.dimension > 0


def _canonical_null_basis(N, thresh=1e-8):
    """Basis-independent orthonormal basis of span(N), columns in a fixed order."""
    k = N.shape[1]
    if k == 0:
        return N
    P = N @ N.T
    picked = []
    for i in range(P.shape[0]):
        v = P[:, i].copy()
        for q in picked:
            v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > thresh:
            picked.append(v / nv)
            if len(picked) == k:
                break
    out = []
    for v in picked:
        j = np.flatnonzero(np.abs(v) > thresh)[0]
        out.append(v if v[j] > 0 else -v)
    return np.column_stack(out)


def null_space(M, eps_rank):
    """(orthonormal nullspace columns, singular values) with a relative cutoff."""
    n = M.shape[1]
    if n == 0:
        return np.zeros((0, 0)), np.zeros(0)
    if M.shape[0] == 0:
        return np.eye(n), np.zeros(0)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    r = numeric_rank(s, eps_rank)
    return vt[r:].T, s


def stress_space(fw, tol=DEFAULT_TOL):
    M = equilibrium_matrix(fw)
    N, s = null_space(M, tol.eps_rank)
    N = _canonical_null_basis(N)
    basis = [Stress.from_vector(fw, N[:, j]) for j in range(N.shape[1])]
    return StressSpace(dimension=len(basis), basis=basis, singular_values=s)


def locally_stressable(fw, edge_ids, tol=DEFAULT_TOL):
    """A stress on the faces at ``edge_ids``, in equilibrium there and nonzero on each face."""
    sub = fw.restricted(edge_ids)
    N, _ = null_space(equilibrium_matrix(sub), tol.eps_rank)
    return N.shape[1] > 0 and bool(np.min(np.linalg.norm(N, axis=1)) > 1e-8)


def equilibrium_residual(fw, stress):
    """Largest per-edge norm of the weighted normal sum."""
    M = equilibrium_matrix(fw)
    if M.size == 0:
        return 0.0
    r = M @ stress.vector(fw)
    return float(np.max(np.linalg.norm(r.reshape(-1, fw.D), axis=1)))


def decompose_normals(na, nb, nc, tol=DEFAULT_TOL, edge=None):
    """Coefficients (1, lb, lc) with na + lb*nb + lc*nc = 0.

    The three normals at a trivalent edge must span exactly a 2-plane and the
    relation must involve all three of them.
    """
    A = np.column_stack([na, nb, nc])
    _, s, vt = np.linalg.svd(A)
    r = numeric_rank(s, tol.eps_rank)
    if r != 2:
        raise DegenerateEdgeError(f"normals at edge {edge!r} have rank {r}, expected 2", edge=edge)
    lam = vt[2]
    if np.min(np.abs(lam)) <= 10 * tol.eps_rank * np.max(np.abs(lam)):
        raise DegenerateEdgeError(f"edge {edge!r}: a normal does not take part in the relation", edge=edge)
    return tuple(float(x) for x in lam / lam[0])


def coplanar_decompose(fw, eid, face_ids, tol=DEFAULT_TOL):
    fa, fb, fc = face_ids
    return decompose_normals(fw.normal(eid, fa), fw.normal(eid, fb), fw.normal(eid, fc), tol, edge=eid)


def is_face_connected(fw):
    """Faces linked through shared edges form a single component."""
    if not fw.faces:
        return True
    parent = {f: f for f in fw.faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in fw.edges:
        at = fw.faces_at(e)
        for f in at[1:]:
            parent[find(f)] = find(at[0])
    return len({find(f) for f in fw.faces}) == 1


def framework_from_cells(points, face_cells, d=None, name="", tol=DEFAULT_TOL):
    """Build a framework from a vertex placement.

    ``face_cells`` maps a face id to ``(vertex list, edge list)``; each edge is
    a tuple of vertex indices spanning a (d-1)-flat inside the face.  Normals
    point from the edge toward the centroid of the face's vertices, which for
    the sides of a convex polygon is the inward direction.
    """
    from .affine import span_of_points, unit_normal_within

    pts = {k: np.asarray(v, dtype=float) for k, v in (points.items() if isinstance(points, dict) else enumerate(points))}
    edges, faces, normals = {}, {}, {}
    edge_key = {}
    for fid, (verts, face_edges) in face_cells.items():
        fflat = span_of_points([pts[v] for v in verts], tol)
        faces[fid] = fflat
        centroid = np.mean([pts[v] for v in verts], axis=0)
        for ev in face_edges:
            key = tuple(sorted(ev))
            if key not in edge_key:
                eid = "-".join(str(v) for v in key)
                edge_key[key] = eid
                edges[eid] = span_of_points([pts[v] for v in key], tol)
            eid = edge_key[key]
            normals[(eid, fid)] = unit_normal_within(fflat, edges[eid], centroid, tol)
    if d is None:
        d = next(iter(faces.values())).dim
    return DFramework(d, edges, faces, normals, name=name)
