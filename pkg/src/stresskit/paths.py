"""Face-paths and face-cycles, stress transport, orientation and monodromy.

Indexing convention (0-based).  A path with ``k`` edges has ``k + 1`` rail
faces and edge ``i`` lies between ``rails[i]`` and ``rails[i + 1]``.  A cycle
with ``k`` edges has ``k`` rails and edge ``i`` lies between ``rails[i]`` and
``rails[(i + 1) % k]``; the closing rail is ``rails[0]``.  Every edge also
carries a hat face, and three normals ``(n_prev, n_next, n_hat)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affine import DEFAULT_TOL, contains, flats_equal, join, meet, meet_all
from .errors import NonGeneralPositionError, UsageError
from .framework import DFramework, decompose_normals


class FacePath:
    """Sequence of edges with rail faces, hat faces and the normals between them.

    Optional ``*_ids`` label the flats; labelled flats are compared by label,
    unlabelled ones geometrically.
    """

    def __init__(self, edges, rails, hats, normals, cycle=False,
                 edge_ids=None, rail_ids=None, hat_ids=None):
        self.edges = list(edges)
        self.rails = list(rails)
        self.hats = list(hats)
        self.normals = [tuple(np.asarray(n, dtype=float) for n in triple) for triple in normals]
        self.is_cycle = bool(cycle)
        k = len(self.edges)
        want_rails = k if self.is_cycle else k + 1
        if len(self.rails) != want_rails or len(self.hats) != k or len(self.normals) != k:
            raise UsageError(f"inconsistent face-path lengths: {k} edges, {len(self.rails)} rails, "
                             f"{len(self.hats)} hats, {len(self.normals)} normal triples")
        self.edge_ids = list(edge_ids) if edge_ids is not None else None
        self.rail_ids = list(rail_ids) if rail_ids is not None else None
        self.hat_ids = list(hat_ids) if hat_ids is not None else None

    def __len__(self):
        return len(self.edges)

    @property
    def d(self):
        return self.rails[0].dim

    def prev_rail(self, i):
        return self.rails[i]

    def next_index(self, i):
        return (i + 1) % len(self.rails) if self.is_cycle else i + 1

    def next_rail(self, i):
        return self.rails[self.next_index(i)]

    def rail_label(self, j):
        return self.rail_ids[j] if self.rail_ids is not None else None

    def same_rail(self, j, m, tol=DEFAULT_TOL):
        if self.rail_ids is not None:
            return self.rail_ids[j] == self.rail_ids[m]
        return flats_equal(self.rails[j], self.rails[m], tol)

    def same_edge(self, i, j, tol=DEFAULT_TOL):
        if self.edge_ids is not None:
            return self.edge_ids[i] == self.edge_ids[j]
        return flats_equal(self.edges[i], self.edges[j], tol)

    def same_hat(self, i, j, tol=DEFAULT_TOL):
        if self.hat_ids is not None:
            return self.hat_ids[i] == self.hat_ids[j]
        return flats_equal(self.hats[i], self.hats[j], tol)

    def rotated(self, shift):
        """Cycle started at edge ``shift`` (rails rotate along)."""
        if not self.is_cycle:
            raise UsageError("only cycles can be rotated")
        k = len(self)
        s = shift % k

        def rot(xs):
            return None if xs is None else xs[s:] + xs[:s]

        return FacePath(rot(self.edges), rot(self.rails), rot(self.hats), rot(self.normals), True,
                        rot(self.edge_ids), rot(self.rail_ids), rot(self.hat_ids))

    def reversed(self):
        """Traverse the same path or cycle in the opposite direction."""
        k = len(self)
        edges = self.edges[::-1]
        hats = self.hats[::-1]
        normals = [(nn, np_, nh) for (np_, nn, nh) in self.normals[::-1]]
        eids = self.edge_ids[::-1] if self.edge_ids is not None else None
        hids = self.hat_ids[::-1] if self.hat_ids is not None else None
        if self.is_cycle:
            # new edge i is old edge k-1-i, whose next rail becomes the new prev rail
            order = [(k - i) % k for i in range(k)]
        else:
            order = list(range(k, -1, -1))
        rails = [self.rails[j] for j in order]
        rids = [self.rail_ids[j] for j in order] if self.rail_ids is not None else None
        return FacePath(edges, rails, hats, normals, self.is_cycle, eids, rids, hids)

    def __repr__(self):
        kind = "cycle" if self.is_cycle else "path"
        return f"FacePath({kind}, length={len(self)}, d={self.d})"


def validate_path(path, tol=DEFAULT_TOL):
    """List of violated face-path containments (empty when valid)."""
    problems = []
    for i, e in enumerate(path.edges):
        for name, f in (("prev rail", path.prev_rail(i)), ("next rail", path.next_rail(i)),
                        ("hat", path.hats[i])):
            if not contains(f, e, tol):
                problems.append(f"edge {i} not contained in its {name}")
    k = len(path)
    for i in range(k):
        for j in range(i + 1, k):
            if path.same_edge(i, j, tol):
                problems.append(f"edges {i} and {j} coincide")
    return problems


def edge_is_identity(path, i, tol=DEFAULT_TOL):
    """True when edge ``i`` passes from a rail to the very same rail."""
    j, m = i, path.next_index(i)
    if path.rail_ids is not None:
        return path.rail_ids[j] == path.rail_ids[m]
    n_prev, n_next, _ = path.normals[i]
    return flats_equal(path.rails[j], path.rails[m], tol) and np.allclose(n_prev, n_next)


def edge_ratio(path, i, tol=DEFAULT_TOL):
    """(next rail / prev rail, hat / prev rail) stress ratios across edge ``i``."""
    if edge_is_identity(path, i, tol):
        return 1.0, 0.0
    n_prev, n_next, n_hat = path.normals[i]
    label = path.edge_ids[i] if path.edge_ids is not None else i
    _, l_next, l_hat = decompose_normals(n_prev, n_next, n_hat, tol, edge=label)
    return l_next, l_hat


@dataclass
class PathStresses:
    rails: list
    hats: list


def path_stress_transition(path, s0=1.0, tol=DEFAULT_TOL):
    """Propagate ``s0`` on the first rail along the path.

    For a cycle the last entry of ``rails`` is the value that comes back to
    the first rail.
    """
    if s0 == 0:
        raise UsageError("the starting stress must be nonzero")
    rails, hats = [float(s0)], []
    s = float(s0)
    for i in range(len(path)):
        l_next, l_hat = edge_ratio(path, i, tol)
        hats.append(s * l_hat)
        s = s * l_next
        rails.append(s)
    return PathStresses(rails=rails, hats=hats)


def monodromy(cycle, tol=DEFAULT_TOL):
    """Ratio s(f_a) / s'(f_a) after transporting a stress once around the cycle."""
    if not cycle.is_cycle:
        raise UsageError("monodromy is defined for face-cycles")
    log_abs, sign = 0.0, 1.0
    for i in range(len(cycle)):
        l_next, _ = edge_ratio(cycle, i, tol)
        log_abs += math.log(abs(l_next))
        sign *= math.copysign(1.0, l_next)
    return sign * math.exp(-log_abs)


def is_trivial_monodromy(m, tol=DEFAULT_TOL):
    return abs(m - 1.0) < 10 * tol.eps_rank


# --- orientation -------------------------------------------------------------------

@dataclass
class EdgeFrame:
    """A frame on an edge plus an explicit sign.

    The orientation represented is ``sign * orientation(frame)``; for d = 1 the
    frame is empty and the sign carries everything.
    """

    edge: object
    frame: np.ndarray
    sign: int = 1

    @classmethod
    def standard(cls, edge):
        return cls(edge, edge.basis.copy(), 1)


def _oriented_volume(face, frame, n):
    coords = np.vstack([frame, n]) @ face.basis.T
    return float(np.linalg.det(coords))


def edge_orientation_transition(frame_i, face, e_next, n_i, n_next, tol=DEFAULT_TOL):
    """Frame on ``e_next`` whose extension by ``n_next`` is opposite to that of ``frame_i``."""
    if not contains(face, frame_i.edge, tol) or not contains(face, e_next, tol):
        raise UsageError("both edges must lie in the shared face")
    o_i = frame_i.sign * _oriented_volume(face, frame_i.frame, n_i)
    ref = e_next.basis.copy()
    o_ref = _oriented_volume(face, ref, n_next)
    if np.sign(o_ref) == -np.sign(o_i):
        return EdgeFrame(e_next, ref, 1)
    if ref.shape[0]:
        ref[0] = -ref[0]
        return EdgeFrame(e_next, ref, 1)
    return EdgeFrame(e_next, ref, -1)


def frame_orientation(frame):
    """Orientation of an edge frame relative to the edge's stored basis."""
    coords = frame.frame @ frame.edge.basis.T
    det = float(np.linalg.det(coords)) if coords.size else 1.0
    return int(np.sign(det)) * frame.sign


def is_edge_orientable(cycle, tol=DEFAULT_TOL):
    if not cycle.is_cycle:
        raise UsageError("orientability is defined for face-cycles")
    k = len(cycle)
    frame = EdgeFrame.standard(cycle.edges[0])
    for i in range(k):
        j = (i + 1) % k
        face = cycle.next_rail(i)
        frame = edge_orientation_transition(frame, face, cycle.edges[j],
                                            cycle.normals[i][1], cycle.normals[j][0], tol)
    return frame_orientation(frame) == 1


# --- length-3 cycles -------------------------------------------------------------

def _planes_of_three_cycle(c):
    if not c.is_cycle or len(c) != 3:
        raise UsageError("expected a face-cycle of length 3")
    e1, e2, e3 = c.edges
    f31, f12, f23 = c.rails
    h1, h2, h3 = c.hats
    return e1, e2, e3, f12, f23, f31, h1, h2, h3


def in_general_position(c, tol=DEFAULT_TOL):
    """All six rail and hat planes of a 3-cycle pairwise distinct."""
    planes = list(c.rails) + list(c.hats)
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            if flats_equal(planes[i], planes[j], tol):
                return False
    return True


def _expect(flat, dim, step):
    if flat.is_empty or flat.dim != dim:
        got = "empty" if flat.is_empty else f"dim {flat.dim}"
        raise NonGeneralPositionError(f"step {step}: expected dim {dim}, got {got}")
    return flat


def harmonic_hat_plane(c, tol=DEFAULT_TOL):
    """Harmonic conjugate of the third hat with respect to the rails at the third edge.

    Built with joins and meets only, through a complete quadrangle whose
    diagonal points are the third edge, g1 and g4.
    """
    e1, e2, e3, f12, f23, f31, h1, h2, h3 = _planes_of_three_cycle(c)
    if not in_general_position(c, tol):
        raise NonGeneralPositionError("the six planes of the 3-cycle are not pairwise distinct")
    d = c.d
    g1 = _expect(meet(join(e1, e2, tol), h3, tol), d - 1, "(i)")
    g2 = _expect(meet(f23, h1, tol), d - 1, "(ii)")
    g12 = _expect(join(g1, g2, tol), d, "(iii) join")
    g3 = _expect(meet(g12, f31, tol), d - 1, "(iii)")
    a = _expect(join(g2, e1, tol), d, "(iv) first join")
    b = _expect(join(g3, e2, tol), d, "(iv) second join")
    g4 = _expect(meet(a, b, tol), d - 1, "(iv)")
    return _expect(join(e3, g4, tol), d, "(v)")


def _line_in_edge_complement(edge, plane):
    """Direction of ``plane`` inside the 2-dim orthogonal complement of ``edge``."""
    Q = np.eye(edge.ambient_dim) - edge.direction_projector()
    w, v = np.linalg.eigh(Q @ plane.direction_projector() @ Q)
    return v[:, np.argmax(w)]


def cross_ratio_at_edge(edge, a, b, c, d):
    """Cross-ratio (a, b; c, d) of four hyperplanes through a common (d-1)-flat."""
    w, v = np.linalg.eigh(np.eye(edge.ambient_dim) - edge.direction_projector())
    plane2 = v[:, w > 0.5].T
    if plane2.shape[0] != 2:
        raise UsageError("the edge must have codimension 2")
    u = [plane2 @ _line_in_edge_complement(edge, p) for p in (a, b, c, d)]

    def br(x, y):
        return x[0] * y[1] - x[1] * y[0]

    return br(u[0], u[2]) * br(u[1], u[3]) / (br(u[1], u[2]) * br(u[0], u[3]))


def three_cycle_stressable(c, tol=DEFAULT_TOL):
    """Concurrency test on the hats, after a harmonic swap when non-orientable."""
    e1, e2, e3, f12, f23, f31, h1, h2, h3 = _planes_of_three_cycle(c)
    if not in_general_position(c, tol):
        raise NonGeneralPositionError("the six planes of the 3-cycle are not pairwise distinct")
    if not is_edge_orientable(c, tol):
        h3 = harmonic_hat_plane(c, tol)
    return meet_all([h1, h2, h3], tol).dim == c.d - 1


# --- induced objects ---------------------------------------------------------------

def cycle_framework(path, tol=DEFAULT_TOL):
    """Stand-alone d-framework made of a path's edges, rails and hats."""
    k = len(path)
    eids = path.edge_ids or [f"e{i}" for i in range(k)]
    rids = path.rail_ids or [f"r{j}" for j in range(len(path.rails))]
    hids = path.hat_ids or [f"h{i}" for i in range(k)]
    edges = {}
    faces = {}
    normals = {}
    for i in range(k):
        edges[eids[i]] = path.edges[i]
    for j, r in enumerate(path.rails):
        faces.setdefault(rids[j], r)
    for i in range(k):
        faces.setdefault(hids[i], path.hats[i])
    for i in range(k):
        if edge_is_identity(path, i, tol):
            continue
        n_prev, n_next, n_hat = path.normals[i]
        for fid, n in ((rids[i], n_prev), (rids[path.next_index(i)], n_next), (hids[i], n_hat)):
            key = (eids[i], fid)
            normals[key] = normals.get(key, 0) + n
    return DFramework(path.d, edges, faces, normals)


def induced_face_path(fw, face_seq, cycle=False, edge_seq=None):
    """Face-path (or cycle) of a trivalent framework along adjacent faces.

    ``face_seq`` lists the rails; for a cycle the closing rail is not repeated.
    ``edge_seq`` disambiguates which shared edge is crossed at each step.
    """
    faces = list(face_seq)
    k = len(faces) if cycle else len(faces) - 1
    if k < 1:
        raise UsageError("need at least one edge crossing")
    edges, hats, normals, eids, hids = [], [], [], [], []
    for i in range(k):
        fa, fb = faces[i], faces[(i + 1) % len(faces)]
        if edge_seq is not None:
            eid = edge_seq[i]
        else:
            common = [e for e in fw.edges_of(fa) if (e, fb) in fw.normals]
            if len(common) != 1:
                raise UsageError(f"faces {fa!r} and {fb!r} share {len(common)} edges; pass edge_seq")
            eid = common[0]
        at = fw.faces_at(eid)
        if len(at) != 3:
            raise UsageError(f"edge {eid!r} is not trivalent")
        if fa == fb:
            raise UsageError("consecutive rails must differ in an induced path")
        rest = [f for f in at if f not in (fa, fb)]
        if len(rest) != 1:
            raise UsageError(f"faces {fa!r}, {fb!r} are not both incident to edge {eid!r}")
        hat = rest[0]
        edges.append(fw.edges[eid])
        eids.append(eid)
        hats.append(fw.faces[hat])
        hids.append(hat)
        normals.append((fw.normal(eid, fa), fw.normal(eid, fb), fw.normal(eid, hat)))
    rails = [fw.faces[f] for f in faces]
    return FacePath(edges, rails, hats, normals, cycle=cycle,
                    edge_ids=eids, rail_ids=list(faces), hat_ids=hids)
