"""Seeded random generators for frameworks and face-cycles.

Everything takes a ``numpy.random.Generator`` so runs are reproducible.
"""
from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from .affine import (
    DEFAULT_TOL,
    AffineSubspace,
    join,
    meet,
    meet_all,
    normal_directions,
    span_of_points,
)
from .framework import DFramework, framework_from_cells
from .paths import FacePath, is_edge_orientable, path_stress_transition


def random_rotation(D, rng):
    q, r = np.linalg.qr(rng.standard_normal((D, D)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_rigid_motion(D, rng):
    return random_rotation(D, rng), rng.uniform(-3, 3, D)


# --- d = 1 frameworks ------------------------------------------------------------

def graph_framework(points, graph_edges, name=""):
    """Bar framework in the plane as a 1-framework.

    Each bar becomes a line face, each vertex a point edge, and the normal at a
    bar end points along the bar toward its other end.
    """
    pts = {k: np.asarray(v, dtype=float) for k, v in points.items()}
    edges = {f"v{v}": AffineSubspace.point(p) for v, p in pts.items()}
    faces, normals = {}, {}
    for a, b in graph_edges:
        fid = f"b{a}-{b}"
        faces[fid] = span_of_points([pts[a], pts[b]])
        u = (pts[b] - pts[a]) / np.linalg.norm(pts[b] - pts[a])
        normals[(f"v{a}", fid)] = u
        normals[(f"v{b}", fid)] = -u
    return DFramework(1, edges, faces, normals, name=name)


def random_k4(rng):
    pts = {i: rng.uniform(-2, 2, 2) for i in range(4)}
    return graph_framework(pts, list(itertools.combinations(range(4), 2)), "random-k4")


def random_prism(rng, concurrent=True):
    """Triangular prism graph; stressable exactly when the three rungs are concurrent."""
    a = rng.uniform(-2, 2, (3, 2))
    if concurrent:
        o = rng.uniform(-0.5, 0.5, 2)
        b = o + rng.uniform(0.3, 0.7, (3, 1)) * (a - o)
    else:
        b = 0.5 * a + rng.uniform(-0.4, 0.4, (3, 2))
    pts = {i: a[i] for i in range(3)} | {3 + i: b[i] for i in range(3)}
    bars = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return graph_framework(pts, bars, f"random-prism-{'concurrent' if concurrent else 'generic'}")


def random_k33(rng, on_conic=True):
    """K3,3; stressable exactly when the six points lie on a conic."""
    if on_conic:
        t = np.sort(rng.uniform(0, 2 * np.pi, 6))
        ax = rng.uniform(1, 2, 2)
        pts = np.column_stack([ax[0] * np.cos(t), ax[1] * np.sin(t)])
        pts = pts @ random_rotation(2, rng).T + rng.uniform(-1, 1, 2)
    else:
        pts = rng.uniform(-2, 2, (6, 2))
    order = rng.permutation(6)
    left, right = order[:3], order[3:]
    bars = [(int(min(i, j)), int(max(i, j))) for i in left for j in right]
    return graph_framework({i: pts[i] for i in range(6)}, bars,
                           f"random-k33-{'conic' if on_conic else 'generic'}")


def random_cubic_graph_framework(n, rng):
    g = nx.random_regular_graph(3, n, seed=int(rng.integers(2 ** 31)))
    pts = {i: rng.uniform(-2, 2, 2) for i in g.nodes}
    return graph_framework(pts, [tuple(sorted(e)) for e in g.edges], f"random-cubic-{n}")


# --- d = 2 frameworks --------------------------------------------------------------

def random_k5(rng):
    pts = {i: rng.uniform(-2, 2, 3) for i in range(1, 6)}
    cells = {}
    for tri in itertools.combinations(range(1, 6), 3):
        cells["".join(map(str, tri))] = (list(tri), [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])])
    return framework_from_cells(pts, cells, name="random-k5")


def cone_framework(fw, apex, tol=DEFAULT_TOL):
    """Cone over a planar 1-framework from an apex off the plane z = 0.

    Every flat is joined with the apex; a normal is the original in-plane
    normal made orthogonal to the new edge inside the new face.
    """
    if fw.d != 1 or fw.D != 2:
        raise ValueError("cone_framework expects a 1-framework in the plane")
    apex = np.asarray(apex, dtype=float)
    top = AffineSubspace.point(apex)

    def lift(flat):
        pts = [np.append(flat.anchor, 0.0)] + [np.append(flat.anchor + b, 0.0) for b in flat.basis]
        return join(span_of_points(pts, tol), top, tol)

    edges = {k: lift(e) for k, e in fw.edges.items()}
    faces = {k: lift(f) for k, f in fw.faces.items()}
    normals = {}
    for (eid, fid), n in fw.normals.items():
        w = np.append(n, 0.0)
        w = w - edges[eid].direction_projector() @ w
        normals[(eid, fid)] = w / np.linalg.norm(w)
    return DFramework(2, edges, faces, normals, name=f"cone({fw.name})")


def flip_normals(fw, rng, mode, count=1):
    """Flip normals at random; ``face`` and ``edge`` modes keep stressability."""
    normals = dict(fw.normals)
    if mode == "face":
        for fid in rng.choice(fw.face_ids, size=min(count, len(fw.faces)), replace=False):
            for e in fw.edges_of(fid):
                normals[(e, fid)] = -normals[(e, fid)]
    elif mode == "edge":
        for eid in rng.choice(fw.edge_ids, size=min(count, len(fw.edges)), replace=False):
            for f in fw.faces_at(eid):
                normals[(eid, f)] = -normals[(eid, f)]
    elif mode == "incidence":
        keys = list(normals)
        for idx in rng.choice(len(keys), size=min(count, len(keys)), replace=False):
            normals[keys[idx]] = -normals[keys[idx]]
    else:
        raise ValueError(f"unknown flip mode {mode!r}")
    return fw.with_normals(normals)


# --- face-cycles -------------------------------------------------------------------

def _random_hyperplane(D, rng, through=None):
    centre = rng.uniform(-1, 1, D) if through is None else np.asarray(through, dtype=float)
    basis = rng.standard_normal((D - 1, D))
    return AffineSubspace(centre, basis)


def _random_hat(edge, rng):
    return join(edge, AffineSubspace.point(edge.anchor + rng.standard_normal(edge.ambient_dim)))


def _random_sign(rng):
    return 1.0 if rng.random() < 0.5 else -1.0


def random_face_cycle(k, d, rng, tol=DEFAULT_TOL):
    """Generic labelled face-cycle of length ``k`` in R^(d+1) with random normal signs."""
    D = d + 1
    rails = [_random_hyperplane(D, rng) for _ in range(k)]
    edges = [meet(rails[i], rails[(i + 1) % k], tol) for i in range(k)]
    hats = [_random_hat(e, rng) for e in edges]
    normals = []
    for i, e in enumerate(edges):
        normals.append(tuple(_random_sign(rng) * normal_directions(f, e)
                             for f in (rails[i], rails[(i + 1) % k], hats[i])))
    return FacePath(edges, rails, hats, normals, cycle=True,
                    edge_ids=[f"e{i}" for i in range(k)], rail_ids=[f"r{i}" for i in range(k)],
                    hat_ids=[f"h{i}" for i in range(k)])


def with_hat(c, i, hat, n_hat):
    hats = list(c.hats)
    hats[i] = hat
    normals = list(c.normals)
    normals[i] = (normals[i][0], normals[i][1], n_hat)
    return FacePath(c.edges, c.rails, hats, normals, c.is_cycle, c.edge_ids, c.rail_ids, c.hat_ids)


def with_flipped_rail_normal(c, i, which="next"):
    normals = list(c.normals)
    p, n, h = normals[i]
    normals[i] = (-p, n, h) if which == "prev" else (p, -n, h)
    return FacePath(c.edges, c.rails, c.hats, normals, c.is_cycle, c.edge_ids, c.rail_ids, c.hat_ids)


def make_stressable(c, tol=DEFAULT_TOL):
    """Replace the last hat so the transported stress closes up.

    The new hat is spanned by the last edge and the resultant of the two rail
    forces acting there.
    """
    k = len(c)
    s = path_stress_transition(c, 1.0, tol).rails[k - 1]
    n_prev, n_next, _ = c.normals[k - 1]
    w = s * n_prev + 1.0 * n_next
    e = c.edges[k - 1]
    w = w - e.direction_projector() @ w
    hat = join(e, AffineSubspace.point(e.anchor + w), tol)
    return with_hat(c, k - 1, hat, w / np.linalg.norm(w))


def random_three_cycle(d, rng, orientable=True, stressable=True, tol=DEFAULT_TOL):
    """Length-3 cycle with prescribed orientability and (optionally) a self-stress."""
    c = random_face_cycle(3, d, rng, tol)
    if is_edge_orientable(c, tol) != orientable:
        c = with_flipped_rail_normal(c, 2)
    if stressable and orientable:
        x = AffineSubspace.point(rng.uniform(-1, 1, d + 1))
        if d > 1:
            # hats must share a (d-1)-flat through the common (d-2)-flat of the edges
            x = join(meet_all(c.rails, tol), x, tol)
        for i in range(3):
            hat = join(c.edges[i], x, tol)
            c = with_hat(c, i, hat, _random_sign(rng) * normal_directions(hat, c.edges[i]))
    elif stressable:
        c = make_stressable(c, tol)
    return c
