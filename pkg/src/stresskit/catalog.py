"""Worked examples as deterministic builders, with their expected stress data.

Coordinates are fixed; perturbed variants take an explicit generator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .affine import DEFAULT_TOL, span_of_points
from .framework import DFramework, framework_from_cells
from .rframework import CWComplex, RFramework, induced_d_framework, prism_chain

# regular tetrahedron of edge length 2 centred at the origin
TETRAHEDRON = {
    1: np.array([1.0, 1.0, 1.0]) / math.sqrt(2),
    2: np.array([1.0, -1.0, -1.0]) / math.sqrt(2),
    3: np.array([-1.0, 1.0, -1.0]) / math.sqrt(2),
    4: np.array([-1.0, -1.0, 1.0]) / math.sqrt(2),
}


def _triangle_cells(triples):
    return {"".join(map(str, t)): (list(t), [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]) for t in triples}


def gen_k5_tetrahedral():
    """K5 with four vertices on a regular tetrahedron and the fifth at its centroid."""
    pts = dict(TETRAHEDRON)
    pts[5] = np.zeros(3)
    fw = framework_from_cells(pts, _triangle_cells(itertools.combinations(range(1, 6), 3)),
                              name="k5-tetrahedral")
    return fw


K5_EXTERIOR = ("123", "124", "134", "234")
K5_INTERIOR = ("125", "135", "145", "235", "245", "345")


def gen_k5_coplanar_k4faces():
    """K5 on a regular pentagon, one face per K4 subgraph, all in the plane z = 0.

    Every face carries the same plane under its own id; normals point from
    each line toward the centroid of the K4 it bounds.
    """
    pts = {k: np.array([math.cos(2 * math.pi * (k - 1) / 5), math.sin(2 * math.pi * (k - 1) / 5), 0.0])
           for k in range(1, 6)}
    cells = {}
    for omit in range(1, 6):
        verts = [v for v in range(1, 6) if v != omit]
        cells[f"K4-{omit}"] = (verts, list(itertools.combinations(verts, 2)))
    return framework_from_cells(pts, cells, d=2, name="k5-coplanar")


def _convex_polygon_sides(pts, verts):
    """Consecutive vertex pairs around a planar convex polygon."""
    plane = span_of_points([pts[v] for v in verts])
    c = np.mean([pts[v] for v in verts], axis=0)
    ang = {v: math.atan2(*(plane.basis @ (pts[v] - c))[::-1]) for v in verts}
    order = sorted(verts, key=ang.__getitem__)
    return [(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]


CUBE_VERTICES = {i: np.array(v, dtype=float) for i, v in enumerate(itertools.product((-1, 1), repeat=3))}


def gen_cube():
    """Cube at +-1 with face, edge-pair and dual-tetrahedron planes.

    Lines join non-antipodal vertices.  A line is incident to a plane when it
    is a side of the convex polygon that the plane cuts from the vertex set,
    and normals point into that polygon.
    """
    pts = CUBE_VERTICES
    cells = {}
    for ax, s in itertools.product(range(3), (-1, 1)):
        verts = [v for v, p in pts.items() if p[ax] == s]
        cells[f"cube{'xyz'[ax]}{'+' if s > 0 else '-'}"] = verts
    for (i, j), s in itertools.product(((0, 1), (0, 2), (1, 2)), (1, -1)):
        verts = [v for v, p in pts.items() if p[i] == s * p[j]]
        cells[f"pair{'xyz'[i]}{'xyz'[j]}{'+' if s > 0 else '-'}"] = verts
    for parity in (1, -1):
        cls = [v for v, p in pts.items() if np.prod(p) == parity]
        for tri in itertools.combinations(cls, 3):
            cells[f"tet{'+' if parity > 0 else '-'}{''.join(map(str, tri))}"] = list(tri)
    face_cells = {f: (verts, _convex_polygon_sides(pts, verts)) for f, verts in cells.items()}
    return framework_from_cells(pts, face_cells, name="cube")


def cube_face_type(fid):
    return "cube" if fid.startswith("cube") else "pair" if fid.startswith("pair") else "tet"


OCTAHEDRON_VERTICES = {f"{s}{a}": sgn * np.eye(3)[i]
                       for i, a in enumerate("xyz") for s, sgn in (("+", 1.0), ("-", -1.0))}


def gen_octahedron(variant="planes11"):
    """Regular octahedron at +-e_i with its triangles and three square planes.

    ``planes14`` splits every square plane into two copies, each incident to
    one pair of opposite sides.
    """
    if variant not in ("planes11", "planes14"):
        raise ValueError("variant must be 'planes11' or 'planes14'")
    pts = OCTAHEDRON_VERTICES
    cells = {}
    for sx, sy, sz in itertools.product("+-", repeat=3):
        verts = [f"{sx}x", f"{sy}y", f"{sz}z"]
        cells[f"tri{sx}{sy}{sz}"] = (verts, list(itertools.combinations(verts, 2)))
    for axis in "xyz":
        verts = [v for v in pts if v[1] != axis]
        sides = _convex_polygon_sides(pts, verts)
        if variant == "planes11":
            cells[f"sq{axis}"] = (verts, sides)
        else:
            cells[f"sq{axis}/a"] = (verts, sides[0::2])
            cells[f"sq{axis}/b"] = (verts, sides[1::2])
    return framework_from_cells(pts, cells, name=f"octahedron-{variant}")


# --- R-frameworks -------------------------------------------------------------------------

def gen_k5_simplex():
    """Boundary of the 4-simplex projected to R^3: the K5 example as a chambered complex."""
    pts = {str(k): p for k, p in TETRAHEDRON.items()}
    pts["5"] = np.zeros(3)
    vs = sorted(pts)
    levels = {k: {"".join(c): c for c in itertools.combinations(vs, k + 1)} for k in (1, 2, 3)}
    return RFramework(CWComplex.from_vertex_sets(levels), pts, 2, "k5-simplex")


def _cube_complex(n):
    """Face lattice of [-1, 1]^n up to dimension n - 1, cells keyed by sign patterns."""
    verts = ["".join(s) for s in itertools.product("-+", repeat=n)]
    levels = {}
    for k in range(1, n):
        level = {}
        for free in itertools.combinations(range(n), k):
            fixed = [i for i in range(n) if i not in free]
            for signs in itertools.product("-+", repeat=len(fixed)):
                pattern = ["*"] * n
                for i, s in zip(fixed, signs):
                    pattern[i] = s
                pat = "".join(pattern)
                level[pat] = [v for v in verts if all(p in ("*", c) for p, c in zip(pat, v))]
        levels[k] = level
    return verts, levels


def _schlegel(verts, n):
    """Project [-1, 1]^n from (0, .., 0, 3) onto the hyperplane x_n = -1."""
    out = {}
    for v in verts:
        x = np.array([1.0 if c == "+" else -1.0 for c in v])
        t = 4.0 / (3.0 - x[-1])
        out[v] = t * x[:-1]
    return out


def gen_hypercube_schlegel():
    """Schlegel diagram of the 4-cube: 24 squares, 32 lines, 8 cube chambers."""
    verts, levels = _cube_complex(4)
    return RFramework(CWComplex.from_vertex_sets(levels), _schlegel(verts, 4), 2, "hypercube-schlegel")


def gen_cube_schlegel():
    """Schlegel diagram of the 3-cube as a planar graph with 6 square chambers."""
    verts, levels = _cube_complex(3)
    return RFramework(CWComplex.from_vertex_sets(levels), _schlegel(verts, 3), 1, "cube-schlegel")


# --- registry ----------------------------------------------------------------------------

@dataclass
class CatalogEntry:
    name: str
    builder: object
    expected: dict = field(default_factory=dict)
    note: str = ""

    def build(self):
        return self.builder()

    def framework(self, tol=DEFAULT_TOL):
        obj = self.builder()
        return induced_d_framework(obj, tol) if isinstance(obj, RFramework) else obj


CUBE_RATIOS = (1.0, -math.sqrt(2.0), math.sqrt(3.0) / 2.0)

CATALOG = {
    e.name: e for e in [
        CatalogEntry("k5-tetrahedral", gen_k5_tetrahedral,
                     {"stress_dim": 1, "stressable": True, "exterior/interior": -math.sqrt(6) / 4}),
        CatalogEntry("k5-coplanar", gen_k5_coplanar_k4faces, {"stress_dim": 0, "stressable": False},
                     "coincident face planes; not generic"),
        CatalogEntry("cube", gen_cube,
                     {"stress_dim": 1, "stressable": True, "cube:pair:tet": CUBE_RATIOS}),
        CatalogEntry("octahedron-planes11", lambda: gen_octahedron("planes11"),
                     {"stress_dim": 1, "stressable": True}),
        CatalogEntry("octahedron-planes14", lambda: gen_octahedron("planes14"),
                     {"stress_dim": 1, "stressable": True}),
        CatalogEntry("k5-simplex", gen_k5_simplex, {"stress_dim": 1, "stressable": True, "lift_dim": 1}),
        CatalogEntry("hypercube-schlegel", gen_hypercube_schlegel, {"stressable": True}),
        CatalogEntry("cube-schlegel", gen_cube_schlegel, {"stress_dim": 1, "stressable": True, "lift_dim": 1}),
        CatalogEntry("prism-chain-1", lambda: prism_chain(1), {"stress_dim": 1, "stressable": True}),
        CatalogEntry("prism-chain-2", lambda: prism_chain(2), {"stress_dim": 1, "stressable": True}),
        CatalogEntry("prism-chain-3", lambda: prism_chain(3), {"stress_dim": 1, "stressable": True}),
        CatalogEntry("prism-chain-closed", lambda: prism_chain(3, close_up=True),
                     {"stress_dim": 0, "stressable": False, "locally_stressable": True}),
    ]
}


def get(name):
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None
