"""JSON framework files and an ASCII PLY mesh export.

Files carry ``format_version`` 1.  Ids are written as strings and sorted;
floats use Python's shortest round-trip repr, so write -> read -> write is
byte-identical.
"""
from __future__ import annotations

import json

import numpy as np

from .affine import DEFAULT_TOL, AffineSubspace, orthonormality_residual
from .errors import FormatError
from .framework import DFramework
from .rframework import CWComplex, RFramework

FORMAT_VERSION = 1


def _flat(x):
    return {"anchor": [float(v) for v in x.anchor], "basis": [[float(v) for v in row] for row in x.basis]}


def _sorted(d):
    return sorted(d.items(), key=lambda kv: str(kv[0]))


def dframework_to_dict(fw):
    return {
        "format_version": FORMAT_VERSION,
        "kind": "d-framework",
        "d": fw.d,
        "D": fw.D,
        "metadata": {"name": fw.name},
        "edges": [{"id": str(k), **_flat(e)} for k, e in _sorted(fw.edges)],
        "faces": [{"id": str(k), **_flat(f)} for k, f in _sorted(fw.faces)],
        "incidences": [{"edge": str(e), "face": str(f), "normal": [float(v) for v in n]}
                       for (e, f), n in sorted(fw.normals.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))],
    }


def rframework_to_dict(r):
    cells = {}
    for k in sorted(r.complex.cells):
        if k == 0:
            continue
        cells[str(k)] = [{"id": str(c), "boundary": sorted(str(b) for b in bd)}
                         for c, bd in _sorted(r.complex.cells[k])]
    out = {
        "format_version": FORMAT_VERSION,
        "kind": "r-framework",
        "d": r.d,
        "D": r.D,
        "metadata": {"name": r.name},
        "vertices": {str(v): [float(x) for x in p] for v, p in _sorted(r.placement)},
        "cells": cells,
    }
    flipped = {str(c): int(s) for c, s in _sorted(r.complex.orientation) if s != 1}
    if flipped:
        out["orientations"] = flipped
    return out


def dumps(obj):
    data = rframework_to_dict(obj) if isinstance(obj, RFramework) else dframework_to_dict(obj)
    return json.dumps(data, indent=1, sort_keys=False) + "\n"


def _line_of(text, key):
    """Best-effort 1-based line number of the first occurrence of ``key``."""
    idx = text.find(key)
    return text.count("\n", 0, idx) + 1 if idx >= 0 else None


def _need(obj, key, where, text):
    if key not in obj:
        line = _line_of(text, where) if where else None
        at = f" (near line {line})" if line else ""
        raise FormatError(f"missing field {key!r} in {where or 'document'}{at}")
    return obj[key]


def _parse_flat(item, D, text):
    where = f'"id": "{item.get("id")}"'
    anchor = np.asarray(_need(item, "anchor", where, text), dtype=float)
    basis = np.asarray(_need(item, "basis", where, text), dtype=float).reshape(-1, D)
    if anchor.shape != (D,):
        raise FormatError(f"anchor of {item.get('id')!r} has length {anchor.size}, expected {D}"
                          f" (near line {_line_of(text, where)})")
    # keep stored bases bit-for-bit when they are already orthonormal
    trusted = basis.shape[0] == 0 or orthonormality_residual(basis) < DEFAULT_TOL.eps_orth
    return AffineSubspace(anchor, basis, _trusted=trusted)


def loads(text):
    """Parse a framework file into a DFramework or RFramework."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError("line 1: top level must be an object")
    version = _need(data, "format_version", None, text)
    if version != FORMAT_VERSION:
        raise FormatError(f"line {_line_of(text, 'format_version')}: unsupported format_version {version!r}")
    kind = data.get("kind", "d-framework")
    name = data.get("metadata", {}).get("name", "")
    try:
        if kind == "r-framework":
            return _load_r(data, name, text)
        if kind != "d-framework":
            raise FormatError(f"line {_line_of(text, 'kind')}: unknown kind {kind!r}")
        d, D = int(_need(data, "d", None, text)), int(_need(data, "D", None, text))
        edges = {e["id"]: _parse_flat(e, D, text) for e in _need(data, "edges", None, text)}
        faces = {f["id"]: _parse_flat(f, D, text) for f in _need(data, "faces", None, text)}
        normals = {}
        for inc in _need(data, "incidences", None, text):
            key = (inc["edge"], inc["face"])
            if key[0] not in edges or key[1] not in faces:
                raise FormatError(f"line {_line_of(text, inc['edge'])}: incidence refers to unknown id {key!r}")
            normals[key] = np.asarray(inc["normal"], dtype=float)
        return DFramework(d, edges, faces, normals, name=name)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed framework file: {exc}") from None


def _load_r(data, name, text):
    verts = {v: np.asarray(p, dtype=float) for v, p in _need(data, "vertices", None, text).items()}
    cells = {0: {v: () for v in verts}}
    for k, items in _need(data, "cells", None, text).items():
        cells[int(k)] = {c["id"]: tuple(c["boundary"]) for c in items}
    orientation = data.get("orientations")
    cx = CWComplex(cells, orientation)
    return RFramework(cx, verts, data.get("d"), name)


def read(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# --- mesh export ---------------------------------------------------------------------

def _face_polygons(fw):
    """Polygon per face from the pairwise meets of its edges, ordered by angle."""
    from .affine import meet, span_of_points

    polys = {}
    for fid, face in fw.faces.items():
        es = [fw.edges[e] for e in fw.edges_of(fid)]
        pts = []
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                m = meet(es[i], es[j])
                if not m.is_empty and m.dim == 0:
                    p = m.anchor
                    if not any(np.allclose(p, q, atol=1e-9) for q in pts):
                        pts.append(p)
        if len(pts) < 3:
            polys[fid] = pts
            continue
        c = np.mean(pts, axis=0)
        plane = span_of_points(pts)
        uv = [plane.basis @ (p - c) for p in pts]
        order = sorted(range(len(pts)), key=lambda i: np.arctan2(uv[i][1], uv[i][0]))
        polys[fid] = [pts[i] for i in order]
    return polys


def to_ply(fw, stress=None):
    """ASCII PLY of a 2-framework in R^3: one polygon per face with a ``stress`` property.

    Face polygons are recovered from the vertices where its edge lines meet.
    """
    if fw.D != 3:
        raise FormatError("mesh export needs a framework in R^3")
    polys = _face_polygons(fw)
    verts, faces = [], []
    for fid in sorted(polys, key=str):
        pts = polys[fid]
        idx = []
        for p in pts:
            for k, q in enumerate(verts):
                if np.allclose(p, q, atol=1e-9):
                    idx.append(k)
                    break
            else:
                verts.append(p)
                idx.append(len(verts) - 1)
        faces.append((fid, idx, 0.0 if stress is None else float(stress[fid])))
    lines = ["ply", "format ascii 1.0", f"comment stresskit {fw.name}",
             f"element vertex {len(verts)}", "property double x", "property double y", "property double z",
             f"element face {len(faces)}", "property list uchar int vertex_indices", "property double stress",
             "end_header"]
    lines += [" ".join(repr(float(x)) for x in v) for v in verts]
    lines += [f"{len(idx)} {' '.join(map(str, idx))} {s!r}" for _, idx, s in faces]
    return "\n".join(lines) + "\n"
