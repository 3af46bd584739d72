"""Affine subspaces of R^D with tolerance-aware join, meet and containment.

A flat is stored as an anchor point plus an orthonormal basis of its
direction space.  The empty set is a flat too (``dim == -1``), so that
``meet`` is total and Cayley-style constructions can be composed without
exception handling at every step.

Rank decisions use a cutoff relative to the largest singular value of the
matrix being decided.  A singular value sitting exactly at the cutoff counts
as zero: degeneracy wins ties.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError, UsageError


@dataclass(frozen=True)
class Tolerances:
    eps_rank: float = 1e-9
    eps_orth: float = 1e-10
    eps_geom: float = 1e-9

    def __post_init__(self):
        for name in ("eps_rank", "eps_orth", "eps_geom"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be strictly positive")
        if self.eps_rank < np.finfo(float).eps * 1e3:
            raise UsageError("eps_rank below 1e3 * machine epsilon")


DEFAULT_TOL = Tolerances()


def numeric_rank(singular_values, eps_rank):
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s.max() == 0.0:
        return 0
    return int(np.count_nonzero(s > eps_rank * s.max()))


def orthonormal_rows(vectors, eps_rank, floor=0.0):
    """Orthonormal basis (as rows) for the row space of ``vectors``."""
    m = np.atleast_2d(np.asarray(vectors, dtype=float))
    if m.size == 0:
        return np.zeros((0, m.shape[1] if m.ndim == 2 else 0))
    _, s, vt = np.linalg.svd(m, full_matrices=False)
    r = numeric_rank(s, eps_rank)
    if floor > 0.0:
        r = min(r, int(np.count_nonzero(s > floor)))
    return vt[:r].copy()


def _scale(*points):
    return max([1.0] + [float(np.linalg.norm(p)) for p in points if p is not None])


class AffineSubspace:
    """A k-dimensional flat in R^D, or the empty flat.

    Instances are immutable; arrays handed out are read-only views.
    """

    __slots__ = ("_ambient", "_anchor", "_basis")

    def __init__(self, anchor, basis=None, ambient_dim=None, *, _trusted=False):
        if anchor is None:
            if ambient_dim is None:
                raise UsageError("the empty flat needs an explicit ambient dimension")
            self._ambient = int(ambient_dim)
            self._anchor = None
            self._basis = np.zeros((0, self._ambient))
            self._basis.flags.writeable = False
            return
        a = np.array(anchor, dtype=float).reshape(-1)
        D = a.shape[0]
        if ambient_dim is not None and int(ambient_dim) != D:
            raise UsageError("anchor length does not match ambient dimension")
        if basis is None:
            b = np.zeros((0, D))
        else:
            b = np.array(basis, dtype=float).reshape(-1, D) if np.size(basis) else np.zeros((0, D))
        if not _trusted and b.shape[0]:
            b = orthonormal_rows(b, DEFAULT_TOL.eps_rank)
        if b.shape[0] > D:
            raise UsageError("more basis vectors than ambient dimensions")
        a.flags.writeable = False
        b.flags.writeable = False
        self._ambient = D
        self._anchor = a
        self._basis = b

    # construction helpers -------------------------------------------------
    @classmethod
    def empty(cls, ambient_dim):
        return cls(None, ambient_dim=ambient_dim)

    @classmethod
    def point(cls, p):
        return cls(p, None)

    @classmethod
    def through(cls, *points, tol=DEFAULT_TOL):
        return span_of_points(points, tol)

    # properties ---------------------------------------------------------------
    @property
    def ambient_dim(self):
        return self._ambient

    @property
    def anchor(self):
        return self._anchor

    @property
    def basis(self):
        return self._basis

    @property
    def dim(self):
        return -1 if self._anchor is None else self._basis.shape[0]

    @property
    def is_empty(self):
        return self._anchor is None

    def __repr__(self):
        if self.is_empty:
            return f"AffineSubspace(empty, D={self._ambient})"
        return f"AffineSubspace(dim={self.dim}, D={self._ambient}, anchor={np.round(self._anchor, 6).tolist()})"

    # geometry ------------------------------------------------------------------
    def direction_projector(self):
        return self._basis.T @ self._basis

    def complement_projector(self):
        return np.eye(self._ambient) - self.direction_projector()

    def project_point(self, x):
        self._require_nonempty()
        x = np.asarray(x, dtype=float)
        return self._anchor + self._basis.T @ (self._basis @ (x - self._anchor))

    def distance_to(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.project_point(x)))

    def transformed(self, rotation, translation):
        """Image under x -> rotation @ x + translation."""
        if self.is_empty:
            return self
        R = np.asarray(rotation, dtype=float)
        return AffineSubspace(R @ self._anchor + np.asarray(translation, dtype=float),
                              self._basis @ R.T, _trusted=True)

    def with_basis(self, basis):
        """Same flat, different orthonormal basis (used for invariance tests)."""
        return AffineSubspace(self._anchor, basis, _trusted=True)

    def _require_nonempty(self):
        if self.is_empty:
            raise UsageError("operation undefined on the empty flat")


def _check_ambient(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise UsageError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def span_of_points(points, tol=DEFAULT_TOL):
    pts = [np.asarray(p, dtype=float).reshape(-1) for p in points]
    if not pts:
        raise UsageError("span_of_points needs at least one point")
    D = pts[0].shape[0]
    if any(p.shape[0] != D for p in pts):
        raise UsageError("points live in different ambient dimensions")
    P = np.vstack(pts)
    anchor = P[0]
    basis = orthonormal_rows(P[1:] - anchor, tol.eps_rank, floor=tol.eps_geom * _scale(*pts)) \
        if len(pts) > 1 else np.zeros((0, D))
    return AffineSubspace(anchor, basis, _trusted=True)


def join(a, b, tol=DEFAULT_TOL):
    """Smallest flat containing both ``a`` and ``b``."""
    _check_ambient(a, b)
    if a.is_empty or b.is_empty:
        raise UsageError("join is undefined for the empty flat")
    dirs = orthonormal_rows(np.vstack([a.basis, b.basis]), tol.eps_rank) \
        if a.dim + b.dim > 0 else np.zeros((0, a.ambient_dim))
    offset = b.anchor - a.anchor
    resid = offset - dirs.T @ (dirs @ offset)
    if np.linalg.norm(resid) > tol.eps_geom * _scale(a.anchor, b.anchor):
        dirs = np.vstack([dirs, resid / np.linalg.norm(resid)])
    return AffineSubspace(a.anchor, dirs, _trusted=True)


def meet(a, b, tol=DEFAULT_TOL):
    """Set intersection of two flats; the empty flat when they are disjoint."""
    _check_ambient(a, b)
    D = a.ambient_dim
    if a.is_empty or b.is_empty:
        return AffineSubspace.empty(D)
    Qa, Qb = a.complement_projector(), b.complement_projector()
    M = np.vstack([Qa, Qb])
    rhs = np.concatenate([Qa @ a.anchor, Qb @ b.anchor])
    u, s, vt = np.linalg.svd(M, full_matrices=True)
    r = numeric_rank(s, tol.eps_rank)
    p = vt[:r].T @ ((u[:, :r].T @ rhs) / s[:r]) if r else np.zeros(D)
    if r == 0:
        p = a.anchor.copy()
    gtol = tol.eps_geom * _scale(a.anchor, b.anchor, p)
    if a.distance_to(p) > gtol or b.distance_to(p) > gtol:
        return AffineSubspace.empty(D)
    return AffineSubspace(p, vt[r:], _trusted=True)


def meet_all(flats, tol=DEFAULT_TOL):
    flats = list(flats)
    if not flats:
        raise UsageError("meet_all needs at least one flat")
    out = flats[0]
    for f in flats[1:]:
        out = meet(out, f, tol)
    return out


def contains(a, b, tol=DEFAULT_TOL):
    """True when flat ``b`` is a subset of flat ``a``."""
    _check_ambient(a, b)
    if b.is_empty:
        return True
    if a.is_empty or b.dim > a.dim:
        return False
    Q = a.complement_projector()
    if b.dim and np.max(np.linalg.norm(b.basis @ Q, axis=1)) > tol.eps_geom:
        return False
    return a.distance_to(b.anchor) <= tol.eps_geom * _scale(a.anchor, b.anchor)


def contains_point(a, x, tol=DEFAULT_TOL):
    if a.is_empty:
        return False
    return a.distance_to(x) <= tol.eps_geom * _scale(a.anchor, x)


def flats_equal(a, b, tol=DEFAULT_TOL):
    return a.dim == b.dim and contains(a, b, tol) and contains(b, a, tol)


def unit_normal_within(face, edge, toward, tol=DEFAULT_TOL):
    """Unit vector in ``face`` orthogonal to ``edge``, on the side of ``toward``."""
    _check_ambient(face, edge)
    if face.dim != edge.dim + 1:
        raise UsageError("face must have exactly one more dimension than edge")
    if not contains(face, edge, tol):
        raise UsageError("edge is not contained in face")
    x = np.asarray(toward, dtype=float)
    w = x - edge.project_point(x)
    w = face.direction_projector() @ w
    w = w - edge.direction_projector() @ w
    n = np.linalg.norm(w)
    if n <= tol.eps_geom * _scale(x, edge.anchor):
        raise DegenerateDirectionError("reference point lies on the edge")
    return w / n


def normal_directions(face, edge, tol=DEFAULT_TOL):
    """The unit vector (up to sign) in ``face`` orthogonal to ``edge``."""
    if face.dim != edge.dim + 1:
        raise UsageError("face must have exactly one more dimension than edge")
    P = face.direction_projector() - edge.direction_projector()
    w, v = np.linalg.eigh(P)
    return v[:, np.argmax(w)]


def canonical_sign(v):
    """Flip ``v`` so its first clearly nonzero component is positive."""
    v = np.asarray(v, dtype=float)
    big = np.flatnonzero(np.abs(v) > 1e-12 * max(1.0, np.abs(v).max()))
    if big.size and v[big[0]] < 0:
        return -v
    return v


def orthonormality_residual(basis):
    b = np.asarray(basis, dtype=float)
    if b.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(b @ b.T - np.eye(b.shape[0]))))
