import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit import catalog, randomized as R
from stresskit.errors import DegenerateEdgeError
from stresskit.framework import (
    Stress,
    decompose_normals,
    equilibrium_matrix,
    equilibrium_residual,
    is_face_connected,
    stress_space,
    validate,
)

seeds = st.integers(0, 2 ** 31 - 1)


def test_k5_is_valid_generic_trivalent():
    rep = validate(catalog.gen_k5_tetrahedral())
    assert rep.valid and rep.generic and rep.trivalent


def test_k5_interior_stresses_equal():
    fw = catalog.gen_k5_tetrahedral()
    s = stress_space(fw).basis[0]
    interior = [s[f] for f in catalog.K5_INTERIOR]
    exterior = [s[f] for f in catalog.K5_EXTERIOR]
    assert max(interior) - min(interior) < 1e-12
    assert max(exterior) - min(exterior) < 1e-12


def test_equilibrium_matrix_shape():
    fw = catalog.gen_cube()
    assert equilibrium_matrix(fw).shape == (3 * len(fw.edges), len(fw.faces))


def test_zero_stress_has_zero_residual():
    fw = catalog.gen_k5_tetrahedral()
    assert equilibrium_residual(fw, Stress({f: 0.0 for f in fw.faces})) == 0.0


def test_decompose_normals_symmetric_edge():
    angles = [0, 2 * math.pi / 3, 4 * math.pi / 3]
    ns = [np.array([math.cos(a), math.sin(a), 0.0]) for a in angles]
    assert np.allclose(decompose_normals(*ns), (1, 1, 1))


def test_decompose_normals_rejects_collinear():
    n = np.array([1.0, 0, 0])
    with pytest.raises(DegenerateEdgeError):
        decompose_normals(n, -n, n)


def test_k4_and_prism_classics():
    rng = np.random.default_rng(0)
    assert stress_space(R.random_k4(rng)).dimension == 1
    assert stress_space(R.random_prism(rng, True)).dimension == 1
    assert stress_space(R.random_prism(rng, False)).dimension == 0
    assert stress_space(R.random_k33(rng, True)).dimension == 1
    assert stress_space(R.random_k33(rng, False)).dimension == 0


def test_face_connectivity():
    assert is_face_connected(catalog.gen_k5_tetrahedral())
    rng = np.random.default_rng(1)
    a, b = R.random_k4(rng), R.random_k4(rng)
    from stresskit.framework import DFramework
    merged = DFramework(1, {**a.edges, **{k + "'": v for k, v in b.edges.items()}},
                        {**a.faces, **{k + "'": v for k, v in b.faces.items()}},
                        {**a.normals, **{(e + "'", f + "'"): n for (e, f), n in b.normals.items()}})
    assert not is_face_connected(merged)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(["face", "edge"]))
def test_sign_flips_keep_dimension(seed, mode):
    rng = np.random.default_rng(seed)
    fw = catalog.gen_k5_tetrahedral()
    assert stress_space(R.flip_normals(fw, rng, mode, count=3)).dimension == 1


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_single_incidence_flip_breaks_k5(seed):
    rng = np.random.default_rng(seed)
    fw = R.flip_normals(catalog.gen_k5_tetrahedral(), rng, "incidence", count=1)
    assert stress_space(fw).dimension == 0


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    rot, t = R.random_rigid_motion(3, rng)
    fw = catalog.gen_k5_tetrahedral()
    moved = fw.transformed(rot, t)
    s0, s1 = stress_space(fw).basis[0], stress_space(moved).basis[0]
    r0, r1 = s0["123"] / s0["125"], s1["123"] / s1["125"]
    assert abs(r0 - r1) < 1e-8


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_cone_preserves_stressability(seed):
    rng = np.random.default_rng(seed)
    base = R.random_prism(rng, concurrent=bool(seed % 2))
    cone = R.cone_framework(base, [0.3, -0.2, 2.0])
    assert stress_space(cone).dimension == stress_space(base).dimension


def test_basis_sign_is_deterministic():
    fw = catalog.gen_cube()
    a = stress_space(fw).basis[0]
    b = stress_space(fw).basis[0]
    assert all(a[f] == b[f] for f in fw.faces)
