import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit import catalog, randomized as R
from stresskit.affine import AffineSubspace
from stresskit.errors import UsageError
from stresskit.framework import DFramework, equilibrium_residual, stress_space
from stresskit.oneform import (
    affine_ratio,
    build_dual_graph,
    exactness,
    fundamental_face_cycles,
    one_form,
    oneform_check,
    stress_from_one_form,
)
from stresskit.paths import monodromy
from stresskit.rframework import induced_d_framework

seeds = st.integers(0, 2 ** 31 - 1)


@pytest.fixture(scope="module")
def k5():
    fw = catalog.gen_k5_tetrahedral()
    dg = build_dual_graph(fw)
    return fw, dg, one_form(fw, dg)


def test_k5_dual_graph_size(k5):
    fw, dg, _ = k5
    assert len(dg.nodes) == 10 and len(dg.arcs) == 30
    assert dg.is_connected()


def test_single_edge_dual_graph_is_triangle():
    s = math.sqrt(3) / 2
    dirs = [np.array([1.0, 0, 0]), np.array([-0.5, s, 0]), np.array([-0.5, -s, 0])]
    edge = AffineSubspace([0, 0, 0], [[0, 0, 1]])
    faces = {f"f{i}": AffineSubspace([0, 0, 0], [[0, 0, 1], u]) for i, u in enumerate(dirs)}
    fw = DFramework(2, {"e": edge}, faces, {("e", f"f{i}"): u for i, u in enumerate(dirs)})
    dg = build_dual_graph(fw)
    assert len(dg.arcs) == 3
    q = one_form(fw, dg)
    assert all(abs(v - 1) < 1e-12 for v in q.values.values())


def test_non_trivalent_is_rejected():
    with pytest.raises(UsageError):
        build_dual_graph(catalog.get("prism-chain-2").framework())


def test_reciprocity(k5):
    _, _, q = k5
    assert q.reciprocity_defect() < 1e-12


def test_q_is_the_affine_ratio(k5):
    fw, dg, q = k5
    for a in dg.arcs:
        r = affine_ratio(fw.normal(a.edge, a.tail), fw.normal(a.edge, a.head), fw.normal(a.edge, a.hat))
        assert abs(r - q[a]) < 1e-9


def test_q_reproduces_stress_ratios(k5):
    fw, dg, q = k5
    s = stress_space(fw).basis[0]
    for a in dg.arcs:
        assert abs(s[a.head] / s[a.tail] - q[a]) < 1e-9


def test_exact_on_k5_for_five_trees(k5):
    fw, dg, q = k5
    for seed in range(5):
        rep = exactness(fw, dg, q, rng=np.random.default_rng(seed))
        assert rep.exact and rep.defect < 1e-8


def test_coplanar_k5_not_exact():
    rep = oneform_check(catalog.gen_k5_coplanar_k4faces())
    assert not rep.exact and rep.defect == math.inf and rep.degenerate_edges


def test_stress_from_one_form(k5):
    fw, dg, q = k5
    s = stress_from_one_form(fw, dg, q, root="123", s0=1.0)
    assert abs(s["125"] + 4 / math.sqrt(6)) < 1e-9
    assert equilibrium_residual(fw, s) < 1e-9
    s2 = stress_from_one_form(fw, dg, q, root="123", s0=3.0)
    assert all(abs(s2[f] - 3 * s[f]) < 1e-9 for f in fw.faces)
    # lies in the nullspace span
    b = stress_space(fw).basis[0]
    v, w = s.vector(fw), b.vector(fw)
    assert np.linalg.norm(v - (v @ w) / (w @ w) * w) < 1e-8


def test_fundamental_cycles_have_trivial_monodromy(k5):
    fw, dg, _ = k5
    cycles = fundamental_face_cycles(fw, dg, rng=np.random.default_rng(0))
    assert cycles
    assert all(abs(monodromy(c) - 1) < 1e-9 for c in cycles)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_moving_one_vertex_breaks_exactness(seed):
    rng = np.random.default_rng(seed)
    r = catalog.gen_cube_schlegel()
    v = sorted(r.placement)[seed % len(r.placement)]
    moved = r.with_placement({**r.placement, v: r.placement[v] + rng.normal(0, 0.1, 2)})
    fw = induced_d_framework(moved)
    assert oneform_check(induced_d_framework(r), rng=rng).exact
    assert not oneform_check(fw, rng=rng).exact
    assert stress_space(fw).dimension == 0


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_exactness_matches_nullspace_on_random_prisms(seed):
    rng = np.random.default_rng(seed)
    fw = R.random_prism(rng, concurrent=bool(seed % 2))
    assert oneform_check(fw, rng=rng).exact == (stress_space(fw).dimension > 0)
