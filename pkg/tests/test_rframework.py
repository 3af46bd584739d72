import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit import catalog
from stresskit.errors import UsageError
from stresskit.framework import locally_stressable, stress_space
from stresskit.oneform import fundamental_face_cycles
from stresskit.paths import is_trivial_monodromy, monodromy
from stresskit.randomized import random_rigid_motion
from stresskit.rframework import (
    CWComplex,
    RFramework,
    global_stressability_report,
    induced_d_framework,
    is_locally_stressable,
    lift_space,
    perturb_realization,
    prism_chain,
    spherical_link,
    triangulate,
)

seeds = st.integers(0, 2 ** 31 - 1)


def _quad(order):
    """A single quadrilateral 2-cell in the plane z = 0 of R^3."""
    pts = {"a": [0, 0, 0], "b": [2, 0, 0], "c": [2, 1, 0], "d": [0, 1, 0]}
    cyc = list(order)
    levels = {1: {f"{cyc[i]}{cyc[(i + 1) % 4]}": (cyc[i], cyc[(i + 1) % 4]) for i in range(4)},
              2: {"Q": tuple(cyc)}}
    return RFramework(CWComplex.from_vertex_sets(levels), pts, 2)


def test_simplex_projection_matches_k5():
    a = stress_space(induced_d_framework(catalog.gen_k5_simplex())).basis[0]
    b = stress_space(catalog.gen_k5_tetrahedral()).basis[0]
    assert abs(a["123"] / a["125"] - b["123"] / b["125"]) < 1e-12


def test_convex_quadrilateral_normals_point_inward():
    fw = induced_d_framework(_quad("abcd"))
    centre = np.array([1.0, 0.5, 0.0])
    for (e, f), n in fw.normals.items():
        assert n @ (centre - fw.edges[e].project_point(centre)) > 0


def test_crossed_quadrilateral_flips_one_pair():
    fw = induced_d_framework(_quad("acbd"))
    centre = np.array([1.0, 0.5, 0.0])
    signs = sorted(np.sign(n @ (centre - fw.edges[e].project_point(centre))) for (e, _), n in fw.normals.items())
    assert signs == [-1, -1, 1, 1]


def test_planar_graph_normals_follow_the_bars():
    r = catalog.gen_cube_schlegel()
    fw = induced_d_framework(r)
    for (e, f), n in fw.normals.items():
        (other,) = r.complex.vertices(f) - {e}
        u = r.placement[other] - r.placement[e]
        assert np.allclose(n, u / np.linalg.norm(u))


def test_triangulating_simplices_is_identity():
    r = catalog.gen_k5_simplex()
    assert set(triangulate(r).faces) == set(r.faces)


def test_triangulation_keeps_stress_dimension():
    r = catalog.gen_hypercube_schlegel()
    t = triangulate(r)
    assert len(t.faces) == 2 * len(r.faces)
    # the two halves of a square share a plane, so skip the genericity check
    tri = induced_d_framework(t, check_generic=False)
    assert stress_space(tri).dimension == stress_space(induced_d_framework(r)).dimension


def test_fan_apex_does_not_change_stresses():
    r = catalog.gen_hypercube_schlegel()
    base = stress_space(induced_d_framework(r)).dimension
    for k in range(4):
        apex = {f: sorted(r.complex.vertices(f))[k] for f in r.faces}
        assert stress_space(induced_d_framework(r, apex=apex)).dimension == base


@pytest.mark.parametrize("name", ["k5-simplex", "hypercube-schlegel", "cube-schlegel"])
def test_lift_dimension_equals_stress_dimension(name):
    r = catalog.get(name).build()
    assert lift_space(r).dimension == stress_space(induced_d_framework(r)).dimension == 1


def test_lift_agrees_on_shared_faces():
    r = catalog.gen_k5_simplex()
    lift = lift_space(r).basis[0]
    for f in r.faces:
        owners = r.complex.cofaces(f)
        for x in r.points(f):
            vals = [lift(c, x) for c in owners]
            assert max(vals) - min(vals) < 1e-9


def test_unknown_base_chamber():
    with pytest.raises(UsageError):
        lift_space(catalog.gen_k5_simplex(), base="nope")


def test_four_valent_link_is_k4():
    link = spherical_link(catalog.gen_k5_simplex(), "1")
    assert link.valence == 4 and len(link.arcs) == 6
    for u in link.nodes.values():
        assert abs(np.linalg.norm(u) - 1) < 1e-12


@pytest.mark.parametrize("name", ["k5-simplex", "hypercube-schlegel", "prism-chain-closed"])
def test_every_vertex_locally_stressable(name):
    r = catalog.get(name).build()
    assert all(is_locally_stressable(r, v) for v in r.d_vertices)


def test_flat_k5_vertex_not_locally_stressable():
    fw = catalog.gen_k5_coplanar_k4faces()
    assert not locally_stressable(fw, ["1-2", "1-3", "1-4", "1-5"])


@pytest.mark.parametrize("name", ["k5-simplex", "hypercube-schlegel"])
def test_local_stressability_is_local_monodromy(name):
    r = catalog.get(name).build()
    fw = induced_d_framework(r)
    for v in r.d_vertices:
        edges = [e for e in r.edges if r.complex.vertices(v) <= r.complex.vertices(e)]
        sub = fw.restricted(edges)
        trivial = all(is_trivial_monodromy(monodromy(c)) for c in fundamental_face_cycles(sub))
        assert trivial == is_locally_stressable(r, v, fw=fw)


def test_hypercube_is_three_four_valent():
    r = catalog.gen_hypercube_schlegel()
    assert {len(r.complex.cofaces(e)) for e in r.edges} == {3}
    assert {len(spherical_link(r, v).nodes) for v in r.d_vertices} == {4}


def test_prism_chain_dimensions():
    for count in (1, 2, 3):
        assert stress_space(induced_d_framework(prism_chain(count))).dimension == 1
    closed = prism_chain(3, close_up=True)
    rep = global_stressability_report(closed)
    assert not rep.global_stressable and all(rep.local.values())


def test_prism_chain_rejects_bad_count():
    with pytest.raises(UsageError):
        prism_chain(4)


def test_regularity_check():
    assert catalog.gen_k5_simplex().complex.check_regular() == []
    # two squares meeting in the opposite corners a and c only
    bad = CWComplex.from_vertex_sets({1: {"ab": "ab", "bc": "bc", "cx": "cx", "xa": "xa",
                                          "ad": "ad", "dc": "dc", "ce": "ce", "ea": "ea"},
                                      2: {"P": "abcx", "Q": "adce"}})
    assert bad.check_regular()


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_perturbed_schlegel_diagrams(seed):
    rng = np.random.default_rng(seed)
    h = perturb_realization(catalog.gen_hypercube_schlegel(), rng)
    assert h.check_realization() == []
    assert stress_space(induced_d_framework(h)).dimension >= 1
    c = perturb_realization(catalog.gen_cube_schlegel(), rng)
    assert stress_space(induced_d_framework(c)).dimension == 0


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_rigid_motion_keeps_lift_and_stress(seed):
    rot, t = random_rigid_motion(3, np.random.default_rng(seed))
    r = catalog.gen_hypercube_schlegel().transformed(rot, t)
    assert lift_space(r).dimension == stress_space(induced_d_framework(r)).dimension == 1
