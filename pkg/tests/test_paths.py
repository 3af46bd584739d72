import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit import catalog
from stresskit.affine import meet_all
from stresskit.errors import UsageError
from stresskit.framework import equilibrium_residual, stress_space
from stresskit.paths import (
    cross_ratio_at_edge,
    cycle_framework,
    harmonic_hat_plane,
    induced_face_path,
    is_edge_orientable,
    is_trivial_monodromy,
    monodromy,
    path_stress_transition,
    three_cycle_stressable,
    validate_path,
)
from stresskit.randomized import (
    make_stressable,
    random_face_cycle,
    random_three_cycle,
    with_flipped_rail_normal,
)

seeds = st.integers(0, 2 ** 31 - 1)


@pytest.fixture(scope="module")
def k5():
    return catalog.gen_k5_tetrahedral()


def test_k5_three_cycle_trivial(k5):
    c = induced_face_path(k5, ["123", "125", "235"], cycle=True)
    assert abs(monodromy(c) - 1) < 1e-12
    assert is_edge_orientable(c)
    assert three_cycle_stressable(c)


def test_k5_face_path_ratio(k5):
    p = induced_face_path(k5, ["123", "125"])
    s = path_stress_transition(p, 1.0)
    assert abs(s.rails[1] - 1.0 / (-np.sqrt(6) / 4)) < 1e-12


def test_path_needs_an_edge(k5):
    with pytest.raises(UsageError):
        induced_face_path(k5, ["123"])


def test_random_cycle_is_valid():
    c = random_face_cycle(6, 2, np.random.default_rng(0))
    assert validate_path(c) == []


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(3, 8), st.sampled_from([1, 2]))
def test_rotation_keeps_and_reversal_inverts_monodromy(seed, k, d):
    c = random_face_cycle(k, d, np.random.default_rng(seed))
    m = monodromy(c)
    assert abs(monodromy(c.rotated(seed % k)) - m) < 1e-9 * abs(m)
    assert abs(monodromy(c.reversed()) * m - 1) < 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(3, 8), st.sampled_from([1, 2]))
def test_monodromy_matches_cycle_oracle(seed, k, d):
    rng = np.random.default_rng(seed)
    c = random_face_cycle(k, d, rng)
    if seed % 2:
        c = make_stressable(c)
    trivial = is_trivial_monodromy(monodromy(c))
    assert trivial == bool(seed % 2)
    assert trivial == (stress_space(cycle_framework(c)).dimension > 0)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_flipping_one_rail_normal_toggles_orientability(seed, d):
    c = random_face_cycle(4, d, np.random.default_rng(seed))
    assert is_edge_orientable(with_flipped_rail_normal(c, 1)) != is_edge_orientable(c)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, 2, 3]), st.booleans(), st.booleans())
def test_three_cycle_triple_oracle(seed, d, orientable, stressable):
    c = random_three_cycle(d, np.random.default_rng(seed), orientable, stressable)
    verdict = three_cycle_stressable(c)
    assert verdict == stressable
    assert verdict == (stress_space(cycle_framework(c)).dimension > 0)
    assert verdict == is_trivial_monodromy(monodromy(c))
    if orientable:
        assert (meet_all(c.hats).dim == d - 1) == verdict


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1, 2, 3]))
def test_harmonic_hat_cross_ratio(seed, d):
    c = random_three_cycle(d, np.random.default_rng(seed), orientable=False, stressable=bool(seed % 2))
    h = harmonic_hat_plane(c)
    cr = cross_ratio_at_edge(c.edges[2], c.rails[2], c.rails[0], c.hats[2], h)
    assert abs(cr + 1) < 1e-6


def test_stress_transition_closes_on_stressable_cycle():
    c = make_stressable(random_face_cycle(5, 2, np.random.default_rng(4)))
    s = path_stress_transition(c, 1.0)
    assert abs(s.rails[-1] - 1.0) < 1e-9
    fw = cycle_framework(c)
    sp = stress_space(fw)
    assert sp.dimension == 1
    assert equilibrium_residual(fw, sp.basis[0]) < 1e-9
