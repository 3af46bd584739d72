import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit import catalog
from stresskit.errors import SurgeryError, UsageError
from stresskit.framework import stress_space
from stresskit.paths import (
    cycle_framework,
    induced_face_path,
    is_trivial_monodromy,
    monodromy,
    three_cycle_stressable,
)
from stresskit.randomized import make_stressable, random_face_cycle
from stresskit.surgery import (
    add_duplicate,
    add_loop2,
    cayley_condition,
    framework_cayley_check,
    has_duplicate,
    has_loop2,
    hf_admissible,
    hf_surgery,
    remove_duplicate,
    remove_loop2,
    resolve,
)

seeds = st.integers(0, 2 ** 31 - 1)


def _dim(c):
    return stress_space(cycle_framework(c)).dimension


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(4, 8), st.sampled_from([1, 2]), st.booleans())
def test_hf_preserves_stress_dimension(seed, k, d, stressable):
    c = random_face_cycle(k, d, np.random.default_rng(seed))
    if stressable:
        c = make_stressable(c)
    before = _dim(c)
    for i in range(k):
        if hf_admissible(c, i)[0]:
            out, step = hf_surgery(c, i)
            assert len(out) == k - 1
            assert step.kind == "HF" and step.index == i
            assert _dim(out) == before
            assert is_trivial_monodromy(monodromy(out)) == is_trivial_monodromy(monodromy(c))


def test_hf_needs_length_four():
    c = random_face_cycle(3, 2, np.random.default_rng(0))
    with pytest.raises(UsageError):
        hf_admissible(c, 0)


def test_inadmissible_hf_raises():
    c = random_face_cycle(5, 2, np.random.default_rng(0))
    c = add_duplicate(c, 1)
    ok, reason = hf_admissible(c, 1)
    assert not ok and reason.startswith("(i)")
    with pytest.raises(SurgeryError):
        hf_surgery(c, 1)


def test_generic_five_cycle_resolves_in_two_steps():
    c = random_face_cycle(5, 2, np.random.default_rng(7))
    res = resolve(c)
    assert res.resolved
    assert len(res.steps) == 2
    assert len(res.cycle) == 3


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(4, 7), st.booleans())
def test_cayley_condition_matches_monodromy(seed, k, stressable):
    c = random_face_cycle(k, 2, np.random.default_rng(seed))
    if stressable:
        c = make_stressable(c)
    res = resolve(c)
    if not res.resolved:
        return
    assert cayley_condition(c) == stressable
    assert three_cycle_stressable(res.cycle) == is_trivial_monodromy(monodromy(c))


def test_duplicate_round_trip_keeps_monodromy():
    c = random_face_cycle(5, 2, np.random.default_rng(3))
    m = monodromy(c)
    dup = add_duplicate(c, 2)
    assert len(dup) == 6
    assert has_duplicate(dup, 2)
    assert abs(monodromy(dup) - m) < 1e-9 * abs(m)
    back = remove_duplicate(dup, 2)
    assert len(back) == 5
    assert abs(monodromy(back) - m) < 1e-9 * abs(m)
    with pytest.raises(SurgeryError):
        remove_duplicate(c, 0)


def test_loop2_round_trip_on_k5():
    fw = catalog.gen_k5_tetrahedral()
    c = induced_face_path(fw, ["123", "125", "235"], cycle=True)
    e = "1-3"
    looped = add_loop2(c, 0, fw.edges[e], fw.faces["134"], fw.faces["135"],
                       (fw.normal(e, "123"), fw.normal(e, "134"), fw.normal(e, "135")),
                       edge_id=e, rail_id="134", hat_id="135")
    assert len(looped) == 5
    assert has_loop2(looped, 0)
    assert abs(monodromy(looped) - 1) < 1e-9
    back = remove_loop2(looped, 0)
    assert back.rail_ids == c.rail_ids
    assert abs(monodromy(back) - monodromy(c)) < 1e-12


def test_framework_cayley_verdicts():
    fw = catalog.gen_k5_tetrahedral()
    cycles = [induced_face_path(fw, s, cycle=True)
              for s in (["123", "125", "235"], ["124", "234", "235", "125"])]
    rep = framework_cayley_check(fw, cycles)
    assert rep.verdict is True
    assert [e["resolved"] for e in rep.cycles] == [True, True]
