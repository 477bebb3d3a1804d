import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from toricemb import examples as ex
from toricemb.akset import (
    FiniteSpace,
    analyse,
    brute_force_maximal,
    complement_components,
    fan_space,
    is_uk,
    maximal_uk_subsets,
    presentation_space,
    xy_operator,
)
from toricemb.conoid import quotient_presentation
from toricemb.fan import Fan


def p1_space():
    # orbits 0 = T, 1 = {0}, 2 = {inf}
    space = FiniteSpace(("T", "0", "inf"), (frozenset({0, 1, 2}), frozenset({1}), frozenset({2})))
    return space, [frozenset({0, 1}), frozenset({0, 2})]


def doubled_line_space():
    return presentation_space(quotient_presentation([[1], [1]], [[0], [1]]))


def named(space, S):
    return {space.names[i] for i in S}


def test_p1_components_and_charts():
    space, U = p1_space()
    assert complement_components(space, U, 2) == [(1, 2), (2, 1)]
    assert sorted(maximal_uk_subsets(space, U, 2), key=sorted) == U


def test_p1_from_fan_matches_hand_built():
    space, U = fan_space(ex.p1())
    comps = complement_components(space, U, 2)
    assert len(comps) == 2
    assert {tuple(space.names[i] for i in t) for t in comps} == {("{0}", "{1}"), ("{1}", "{0}")}
    assert sorted(maximal_uk_subsets(space, U, 2), key=sorted) == sorted(U, key=sorted)


def test_doubled_line():
    space, U = doubled_line_space()
    comps = complement_components(space, U, 2)
    assert {tuple(space.names[i] for i in t) for t in comps} == {("{0}", "{1}"), ("{1}", "{0}")}
    assert sorted(maximal_uk_subsets(space, U, 2), key=sorted) == sorted(U, key=sorted)
    Ua = U[0]
    assert xy_operator(space, comps, Ua) == Ua


def test_xy_examples_p1():
    space, U = p1_space()
    comps = complement_components(space, U, 2)
    assert xy_operator(space, comps, U[0]) == U[0]
    assert xy_operator(space, comps, space.points) == space.points


def test_whole_space_in_family():
    space, U = p1_space()
    fam = U + [space.points]
    assert complement_components(space, fam, 2) == []
    assert xy_operator(space, [], space.points) == space.points
    assert maximal_uk_subsets(space, fam, 3) == [space.points]


def test_k_zero_rejected():
    space, U = p1_space()
    with pytest.raises(ValueError):
        complement_components(space, U, 0)


def test_bad_closure_rejected():
    with pytest.raises(ValueError):
        FiniteSpace(("a", "b"), (frozenset({1}), frozenset({1})))


@pytest.mark.parametrize("fan", [ex.p2(), ex.p1xp1(), ex.weighted_p112()])
def test_k1_gives_union(fan):
    space, U = fan_space(fan)
    union = frozenset().union(*U)
    assert maximal_uk_subsets(space, U, 1) == [union]


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("fan", [ex.p2(), ex.p1xp1()])
def test_matches_brute_force(fan, k):
    space, U = fan_space(fan)
    assert maximal_uk_subsets(space, U, k) == brute_force_maximal(space, U, k)


def test_p2_k3_is_just_charts():
    # three torus-fixed points share no invariant chart
    space, U = fan_space(ex.p2())
    assert sorted(maximal_uk_subsets(space, U, 3), key=sorted) == sorted(U, key=sorted)


# random orbit posets of small toric (pre)varieties


def random_toric_space(rng):
    """Orbit space with invariant charts of a random subfan or prevariety, at most 10 orbits."""
    if rng.random() < 0.5:
        base = rng.choice([ex.p1(), ex.p2(), ex.p1xp1(), ex.weighted_p112(), ex.hirzebruch(1)])
        cones = [c for c in base.max_cones if rng.random() < 0.7] or [base.max_cones[0]]
        used = sorted({i for c in cones for i in c})
        f = Fan.make(base.rank, [base.rays[i] for i in used], [[used.index(i) for i in c] for c in cones])
        return fan_space(f)
    n = rng.randint(1, 3)
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
    tops = [s for s in subsets if rng.random() < 0.5] or [frozenset()]
    qp = quotient_presentation([[1]] * n, [sorted(t) for t in tops])
    return presentation_space(qp)


def check_xy_properties(space, U, k):
    comps = complement_components(space, U, k)
    opens = space.open_sets()
    values = set()
    for Y in opens:
        XY = xy_operator(space, comps, Y)
        values.add(XY)
        assert Y <= XY  # X(Y) contains Y
        assert space.is_open(XY)
        if is_uk(Y, U, k):
            assert is_uk(XY, U, k)  # and keeps the chart property
    assert len(values) <= 2 ** (k * len(comps))  # finitely many values
    an = analyse(space, U, k)
    assert set(values) <= set(an.values)
    got = list(an.maximal)
    assert got == brute_force_maximal(space, U, k)
    for a, b in itertools.permutations(got, 2):
        assert not a <= b
    for Y in got:
        assert space.is_open(Y) and is_uk(Y, U, k)
    for Y in opens:
        if is_uk(Y, U, k):
            assert any(Y <= M for M in got)


def test_xy_properties_on_random_posets():
    rng = random.Random(7)
    for _ in range(100):
        space, U = random_toric_space(rng)
        assert len(space.names) <= 10
        check_xy_properties(space, U, rng.choice([1, 2, 3]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_xy_properties_arbitrary_open_families(seed, k):
    rng = random.Random(seed)
    space, _ = random_toric_space(rng)
    opens = space.open_sets()
    U = [o for o in opens if rng.random() < 0.3] or [opens[-1]]
    check_xy_properties(space, U, k)
