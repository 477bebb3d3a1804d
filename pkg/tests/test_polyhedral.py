import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_hilbert_basis, fm_feasible, grid_points, in_cone_by_lp
from toricemb.lattice import primitive
from toricemb.polyhedral import (
    LinearSystem,
    UnboundedError,
    cone,
    cone_props,
    dual_cone,
    faces,
    intersect,
    lattice_points,
    lp_feasible,
    lp_solve,
    monoid_generators,
)


def random_cone(rng, rank, k, box=3):
    gens = []
    while len(gens) < k:
        v = tuple(rng.randint(-box, box) for _ in range(rank))
        if any(v):
            gens.append(primitive(v))
    return cone(gens, rank)


def test_dual_examples():
    assert dual_cone(cone([(1, 0), (0, 1)], 2)) == cone([(1, 0), (0, 1)], 2)
    assert dual_cone(cone([(1, 0), (1, 2)], 2)) == cone([(0, 1), (2, -1)], 2)
    whole = dual_cone(cone([], 2))
    assert set(whole.generators) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_dual_membership_against_grid():
    C = cone([(1, 0), (1, 2)], 2)
    D = dual_cone(C)
    for m in grid_points(4, 2):
        pairing_ok = all(m[0] * g[0] + m[1] * g[1] >= 0 for g in C.generators)
        assert D.contains(m) == pairing_ok


def test_dual_involution_random():
    rng = random.Random(11)
    for _ in range(100):
        r = rng.randint(1, 4)
        C = random_cone(rng, r, rng.randint(1, r + 2))
        if not C.strongly_convex or C.dim != r:
            continue
        assert dual_cone(dual_cone(C)) == C


def test_face_counts():
    assert len(faces(cone([(1, 0), (0, 1)], 2))) == 4
    assert len(faces(cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3))) == 8
    square = cone([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], 3)
    assert len(faces(square)) == 10


def test_faces_need_strong_convexity():
    with pytest.raises(ValueError):
        faces(cone([(1, 0), (-1, 0)], 2))


def test_intersections():
    o = cone([(1, 0), (0, 1)], 2)
    assert intersect(o, o) == o
    assert intersect(cone([(1, 0), (1, 1)], 2), cone([(1, 1), (0, 1)], 2)) == cone([(1, 1)], 2)
    assert intersect(cone([(1, 0)], 2), cone([(-1, 0)], 2)) == cone([], 2)


def test_intersection_by_membership_sampling():
    rng = random.Random(3)
    for _ in range(30):
        a, b = random_cone(rng, 2, 2), random_cone(rng, 2, 2)
        c = intersect(a, b)
        for x in grid_points(3, 2):
            assert c.contains(x) == (a.contains(x) and b.contains(x))


def test_cone_membership_matches_fm():
    rng = random.Random(5)
    for _ in range(20):
        C = random_cone(rng, 3, 3, box=2)
        for x in list(grid_points(2, 3))[::7]:
            assert C.contains(x) == in_cone_by_lp(x, C.generators)


def test_props():
    p = cone_props(cone([(1, 0), (0, 1)], 2))
    assert (p.dim, p.smooth, p.multiplicity) == (2, True, 1)
    p = cone_props(cone([(1, 0), (-1, -2)], 2))
    assert p.simplicial and not p.smooth and p.multiplicity == 2
    p = cone_props(cone([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], 3))
    assert p.dim == 3 and not p.simplicial and p.multiplicity is None


def test_hilbert_basis_of_singular_dual():
    # dual of cone((1,0),(-1,-2)) is {m1 >= 0, -m1 - 2 m2 >= 0}
    got = monoid_generators([(1, 0), (-1, -2)], 2)
    assert got == [(0, -1), (1, -1), (2, -1)]
    assert got == brute_hilbert_basis([(1, 0), (-1, -2)], 2, 4)


def test_hilbert_basis_random_against_brute_force():
    rng = random.Random(9)
    for _ in range(15):
        C = random_cone(rng, 2, 2, box=3)
        if C.dim != 2 or not C.strongly_convex:
            continue
        ineqs = dual_cone(C).generators
        assert monoid_generators(ineqs, 2) == brute_hilbert_basis(ineqs, 2, 7)


def test_monoid_generators_with_lineality():
    assert set(monoid_generators([], 2)) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    gens = monoid_generators([(1, 0)], 2)
    assert (1, 0) in gens or any(g[0] == 1 for g in gens)
    assert all(g[0] >= 0 for g in gens)


def test_lattice_points_examples():
    pts = lattice_points([((1, 0), 0), ((0, 1), 0), ((-1, -1), 1)], 2)
    assert pts == [(0, 0), (0, 1), (1, 0)]
    with pytest.raises(UnboundedError):
        lattice_points([((1, 0), 0)], 2)
    assert len(lattice_points([((1, 0), 0)], 2, box=1)) == 6


def test_lp_examples():
    s = LinearSystem()
    s.add_variable("x")
    s.ge({"x": 1}, -1)
    s.ge({"x": -1}, 0)
    assert lp_feasible(s) is None
    s = LinearSystem()
    s.add_variable("x")
    s.add_variable("y")
    s.eq({"x": 1, "y": 1})
    s.ge({"x": 1}, -1)
    w = lp_feasible(s)
    assert w is not None and s.satisfied_by(w)


def test_lp_optimum():
    s = LinearSystem()
    for v in "xy":
        s.add_variable(v)
    s.ge({"x": 1}, 0)
    s.ge({"y": 1}, 0)
    s.ge({"x": -1, "y": -1}, 4)
    res = lp_solve(s, {"x": -1, "y": -2})
    assert res.status == "optimal" and res.value == -8
    s2 = LinearSystem()
    s2.add_variable("x")
    assert lp_solve(s2, {"x": 1}).status == "unbounded"


coef = st.integers(-3, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.lists(coef, min_size=n, max_size=n), st.integers(-4, 4)), min_size=1, max_size=5),
)))
def test_lp_agrees_with_fourier_motzkin(case):
    n, rows = case
    s = LinearSystem()
    names = [s.add_variable(f"x{i}") for i in range(n)]
    for a, b in rows:
        s.ge({v: c for v, c in zip(names, a) if c}, b)
    w = lp_feasible(s)
    assert (w is not None) == fm_feasible(rows, n)
    if w is not None:
        for a, b in rows:
            assert sum(Fraction(c) * w[v] for v, c in zip(names, a)) + b >= 0
