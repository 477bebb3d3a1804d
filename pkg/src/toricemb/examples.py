"""Standard fans and seeded random fan generators."""

from __future__ import annotations

import random
from itertools import combinations
from math import gcd

from .fan import Fan, check_fan
from .lattice import det, primitive, rank


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [(-1,) * n]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan.make(n, rays, cones)


def p1() -> Fan:
    return projective_space(1)


def p2() -> Fan:
    return projective_space(2)


def p1xp1() -> Fan:
    return Fan.make(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (0, 3), (1, 2), (1, 3)])


def hirzebruch(a: int) -> Fan:
    return Fan.make(2, [(1, 0), (0, 1), (-1, a), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])


def weighted_p112() -> Fan:
    return Fan.make(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (0, 2), (1, 2)])


def nondivisorial3() -> Fan:
    """Complete fan over the faces of a cube with the vertex (1,1,1) moved to (1,2,3).

    Every Cartier divisor on it is principal.
    """
    verts = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    rays = [(1, 2, 3) if v == (1, 1, 1) else v for v in verts]
    cones = []
    for axis in range(3):
        for sign in (-1, 1):
            cones.append(tuple(i for i, v in enumerate(verts) if v[axis] == sign))
    return Fan.make(3, rays, cones)


def single_cone(rays) -> Fan:
    rays = [tuple(r) for r in rays]
    return Fan.make(len(rays[0]), rays, [tuple(range(len(rays)))])


# ---------------------------------------------------------------------------
# random fans


def _stellar(fan: Fan, w) -> Fan:
    """Star subdivision of a complete simplicial fan at the primitive vector w."""
    w = tuple(w)
    if w in fan.rays:
        return fan
    # minimal cone containing w in its relative interior
    tau = None
    for c in fan.all_cones:
        if fan.cone_of(c).relative_interior_contains(w):
            tau = c
            break
    assert tau is not None
    k = len(fan.rays)
    cones = []
    for c in fan.max_cones:
        if tau <= set(c):
            for i in tau:
                cones.append(tuple(j for j in c if j != i) + (k,))
        else:
            cones.append(c)
    return Fan.make(fan.rank, list(fan.rays) + [w], cones)


def random_smooth_complete_fan(rng: random.Random, max_rays: int = 8) -> Fan:
    """Smooth complete fan of rank <= 3 by random smooth blow-ups of a seed fan."""
    r = rng.choice([1, 2, 2, 3, 3, 3])
    if r == 1:
        return p1()
    if r == 2:
        fan = rng.choice([p2(), p1xp1(), hirzebruch(rng.randint(0, 3))])
    else:
        fan = rng.choice([projective_space(3), _p1xp2(), _p1cube()])
    while len(fan.rays) < max_rays and rng.random() < 0.7:
        c = rng.choice([c for c in fan.all_cones if len(c) >= 2])
        w = tuple(sum(fan.rays[i][j] for i in c) for j in range(fan.rank))
        fan = _stellar(fan, w)
    return fan


def random_simplicial_complete_fan(rng: random.Random, max_rays: int = 8) -> Fan:
    """Complete simplicial fan of rank <= 3, often singular."""
    r = rng.choice([2, 2, 3, 3, 3])
    if r == 2:
        fan = rng.choice([p2(), p1xp1(), weighted_p112(), _weighted_p2(rng)])
    else:
        fan = rng.choice([projective_space(3), _p1xp2(), _weighted_p3(rng)])
    while len(fan.rays) < max_rays and rng.random() < 0.7:
        c = rng.choice(fan.max_cones)
        coeffs = [rng.randint(0, 2) for _ in c]
        if not any(coeffs):
            continue
        w = primitive(tuple(sum(a * fan.rays[i][j] for a, i in zip(coeffs, c)) for j in range(fan.rank)))
        fan = _stellar(fan, w)
    return check_fan(fan)


def random_simplicial_cone(rng: random.Random, box: int = 3):
    """Primitive rays of a random full-dimensional simplicial cone of rank <= 3."""
    r = rng.randint(1, 3)
    while True:
        rays = [
            primitive(tuple(rng.randint(-box, box) for _ in range(r))) for _ in range(r)
        ]
        if all(any(v) for v in rays) and rank(rays) == r:
            return rays


def _p1xp2() -> Fan:
    rays = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1), (0, -1, -1)]
    cones = [(a, b, c) for a in (0, 1) for b, c in combinations((2, 3, 4), 2)]
    return Fan.make(3, rays, cones)


def _p1cube() -> Fan:
    rays = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    cones = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return Fan.make(3, rays, cones)


def weighted_projective(weights) -> Fan:
    """Fan of weighted projective space with pairwise coprime-ish weights."""
    n = len(weights) - 1
    # rays v_0..v_n with sum w_i v_i = 0: v_i = e_i for i >= 1, v_0 determined
    if weights[0] != 1:
        raise ValueError("first weight must be 1")
    rays = [tuple(-w for w in weights[1:])] + [
        tuple(int(i == j) for j in range(n)) for i in range(n)
    ]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan.make(n, rays, cones)


def _weighted_p2(rng):
    a, b = rng.randint(1, 3), rng.randint(1, 3)
    if gcd(a, b) != 1:
        b = 1
    return weighted_projective((1, a, b))


def _weighted_p3(rng):
    a, b = rng.randint(1, 2), rng.randint(1, 3)
    if gcd(a, b) != 1:
        b = 1
    return weighted_projective((1, 1, a, b))


def unimodular(n: int, rng: random.Random):
    """Random unimodular integer matrix built from elementary operations."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        q = rng.randint(-2, 2)
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]
    assert abs(det(U)) == 1
    return U
