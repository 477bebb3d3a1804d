import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import det as laplace_det
from oracles import invariant_factors_by_minors
from toricemb.lattice import (
    FinAbGroup,
    cokernel,
    det,
    generates,
    intersect_lattices,
    invariant_factors,
    kernel_basis,
    lattice_basis,
    matmul,
    rank,
    smith_normal_form,
    solve_integer,
    subgroup_index,
)

small_matrix = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def test_identity_snf():
    I = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    s = smith_normal_form(I)
    assert s.diag == (1, 1, 1)
    assert s.left == tuple(map(tuple, I)) or [list(r) for r in s.left] == I
    assert [list(r) for r in s.right] == I


def test_invariant_factor_examples():
    assert invariant_factors([[2, 0], [0, 3]]) == (1, 6)
    assert invariant_factors([[1, 0, -1], [0, 1, -1]]) == (1, 1)


@settings(max_examples=150, deadline=None)
@given(small_matrix)
def test_snf_decomposition(A):
    s = smith_normal_form(A)
    D = matmul(matmul(s.left, A), s.right)
    m, n = len(A), len(A[0])
    for i in range(m):
        for j in range(n):
            expected = s.diag[i] if i == j and i < len(s.diag) else 0
            assert D[i][j] == expected
    nz = [d for d in s.diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(det(s.left)) == 1 and abs(det(s.right)) == 1
    assert nz == invariant_factors_by_minors(A)


def test_cokernel_p2():
    c = cokernel([[1, 0], [0, 1], [-1, -1]])
    assert c.group == FinAbGroup(1, ())
    assert {c.project(e) for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1])} in ({(1,)}, {(-1,)})


def test_cokernel_zero_and_torsion():
    assert cokernel([[0, 0], [0, 0]]).group == FinAbGroup(2, ())
    assert cokernel([[2]]).group == FinAbGroup(0, (2,))


@settings(max_examples=80, deadline=None)
@given(small_matrix)
def test_cokernel_kills_image(A):
    c = cokernel(A)
    for j in range(len(A[0])):
        col = [row[j] for row in A]
        assert not any(c.project(col))
    assert c.group.free_rank == len(A) - rank(A)


def test_kernel_examples():
    assert kernel_basis([[1, 0, -1], [0, 1, -1]]) in ([(1, 1, 1)], [(-1, -1, -1)])
    assert kernel_basis([[1, 0], [0, 1]]) == []
    (k,) = kernel_basis([[2, 4]])
    assert k in ((2, -1), (-2, 1))


@settings(max_examples=80, deadline=None)
@given(small_matrix)
def test_kernel_rank_nullity_and_saturation(A):
    K = kernel_basis(A)
    n = len(A[0])
    assert len(K) + rank(A) == n
    for v in K:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)
    if K:
        # saturated: the basis extends to a unimodular matrix, so maximal minors have gcd 1
        cols = [list(r) for r in zip(*K)]
        assert invariant_factors_by_minors(cols) == [1] * len(K)


def test_generates_examples():
    Z = FinAbGroup(1, ())
    assert generates(Z, [(1,), (1,)])
    assert not generates(Z, [(2,)])
    assert generates(FinAbGroup(1, (2,)), [(1, 0), (0, 1)])
    assert generates(FinAbGroup(0, ()), [])
    assert not generates(Z, [])
    assert subgroup_index(Z, [(2,)]) == 2
    assert subgroup_index(Z, []) is None


def test_solve_integer():
    assert solve_integer([[2, 0], [0, 3]], [4, 9]) == (2, 3)
    assert solve_integer([[2]], [3]) is None


def test_lattice_intersection():
    L = intersect_lattices([[(2, 0), (0, 1)], [(1, 0), (0, 3)]], 2)
    assert abs(laplace_det([list(v) for v in L])) == 6
    assert len(lattice_basis([(2, 4), (1, 2)], 2)) == 1


def test_random_3x3_against_minors():
    rng = random.Random(7)
    for _ in range(50):
        A = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
        assert [d for d in smith_normal_form(A).diag if d] == invariant_factors_by_minors(A)
        assert det(A) == laplace_det(A)


def test_group_reduce_rejects_bad_torsion():
    with pytest.raises(ValueError):
        FinAbGroup(0, (3, 2))
