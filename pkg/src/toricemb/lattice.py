"""Exact integer linear algebra.

Matrices are plain nested lists (or tuples) of Python ints, row-major.
Everything here is exact; there is no machine-word fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence[int]]
Vector = tuple[int, ...]


def shape(A: Matrix, ncols: int | None = None) -> tuple[int, int]:
    if len(A) == 0:
        return 0, (ncols or 0)
    return len(A), len(A[0])


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Matrix, ncols: int | None = None) -> list[list[int]]:
    m, n = shape(A, ncols)
    return [[A[i][j] for i in range(m)] for j in range(n)]


def matmul(A: Matrix, B: Matrix) -> list[list[int]]:
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence[int]) -> tuple:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries."""
    g = reduce(gcd, v, 0)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def clear_denominators(v: Sequence[Fraction]) -> Vector:
    """Smallest positive integer multiple of a rational vector."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return tuple(int(Fraction(x) * den) for x in v)


def det(A: Matrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q. Returns (nonzero rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return [], []
    m, n = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M[:r], pivots


def rank(A: Sequence[Sequence]) -> int:
    return len(rref(A)[0]) if A else 0


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some rational solution of A x = b, or None. Free variables are set to 0."""
    m = len(A)
    if m == 0:
        return None
    n = len(A[0])
    R, piv = rref([list(A[i]) + [b[i]] for i in range(m)])
    if piv and piv[-1] == n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ A @ right`` is diagonal with entries ``diag``."""

    left: tuple[tuple[int, ...], ...]
    diag: tuple[int, ...]
    right: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)


def smith_normal_form(A: Matrix, ncols: int | None = None) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivoting always picks the smallest nonzero absolute value in the
    remaining block, ties broken by lowest row and then lowest column, so
    the transforms are deterministic.
    """
    m, n = shape(A, ncols)
    D = [list(r) for r in A]
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        L[dst] = [a + q * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in R:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] != 0 and (best is None or abs(D[i][j]) < best[0]):
                        best = (abs(D[i][j]), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]

    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SmithDecomposition(
        tuple(map(tuple, L)), diag, tuple(map(tuple, R))
    )


def invariant_factors(A: Matrix, ncols: int | None = None) -> tuple[int, ...]:
    return smith_normal_form(A, ncols).diag


@dataclass(frozen=True)
class FinAbGroup:
    """Z^free_rank + Z/d_1 + ... + Z/d_t with d_1 | d_2 | ... and d_i >= 2.

    Elements are integer tuples of length ``free_rank + len(torsion)``; the
    torsion coordinates are kept reduced mod d_i.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion factors must be >= 2")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self) -> int | None:
        """Group order, None when infinite."""
        if self.free_rank:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def reduce(self, x: Sequence[int]) -> Vector:
        f = self.free_rank
        return tuple(x[:f]) + tuple(v % d for v, d in zip(x[f:], self.torsion))

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def add(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.reduce([a + b for a, b in zip(x, y)])

    def scale(self, c: int, x: Sequence[int]) -> Vector:
        return self.reduce([c * a for a in x])

    def relation_columns(self) -> list[Vector]:
        f, t = self.free_rank, len(self.torsion)
        return [
            tuple(d if i == f + k else 0 for i in range(f + t))
            for k, d in enumerate(self.torsion)
        ]

    def __str__(self):
        parts = ([f"Z^{self.free_rank}"] if self.free_rank else []) + [
            f"Z/{d}" for d in self.torsion
        ]
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class Cokernel:
    group: FinAbGroup
    projection: tuple[tuple[int, ...], ...]  # rows: group coordinates

    def project(self, v: Sequence[int]) -> Vector:
        return self.group.reduce(matvec(self.projection, v))


def cokernel(A: Matrix, nrows: int | None = None) -> Cokernel:
    """Z^rows / column-span(A) with its projection matrix.

    ``nrows`` is needed when A has no columns given as an empty row list.
    """
    if nrows is not None and (len(A) == 0 or len(A[0]) == 0):
        m = nrows
        return Cokernel(FinAbGroup(m), tuple(map(tuple, identity(m))))
    m, n = shape(A)
    snf = smith_normal_form(A)
    r = snf.rank
    tors = [(i, d) for i, d in enumerate(snf.diag[:r]) if d > 1]
    rows = [snf.left[i] for i in range(r, m)] + [snf.left[i] for i, _ in tors]
    group = FinAbGroup(m - r, tuple(d for _, d in tors))
    proj = []
    for k, row in enumerate(rows):
        if k >= group.free_rank:
            d = group.torsion[k - group.free_rank]
            row = tuple(x % d for x in row)
        proj.append(tuple(row))
    return Cokernel(group, tuple(proj))


def kernel_basis(A: Matrix, ncols: int | None = None) -> list[Vector]:
    """Basis (as vectors) of the integer kernel {x : A x = 0}.

    The basis spans a saturated lattice, because it is a set of columns of
    a unimodular matrix.
    """
    m, n = shape(A, ncols)
    if m == 0:
        return [tuple(r) for r in identity(n)]
    snf = smith_normal_form(A)
    r = snf.rank
    return [tuple(snf.right[i][j] for i in range(n)) for j in range(r, n)]


def solve_integer(A: Matrix, b: Sequence[int], ncols: int | None = None) -> Vector | None:
    """An integer solution of A x = b (free coordinates zero), or None."""
    m, n = shape(A, ncols)
    if m == 0:
        return (0,) * n
    snf = smith_normal_form(A)
    c = matvec(snf.left, b)
    y = [0] * n
    for i in range(m):
        d = snf.diag[i] if i < len(snf.diag) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return matvec(snf.right, y)


def generates(group: FinAbGroup, elements: Sequence[Sequence[int]]) -> bool:
    """True iff the elements generate the whole group."""
    k = group.ngens
    if k == 0:
        return True
    cols = [tuple(e) for e in elements] + group.relation_columns()
    if not cols:
        return False
    M = transpose(cols)
    snf = smith_normal_form(M)
    return snf.rank == k and all(d == 1 for d in snf.diag[:k])


def subgroup_index(group: FinAbGroup, elements: Sequence[Sequence[int]]) -> int | None:
    """Index of the generated subgroup; None when infinite."""
    k = group.ngens
    if k == 0:
        return 1
    cols = [tuple(e) for e in elements] + group.relation_columns()
    if not cols:
        return None
    snf = smith_normal_form(transpose(cols))
    if snf.rank < k:
        return None
    return reduce(lambda a, b: a * b, snf.diag[:k], 1)


def intersect_lattices(bases: Sequence[Sequence[Vector]], dim: int) -> list[Vector]:
    """Basis of the intersection of full-rank-or-not sublattices of Z^dim."""
    current = [tuple(v) for v in bases[0]]
    for other in bases[1:]:
        other = [tuple(v) for v in other]
        if not current or not other:
            return []
        # a.x = b.y  <=>  [A | -B] (x, y) = 0
        M = [
            [v[i] for v in current] + [-w[i] for w in other] for i in range(dim)
        ]
        ker = kernel_basis(M)
        current = [
            tuple(sum(z[j] * current[j][i] for j in range(len(current))) for i in range(dim))
            for z in ker
        ]
        current = lattice_basis(current, dim)
    return current


def lattice_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """A basis of the lattice generated by the given vectors (Hermite style)."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    snf = smith_normal_form(transpose(vecs, dim), len(vecs))
    # image of A = L^{-1} D; basis = columns of L^{-1} scaled by nonzero d_i
    Linv = unimodular_inverse(snf.left)
    return [
        tuple(Linv[i][j] * snf.diag[j] for i in range(dim)) for j in range(snf.rank)
    ]


def unimodular_inverse(U: Matrix) -> list[list[int]]:
    n = len(U)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    R, _ = rref(aug)
    inv = [[int(x) for x in row[n:]] for row in R]
    return inv
