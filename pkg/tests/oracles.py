"""Slow, independent reference computations used to cross-check the library."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import reduce
from math import gcd


def det(M):
    """Laplace expansion; fine for the tiny matrices used here."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum(
        (-1) ** j * M[0][j] * det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n)
    )


def minor_gcds(A):
    """d_k = gcd of all k x k minors, for k = 1..min(m, n)."""
    m, n = len(A), len(A[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, det([[A[i][j] for j in cols] for i in rows]))
        out.append(g)
    return out


def invariant_factors_by_minors(A):
    """Nonzero invariant factors d_k / d_{k-1}."""
    d = minor_gcds(A)
    out, prev = [], 1
    for x in d:
        if x == 0:
            break
        out.append(x // prev)
        prev = x
    return out


def fm_feasible(ineqs, nvars):
    """Fourier-Motzkin feasibility of {a.x + b >= 0} over Q (no witness)."""
    rows = [([Fraction(x) for x in a], Fraction(b)) for a, b in ineqs]
    for k in range(nvars):
        pos = [r for r in rows if r[0][k] > 0]
        neg = [r for r in rows if r[0][k] < 0]
        rest = [r for r in rows if r[0][k] == 0]
        for (ap, bp), (an, bn) in itertools.product(pos, neg):
            lp, ln = -an[k], ap[k]
            rest.append(([lp * x + ln * y for x, y in zip(ap, an)], lp * bp + ln * bn))
        rows = rest
    return all(b >= 0 for _, b in rows)


def grid_points(box, dim):
    return itertools.product(range(-box, box + 1), repeat=dim)


def in_cone_by_lp(x, gens):
    """Is x a nonnegative rational combination of gens? (tiny exact FM test)"""
    k = len(gens)
    if k == 0:
        return not any(x)
    ineqs = []
    for i in range(k):
        a = [0] * k
        a[i] = 1
        ineqs.append((a, 0))
    for j in range(len(x)):
        row = [g[j] for g in gens]
        ineqs.append((row, -x[j]))
        ineqs.append(([-c for c in row], x[j]))
    return fm_feasible(ineqs, k)


def brute_hilbert_basis(ineqs, dim, box):
    """Irreducible elements of {y : a.y >= 0} inside a box."""
    pts = [
        y for y in grid_points(box, dim)
        if any(y) and all(sum(a * b for a, b in zip(row, y)) >= 0 for row in ineqs)
    ]
    S = set(pts)
    irr = []
    for y in pts:
        if not any(
            z != y and tuple(a - b for a, b in zip(y, z)) in S for z in pts
        ):
            irr.append(y)
    return sorted(irr)


def cone_multiplicity_by_minors(rays):
    """Index of the lattice spanned by rays inside its saturation."""
    A = [list(r) for r in rays]
    f = invariant_factors_by_minors([list(c) for c in zip(*A)])
    return reduce(lambda a, b: a * b, f, 1)


def separated_by_limits(qp, box=3):
    """One-parameter subgroup test: every cocharacter has at most one limit orbit.

    Assumes every listed face is in the free locus, so coordinates of a
    cocharacter on a face are unique. Limits are found by brute force over
    nonnegative integer coordinates on each face.
    """
    for w in grid_points(box, qp.rank):
        limits = set()
        for f in qp.faces:
            idx = sorted(f)
            for c in itertools.product(range(0, 2 * box + 1), repeat=len(idx)):
                img = [sum(ci * qp.Q[i][j] for ci, i in zip(c, idx)) for j in range(qp.rank)]
                if tuple(img) == tuple(w):
                    limits.add(frozenset(i for ci, i in zip(c, idx) if ci > 0))
        if len(limits) > 1:
            return False
    return True


def rational_rank(rows):
    """Rank over Q by plain Gaussian elimination."""
    M = [[Fraction(x) for x in r] for r in rows]
    rk, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for i in range(len(M)):
            if i != rk and M[i][c] != 0:
                t = M[i][c] / M[rk][c]
                M[i] = [x - t * y for x, y in zip(M[i], M[rk])]
        rk += 1
    return rk


def cartier_data_dim(rays, max_cones, rank):
    """Dimension of the space of compatible local data (m_sigma) over Q.

    Unknowns are one vector m_sigma per maximal cone; each shared ray of two
    maximal cones gives one gluing equation. Principal data form a subspace
    of dimension ``rank``, so equality means the rational Picard group is 0.
    """
    cones = [tuple(c) for c in max_cones]
    nv = rank * len(cones)
    eqs = []
    for s, t in itertools.combinations(range(len(cones)), 2):
        for r in set(cones[s]) & set(cones[t]):
            row = [0] * nv
            for j in range(rank):
                row[s * rank + j] += rays[r][j]
                row[t * rank + j] -= rays[r][j]
            eqs.append(row)
    return nv - (rational_rank(eqs) if eqs else 0)
