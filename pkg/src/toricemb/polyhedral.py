"""Exact rational polyhedral cones and an exact linear-feasibility kernel.

Cones are converted between generator and inequality descriptions with the
double description method (Motzkin's iteration, with an explicit lineality
space). The feasibility kernel is a dense two-phase simplex over
``Fraction`` with Bland's rule. No floating point is used anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .lattice import (
    Vector,
    clear_denominators,
    dot,
    invariant_factors,
    primitive,
    rank,
    rref,
    smith_normal_form,
    transpose,
)


class UnboundedError(ValueError):
    """A lattice-point enumeration was asked for on an unbounded region."""


# ---------------------------------------------------------------------------
# double description


def _scale(c, v):
    return tuple(c * x for x in v)


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _project_out(v: Vector, basis_rref: list[list[Fraction]], pivots: list[int]) -> Vector:
    """Canonical representative of v modulo span(basis): kill pivot coords."""
    w = [Fraction(x) for x in v]
    for row, p in zip(basis_rref, pivots):
        if w[p] != 0:
            f = w[p]
            w = [a - f * b for a, b in zip(w, row)]
    return primitive(clear_denominators(w))


def double_description(
    inequalities: Iterable[Sequence[int]], n: int
) -> tuple[list[Vector], list[Vector]]:
    """Generators of {x in Q^n : a.x >= 0 for every a}.

    Returns ``(lineality, rays)``: a basis of the lineality space and the
    extreme rays of the pointed part. Rays are reduced modulo the lineality
    space (pivot coordinates of its reduced echelon basis are zero) and
    primitive, which makes the representation canonical.
    """
    lin: list[Vector] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: list[Vector] = []
    done: list[Vector] = []
    for a in inequalities:
        a = primitive(tuple(a))
        if not any(a):
            continue
        done.append(a)
        k = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if k is not None:
            l = lin[k]
            al = dot(a, l)
            if al < 0:
                l, al = _scale(-1, l), -al
            lin = [
                primitive(_sub(_scale(al, m), _scale(dot(a, m), l)))
                for i, m in enumerate(lin)
                if i != k
            ]
            rays = [primitive(_sub(_scale(al, r), _scale(dot(a, r), l))) for r in rays]
            rays.append(primitive(l))
        else:
            pos = [r for r in rays if dot(a, r) > 0]
            zero = [r for r in rays if dot(a, r) == 0]
            neg = [r for r in rays if dot(a, r) < 0]
            new = []
            for p in pos:
                ap = dot(a, p)
                for q in neg:
                    aq = dot(a, q)
                    new.append(primitive(_sub(_scale(ap, q), _scale(aq, p))))
            rays = pos + zero + new
        rays = _filter_extreme(rays, done, lin, n)
    return lin, rays


def _filter_extreme(rays, constraints, lin, n):
    target = n - len(lin) - 1
    L, piv = rref(lin) if lin else ([], [])
    seen = {}
    for r in rays:
        if not any(r):
            continue
        tight = [a for a in constraints if dot(a, r) == 0]
        if rank(tight) != target:
            continue
        key = _project_out(r, L, piv)
        seen.setdefault(key, key)
    return sorted(seen)


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class RationalCone:
    """A rational polyhedral cone in Q^ambient_rank.

    Build instances with :func:`cone`; the stored generator tuple is then
    canonical (primitive, irredundant, lexicographically sorted), so
    structural equality is cone equality. For a cone with a lineality space
    the generators are +/- the primitive rows of the reduced echelon basis
    of that space, plus the extreme rays reduced modulo it.
    """

    ambient_rank: int
    generators: tuple[Vector, ...] = ()

    @cached_property
    def _hrep(self) -> tuple[list[Vector], list[Vector]]:
        return double_description(self.generators, self.ambient_rank)

    @cached_property
    def inequalities(self) -> tuple[Vector, ...]:
        """Normals u with cone = {x : u.x >= 0}."""
        lin, rays = self._hrep
        return tuple(rays) + tuple(lin) + tuple(_scale(-1, l) for l in lin)

    @cached_property
    def dim(self) -> int:
        return rank(self.generators) if self.generators else 0

    @cached_property
    def lineality_dim(self) -> int:
        return len(double_description(self.inequalities, self.ambient_rank)[0])

    @property
    def strongly_convex(self) -> bool:
        return self.lineality_dim == 0

    def contains(self, v: Sequence) -> bool:
        return all(dot(u, v) >= 0 for u in self.inequalities)

    def relative_interior_contains(self, v: Sequence) -> bool:
        """v lies in the cone but in no proper face."""
        if not self.contains(v):
            return False
        lin, rays = self._hrep
        return all(dot(u, v) > 0 for u in rays)

    def __repr__(self):
        return f"cone({', '.join(map(str, self.generators))})"


def _canonical_from_hrep(ineqs, n) -> RationalCone:
    lin, rays = double_description(ineqs, n)
    gens: list[Vector] = []
    if lin:
        L, _ = rref(lin)
        basis = [primitive(clear_denominators(row)) for row in L]
        gens += basis + [_scale(-1, b) for b in basis]
    gens += rays
    return RationalCone(n, tuple(sorted(set(gens))))


def cone(generators: Iterable[Sequence[int]], ambient_rank: int) -> RationalCone:
    """Canonical cone generated by the given integer vectors."""
    gens = [tuple(g) for g in generators]
    if ambient_rank < 1:
        raise ValueError("ambient rank must be positive")
    if any(len(g) != ambient_rank for g in gens):
        raise ValueError("generator of wrong length")
    lin, rays = double_description(gens, ambient_rank)
    ineqs = rays + lin + [_scale(-1, l) for l in lin]
    return _canonical_from_hrep(ineqs, ambient_rank)


def dual_cone(c: RationalCone) -> RationalCone:
    """{u : u.v >= 0 for all v in c}."""
    return _canonical_from_hrep(c.generators, c.ambient_rank)


def intersect(a: RationalCone, b: RationalCone) -> RationalCone:
    if a.ambient_rank != b.ambient_rank:
        raise ValueError("ambient ranks differ")
    return _canonical_from_hrep(a.inequalities + b.inequalities, a.ambient_rank)


def _face_closure(gens, normals) -> list[frozenset[int]]:
    found = {frozenset(range(len(gens)))}
    frontier = list(found)
    while frontier:
        nxt = []
        for F in frontier:
            for u in normals:
                G = frozenset(i for i in F if dot(u, gens[i]) == 0)
                if G not in found:
                    found.add(G)
                    nxt.append(G)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def faces(c: RationalCone) -> list[RationalCone]:
    """All faces of a strongly convex cone, from the zero cone up to c."""
    if not c.strongly_convex:
        raise ValueError(f"{c!r} is not strongly convex")
    gens = c.generators
    out = [
        RationalCone(c.ambient_rank, tuple(gens[i] for i in sorted(F)))
        for F in _face_closure(gens, c._hrep[1])
    ]
    return sorted(out, key=lambda f: (f.dim, f.generators))


def face_index_sets(gens: Sequence[Vector], ambient_rank: int) -> list[frozenset[int]]:
    """Faces of cone(gens) as subsets of generator indices.

    The generators must be exactly the extreme rays of a strongly convex cone.
    """
    return _face_closure([tuple(g) for g in gens], cone(gens, ambient_rank)._hrep[1])


@dataclass(frozen=True)
class ConeProperties:
    dim: int
    strongly_convex: bool
    simplicial: bool
    smooth: bool
    multiplicity: int | None


def cone_props(c: RationalCone) -> ConeProperties:
    sc = c.strongly_convex
    simplicial = sc and len(c.generators) == c.dim
    mult = None
    smooth = False
    if simplicial:
        if c.dim == 0:
            mult = 1
        else:
            factors = invariant_factors(transpose(c.generators))
            mult = 1
            for d in factors:
                mult *= d
        smooth = mult == 1
    return ConeProperties(c.dim, sc, simplicial, smooth, mult)


# ---------------------------------------------------------------------------
# lattice points and monoid generators


def _fm_step(rows: list[tuple[list[Fraction], Fraction]], k: int):
    """Eliminate variable k from rows a.x + b >= 0."""
    pos, neg, rest = [], [], []
    for a, b in rows:
        (pos if a[k] > 0 else neg if a[k] < 0 else rest).append((a, b))
    out = list(rest)
    for ap, bp in pos:
        for an, bn in neg:
            s, t = -an[k], ap[k]
            a = [s * x + t * y for x, y in zip(ap, an)]
            a[k] = Fraction(0)
            out.append((a, s * bp + t * bn))
    # drop exact duplicates after normalisation to keep growth in check
    uniq = {}
    for a, b in out:
        scale = next((abs(x) for x in a if x != 0), None)
        if scale is None:
            uniq[("const", b >= 0)] = (a, b)
            continue
        key = (tuple(x / scale for x in a), b / scale)
        uniq[key] = (a, b)
    return list(uniq.values())


def lattice_points(
    inequalities: Sequence[tuple[Sequence[int], int]],
    n: int,
    box: int | None = None,
) -> list[Vector]:
    """All x in Z^n with a.x + b >= 0 for each (a, b).

    Variables are bounded by Fourier-Motzkin projection; ``box`` adds the
    constraints |x_i| <= box. Raises UnboundedError if some coordinate has
    no finite bound.
    """
    rows = [([Fraction(x) for x in a], Fraction(b)) for a, b in inequalities]
    if box is not None:
        for i in range(n):
            e = [Fraction(int(i == j)) for j in range(n)]
            rows.append((e, Fraction(box)))
            rows.append(([-x for x in e], Fraction(box)))
    out: list[Vector] = []

    def rec(rows, prefix):
        i = len(prefix)
        if i == n:
            if all(b >= 0 for _, b in rows):
                out.append(tuple(prefix))
            return
        proj = rows
        for k in range(n - 1, i, -1):
            proj = _fm_step(proj, k)
        lo, hi = None, None
        for a, b in proj:
            if a[i] > 0:
                v = -b / a[i]
                lo = v if lo is None else max(lo, v)
            elif a[i] < 0:
                v = -b / a[i]
                hi = v if hi is None else min(hi, v)
            elif b < 0:
                return
        if lo is None or hi is None:
            raise UnboundedError(f"coordinate {i} is unbounded")
        lo_i = -((-lo.numerator) // lo.denominator)
        hi_i = hi.numerator // hi.denominator
        for x in range(lo_i, hi_i + 1):
            sub = []
            for a, b in rows:
                a2 = list(a)
                b2 = b + a2[i] * x
                a2[i] = Fraction(0)
                sub.append((a2, b2))
            rec(sub, prefix + [x])

    rec(rows, [])
    return sorted(out)


def _pointed_hilbert_basis(ineqs: Sequence[Vector], n: int) -> list[Vector]:
    """Hilbert basis of {y in Z^n : A y >= 0}, A of full column rank."""
    lin, rays = double_description(ineqs, n)
    assert not lin, "cone is not pointed"
    if not rays:
        return []
    lo = [sum(min(0, r[c]) for r in rays) for c in range(n)]
    hi = [sum(max(0, r[c]) for r in rays) for c in range(n)]

    def height(y):
        return sum(dot(a, y) for a in ineqs)

    cands = [
        y
        for y in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi)))
        if any(y) and all(dot(a, y) >= 0 for a in ineqs)
    ]
    cands.sort(key=lambda y: (height(y), y))
    basis: list[Vector] = []
    for y in cands:
        if not any(all(dot(a, _sub(y, h)) >= 0 for a in ineqs) for h in basis):
            basis.append(tuple(y))
    return sorted(basis)


def monoid_generators(ineqs: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Generators of the monoid {x in Z^n : a.x >= 0 for all a}.

    For a pointed cone this is its Hilbert basis. Otherwise the lattice of
    the lineality space is split off with a unimodular change of basis and
    the result is +/- a basis of that lattice together with lifts of the
    Hilbert basis of the pointed quotient.
    """
    ineqs = [tuple(a) for a in ineqs if any(a)]
    r = rank(ineqs) if ineqs else 0
    if r == n:
        return _pointed_hilbert_basis(ineqs, n)
    if r == 0:
        basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        return sorted(basis + [_scale(-1, b) for b in basis])
    snf = smith_normal_form(ineqs)
    R = snf.right
    cols = [tuple(R[i][j] for i in range(n)) for j in range(n)]
    reduced = [tuple(dot(a, cols[j]) for j in range(r)) for a in ineqs]
    pointed = _pointed_hilbert_basis(reduced, r)
    lifts = [tuple(sum(y[j] * cols[j][i] for j in range(r)) for i in range(n)) for y in pointed]
    lineality = cols[r:]
    return sorted(set(lifts + lineality + [_scale(-1, l) for l in lineality]))


# ---------------------------------------------------------------------------
# linear systems and the simplex kernel

AffineForm = tuple[Mapping[str, int], int]  # sum(c_v * v) + constant


@dataclass
class LinearSystem:
    """Constraints ``form = 0`` (equalities) and ``form >= 0`` (inequalities)."""

    variables: list[str] = field(default_factory=list)
    equalities: list[AffineForm] = field(default_factory=list)
    inequalities: list[AffineForm] = field(default_factory=list)

    def add_variable(self, name: str) -> str:
        if name not in self.variables:
            self.variables.append(name)
        return name

    def _check(self, form):
        coeffs, _ = form
        unknown = set(coeffs) - set(self.variables)
        if unknown:
            raise KeyError(f"unknown variables {sorted(unknown)}")

    def eq(self, coeffs: Mapping[str, int], constant: int = 0):
        self._check((coeffs, constant))
        self.equalities.append((dict(coeffs), constant))

    def ge(self, coeffs: Mapping[str, int], constant: int = 0):
        self._check((coeffs, constant))
        self.inequalities.append((dict(coeffs), constant))

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        def val(form):
            coeffs, c = form
            return sum(Fraction(a) * point[v] for v, a in coeffs.items()) + c

        return all(val(f) == 0 for f in self.equalities) and all(
            val(f) >= 0 for f in self.inequalities
        )


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    point: dict[str, Fraction] | None
    value: Fraction | None = None


def _pivot(T, r, c):
    p = T[r][c]
    T[r] = [x / p for x in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]


def _run_simplex(T, basis, cost, allowed):
    """Minimise cost.x over the tableau; Bland's rule. Returns False if unbounded."""
    m = len(T)
    while True:
        entering = None
        for j in allowed:
            if j in basis:
                continue
            red = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
            if red < 0:
                entering = j
                break
        if entering is None:
            return True
        best = None
        for i in range(m):
            if T[i][entering] > 0:
                ratio = T[i][-1] / T[i][entering]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        r = best[1]
        _pivot(T, r, entering)
        basis[r] = entering


def lp_solve(sys: LinearSystem, objective: Mapping[str, int] | None = None) -> LPResult:
    """Exact two-phase simplex: minimise ``objective`` subject to ``sys``.

    Variables are free; each is split as a difference of two nonnegative
    columns. With no objective this is a pure feasibility test.
    """
    names = list(sys.variables)
    idx = {v: i for i, v in enumerate(names)}
    nv = len(names)
    rows = []  # (coefficient row over free vars, rhs, slack sign or 0)
    for coeffs, c in sys.equalities:
        a = [Fraction(0)] * nv
        for v, x in coeffs.items():
            a[idx[v]] += x
        rows.append((a, Fraction(-c), 0))
    for coeffs, c in sys.inequalities:
        a = [Fraction(0)] * nv
        for v, x in coeffs.items():
            a[idx[v]] += x
        rows.append((a, Fraction(-c), -1))  # a.x - s = -c
    m = len(rows)
    nslack = sum(1 for r in rows if r[2])
    ncols = 2 * nv + nslack + m
    T = []
    s = 0
    for i, (a, b, sl) in enumerate(rows):
        row = a + [-x for x in a] + [Fraction(0)] * (nslack + m) + [b]
        if sl:
            row[2 * nv + s] = Fraction(sl)
            s += 1
        if b < 0:
            row = [-x for x in row]
        row[2 * nv + nslack + i] = Fraction(1)
        T.append(row)
    basis = [2 * nv + nslack + i for i in range(m)]
    art = set(basis)
    cost1 = [Fraction(0)] * (2 * nv + nslack) + [Fraction(1)] * m
    _run_simplex(T, basis, cost1, range(ncols))
    if sum(T[i][-1] for i in range(m) if basis[i] in art) != 0:
        return LPResult("infeasible", None)
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] in art:
            j = next((j for j in range(2 * nv + nslack) if T[i][j] != 0), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    real = range(2 * nv + nslack)
    status = "optimal"
    value = None
    if objective:
        cost2 = [Fraction(0)] * ncols
        for v, x in objective.items():
            cost2[idx[v]] += x
            cost2[nv + idx[v]] -= x
        if not _run_simplex(T, basis, cost2, real):
            status = "unbounded"
    x = [Fraction(0)] * ncols
    for i in range(m):
        x[basis[i]] = T[i][-1]
    point = {v: x[i] - x[nv + i] for i, v in enumerate(names)}
    if objective:
        value = sum(Fraction(c) * point[v] for v, c in objective.items())
    assert sys.satisfied_by(point)
    return LPResult(status, point, value)


def lp_feasible(sys: LinearSystem) -> dict[str, Fraction] | None:
    """A rational witness satisfying every constraint, or None if infeasible."""
    return lp_solve(sys).point
