"""Ample groups, section semigroups, affine conoids and quotient presentations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .divisor import (
    CartierData,
    Certificate,
    WeilDivisor,
    class_group,
    graded_cokernel,
    verify_certificate,
)
from .fan import Fan
from .lattice import (
    FinAbGroup,
    Vector,
    dot,
    intersect_lattices,
    kernel_basis,
    lattice_basis,
    matvec,
    rank,
    solve_integer,
    subgroup_index,
    transpose,
)
from .polyhedral import RationalCone, cone, monoid_generators

# ---------------------------------------------------------------------------
# quotient presentations


def _down_closure(faces: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    out = set()
    for f in faces:
        f = sorted(set(f))
        for k in range(len(f) + 1):
            out.update(frozenset(c) for c in combinations(f, k))
    return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))


@dataclass(frozen=True)
class QuotientPresentation:
    """Coordinates of K^n, their H-degrees, and a down-closed family of orthant faces.

    ``Q[i]`` is the image of e_i in the cocharacter lattice of the quotient
    torus. H is the kernel of Q; its character group ``group`` is
    Z^n / im(Q^T) and ``degrees[i]`` is the class of e_i there.
    """

    n: int
    rank: int
    Q: tuple[Vector, ...]
    group: FinAbGroup
    degrees: tuple[Vector, ...]
    faces: tuple[frozenset[int], ...]

    @property
    def maximal_faces(self) -> list[frozenset[int]]:
        return [f for f in self.faces if not any(f < g for g in self.faces)]

    def image_cone(self, face: Iterable[int]) -> RationalCone:
        return cone([self.Q[i] for i in sorted(face)], self.rank)

    def with_faces(self, faces: Iterable[Iterable[int]]) -> QuotientPresentation:
        return QuotientPresentation(
            self.n, self.rank, self.Q, self.group, self.degrees, _down_closure(faces)
        )


def quotient_presentation(Q: Sequence[Sequence[int]], faces: Iterable[Iterable[int]]) -> QuotientPresentation:
    """Presentation with grading derived from Q, so the degree sequence is exact."""
    Q = tuple(tuple(int(x) for x in row) for row in Q)
    n = len(Q)
    r = len(Q[0]) if Q else 0
    faces = _down_closure(faces)
    for f in faces:
        if any(not 0 <= i < n for i in f):
            raise ValueError(f"face {sorted(f)} refers to a missing coordinate")
    group, proj = graded_cokernel(Q) if r else (FinAbGroup(n), tuple(
        tuple(int(i == j) for j in range(n)) for i in range(n)))
    degrees = tuple(group.reduce(tuple(row[i] for row in proj)) for i in range(n))
    return QuotientPresentation(n, r, Q, group, degrees, faces)


def presentation_from_degrees(degrees: Sequence[Sequence[int]], faces) -> QuotientPresentation:
    """Presentation whose H has the given free-group weights on the coordinates."""
    n = len(degrees)
    cols = transpose([list(d) for d in degrees], len(degrees[0]) if degrees else 0)
    K = kernel_basis(cols, n) if cols else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    Q = [tuple(k[i] for k in K) for i in range(n)]
    return quotient_presentation(Q, faces)


def presentation_exact(qp: QuotientPresentation) -> bool:
    """Characters vanishing on H are exactly those pulled back along Q."""
    for j in range(qp.rank):
        img = [qp.Q[i][j] for i in range(qp.n)]
        deg = [0] * qp.group.ngens
        for i, c in enumerate(img):
            deg = [a + c * b for a, b in zip(deg, qp.degrees[i])]
        if any(qp.group.reduce(deg)):
            return False
    # index of im(Q^T) in the kernel of the degree map
    M = [
        [qp.degrees[i][k] for i in range(qp.n)] + [c[k] for c in qp.group.relation_columns()]
        for k in range(qp.group.ngens)
    ]
    ker = [z[: qp.n] for z in kernel_basis(M, qp.n + len(qp.group.torsion))] if M else [
        tuple(int(i == j) for j in range(qp.n)) for i in range(qp.n)
    ]
    ker = lattice_basis(ker, qp.n)
    img = lattice_basis([tuple(qp.Q[i][j] for i in range(qp.n)) for j in range(qp.rank)], qp.n)
    if len(ker) != len(img):
        return False
    cols = transpose(img, qp.n) if img else []
    return all(solve_integer(cols, v, len(img)) is not None for v in ker) if img else not ker


# ---------------------------------------------------------------------------
# conoid presentations


@dataclass(frozen=True)
class ConoidPresentation:
    """Generators of an affine conoid's coordinate semigroup with their degrees.

    ``generators`` are exponent vectors in an ambient lattice, ``degrees``
    their gradings, ``distinguished`` the sections f_i written as exponent
    vectors over the generators, and ``stabilizers`` maps a cone (as a tuple
    of indices) to the order of the isotropy group at its distinguished point
    (None when infinite).
    """

    generators: tuple[Vector, ...]
    degrees: tuple[Vector, ...]
    group: FinAbGroup
    distinguished: tuple[Vector, ...] = ()
    stabilizers: tuple[tuple[tuple[int, ...], int | None], ...] = ()
    irrelevant: tuple[tuple[int, ...], ...] = ()
    quotient: QuotientPresentation | None = None
    meta: tuple[tuple[str, str], ...] = ()

    @property
    def free(self) -> bool:
        return all(s == 1 for _, s in self.stabilizers)

    def stabilizer(self, c: Iterable[int]) -> int | None:
        return dict(self.stabilizers)[tuple(sorted(c))]


def cox_presentation(fan: Fan) -> ConoidPresentation:
    """One coordinate per ray, graded by the class group, with the lifted fan."""
    cg = class_group(fan)
    n = len(fan.rays)
    degrees = tuple(cg.ray_degrees)
    stab = []
    for c in fan.all_cones:
        omitted = [degrees[j] for j in range(n) if j not in c]
        stab.append((tuple(sorted(c)), subgroup_index(cg.group, omitted)))
    irrelevant = tuple(tuple(j for j in range(n) if j not in c) for c in fan.max_cones)
    qp = QuotientPresentation(
        n, fan.rank, fan.rays, cg.group, degrees, _down_closure(fan.max_cones)
    )
    gens = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return ConoidPresentation(
        gens, degrees, cg.group, gens, tuple(stab), irrelevant, qp
    )


def _isotropy(fan: Fan, gens, degrees, group) -> tuple:
    """Stabilizer order per cone for monomial generators over the Cox coordinates."""
    out = []
    for c in fan.all_cones:
        alive = [d for g, d in zip(gens, degrees) if not any(g[i] for i in c)]
        out.append((tuple(sorted(c)), subgroup_index(group, alive)))
    return tuple(out)


def finite_group_quotient(cp: ConoidPresentation, fan: Fan) -> ConoidPresentation:
    """Invariants of the finite group generated by the isotropy groups.

    A monomial is invariant iff its degree lies in every subgroup generated
    by the degrees of the coordinates not vanishing at some distinguished
    point. Characteristic zero is assumed so that invariants of the finite
    group describe the quotient.
    """
    gens = cp.generators
    n = len(gens[0])
    if cp.free:
        return cp
    P = _principal_images(fan)
    lattices = []
    for c in fan.max_cones:
        alive = [g for g in gens if not any(g[i] for i in c)]
        lattices.append(lattice_basis(list(alive) + P, n))
    B = intersect_lattices(lattices, n) if len(lattices) > 1 else lattices[0]
    # Hilbert basis of the orthant inside the lattice spanned by B
    ineqs = [tuple(b[i] for b in B) for i in range(n)]
    coords = monoid_generators(ineqs, len(B))
    new_gens = sorted(tuple(sum(y[j] * B[j][i] for j in range(len(B))) for i in range(n)) for y in coords)
    # grading: B-lattice modulo the principal sublattice
    Bcols = transpose(B, len(B))
    rel = [solve_integer(Bcols, p, len(B)) for p in P]
    group, proj = graded_cokernel([tuple(r[i] for r in rel) for i in range(len(B))])
    degrees = tuple(group.reduce(matvec(proj, solve_integer(Bcols, g, len(B)))) for g in new_gens)
    stab = _isotropy(fan, new_gens, degrees, group)
    return ConoidPresentation(
        tuple(new_gens), degrees, group, (), stab, (), None, (("characteristic", "0"),)
    )


def _principal_images(fan: Fan) -> list[Vector]:
    """div(chi^e_j) for the standard basis of M."""
    return [tuple(v[j] for v in fan.rays) for j in range(fan.rank)]


# ---------------------------------------------------------------------------
# ample groups and section semigroups


@dataclass(frozen=True)
class AmpleGroup:
    """A free group of Cartier classes carrying one section per certificate.

    ``basis[j]`` represents L_j. Certificate i (possibly a multiple of the
    input) equals a(lambdas[i]) + div(chi^units[i]), so its canonical section
    sits in the semigroup at (units[i], lambdas[i]).
    """

    fan: Fan
    basis: tuple[CartierData, ...]
    certificates: tuple[Certificate, ...]
    lambdas: tuple[Vector, ...]
    units: tuple[Vector, ...]
    basis_degrees: tuple[Vector, ...]
    policy: str

    @property
    def rank(self) -> int:
        return len(self.basis)

    def a(self, lam: Sequence[int]) -> Vector:
        """Weil coefficients of sum_j lam_j L_j."""
        n = len(self.fan.rays)
        return tuple(
            sum(l * L.divisor.coeffs[i] for l, L in zip(lam, self.basis)) for i in range(n)
        )

    def section(self, i: int) -> Vector:
        return tuple(self.units[i]) + tuple(self.lambdas[i])


def _scale_cert(c: Certificate, k: int) -> Certificate:
    if k == 1:
        return c
    D = WeilDivisor(c.cartier.divisor.fan, tuple(k * a for a in c.coeffs))
    return Certificate(c.cone, CartierData(D, tuple(tuple(k * x for x in m) for m in c.cartier.local)))


def _combine(fan: Fan, certs: Sequence[Certificate], coeffs: Sequence[int]) -> CartierData:
    n = len(fan.rays)
    a = tuple(sum(k * c.coeffs[i] for k, c in zip(coeffs, certs)) for i in range(n))
    local = tuple(
        tuple(sum(k * c.cartier.local[t][j] for k, c in zip(coeffs, certs)) for j in range(fan.rank))
        for t in range(len(fan.max_cones))
    )
    return CartierData(WeilDivisor(fan, a), local)


def build_ample_group(fan: Fan, certs: Sequence[Certificate], policy: str = "min_rank") -> AmpleGroup:
    """Ample group from divisoriality certificates.

    ``min_rank`` takes the lattice generated by the (torsion-free multiples
    of the) certificate classes, so certificates with equal classes share a
    basis element. ``per_cone`` keeps one free generator per certificate.
    """
    for c in certs:
        bad = verify_certificate(fan, c)
        if bad:
            raise ValueError(f"certificate for {list(c.cone)} does not verify: {bad[0]}")
    cg = class_group(fan)
    g = cg.group
    scaled = []
    for c in certs:
        d = cg.degree(c.coeffs)
        k = 1
        for t, m in zip(d[g.free_rank:], g.torsion):
            k = k * (m // gcd(t, m)) // gcd(k, m // gcd(t, m))
        scaled.append(_scale_cert(c, k))
    degs = [cg.degree(c.coeffs)[: g.free_rank] for c in scaled]
    if policy == "per_cone":
        basis_coeffs = [[int(i == j) for j in range(len(scaled))] for i in range(len(scaled))]
        lambdas = [tuple(int(i == j) for j in range(len(scaled))) for i in range(len(scaled))]
    elif policy == "min_rank":
        basis_vecs = _prefer_given_basis(degs, g.free_rank)
        cols = transpose(degs, len(degs))
        basis_coeffs = []
        for b in basis_vecs:
            if b in degs:
                k = degs.index(b)
                basis_coeffs.append([int(j == k) for j in range(len(degs))])
            else:
                basis_coeffs.append(list(solve_integer(cols, b, len(degs))))
        bcols = transpose(basis_vecs, len(basis_vecs))
        lambdas = [tuple(solve_integer(bcols, d, len(basis_vecs))) for d in degs]
    else:
        raise ValueError(f"unknown policy {policy!r}")
    basis = tuple(_combine(fan, scaled, co) for co in basis_coeffs)
    units = []
    for c, lam in zip(scaled, lambdas):
        a = tuple(
            sum(l * L.divisor.coeffs[i] for l, L in zip(lam, basis)) for i in range(len(fan.rays))
        )
        u = solve_integer([list(v) for v in fan.rays], [x - y for x, y in zip(c.coeffs, a)], fan.rank)
        assert u is not None, "certificate class not in the ample group"
        units.append(tuple(u))
    return AmpleGroup(
        fan,
        basis,
        tuple(scaled),
        tuple(lambdas),
        tuple(units),
        tuple(cg.degree(L.divisor.coeffs) for L in basis),
        policy,
    )


def _prefer_given_basis(vecs: list[Vector], dim: int) -> list[Vector]:
    """A basis of the lattice spanned by vecs, taken from vecs when possible."""
    full = lattice_basis(vecs, dim)
    chosen: list[Vector] = []
    for v in vecs:
        if v not in chosen and rank(chosen + [v]) > len(chosen):
            chosen.append(v)
    if len(chosen) == len(full):
        cols = transpose(chosen, len(chosen)) if chosen else []
        if all(solve_integer(cols, v, len(chosen)) is not None for v in vecs):
            return chosen
    return full


@dataclass(frozen=True)
class SectionSemigroup:
    """Monomials (u, lambda) with u(v_rho) + a(lambda)_rho >= 0 for every ray."""

    ample: AmpleGroup
    inequalities: tuple[Vector, ...]
    generators: tuple[Vector, ...]
    complete: bool
    bound: int

    def contains(self, x: Sequence[int]) -> bool:
        return all(dot(a, x) >= 0 for a in self.inequalities)

    def degree(self, x: Sequence[int]) -> Vector:
        return tuple(x[self.ample.fan.rank:])


def semigroup_inequalities(ag: AmpleGroup, rays: Iterable[int] | None = None) -> list[Vector]:
    fan = ag.fan
    idx = range(len(fan.rays)) if rays is None else rays
    return [tuple(fan.rays[i]) + tuple(L.divisor.coeffs[i] for L in ag.basis) for i in idx]


def section_semigroup(ag: AmpleGroup, bound: int) -> SectionSemigroup:
    """Generators with |lambda|_inf <= bound; complete when no generator exceeds it.

    The full Hilbert basis is computed exactly, so the completeness flag is
    a proof rather than a saturation heuristic.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    ineqs = semigroup_inequalities(ag)
    gens = monoid_generators(ineqs, ag.fan.rank + ag.rank)
    r0 = ag.fan.rank
    inside = [g for g in gens if max((abs(x) for x in g[r0:]), default=0) <= bound]
    gens_sorted = sorted(inside, key=lambda g: (tuple(g[r0:]), tuple(g[:r0])))
    return SectionSemigroup(ag, tuple(ineqs), tuple(gens_sorted), len(inside) == len(gens), bound)


def conoid_presentation(sg: SectionSemigroup) -> ConoidPresentation:
    ag = sg.ample
    r0 = ag.fan.rank
    degrees = tuple(tuple(g[r0:]) for g in sg.generators)
    dist = []
    for i in range(len(ag.certificates)):
        f = ag.section(i)
        dist.append(express(sg.generators, f) or ())
    free_group = FinAbGroup(ag.rank)
    return ConoidPresentation(
        sg.generators, degrees, free_group, tuple(dist), meta=(("policy", ag.policy),)
    )


def express(gens: Sequence[Vector], target: Sequence[int], limit: int = 8) -> Vector | None:
    """Nonnegative integer combination of gens equal to target (bounded search)."""
    target = tuple(target)
    if target in gens:
        i = gens.index(target)
        return tuple(int(j == i) for j in range(len(gens)))
    n = len(gens)

    def rec(j, rem, budget):
        if not any(rem):
            return [0] * (n - j)
        if j == n or budget == 0:
            return None
        g = gens[j]
        for k in range(budget, -1, -1):
            r = tuple(a - k * b for a, b in zip(rem, g))
            sub = rec(j + 1, r, budget - k)
            if sub is not None:
                return [k] + sub
        return None

    res = rec(0, target, limit)
    return tuple(res) if res is not None else None


def relations(cp: ConoidPresentation) -> list[tuple[Vector, Vector]]:
    """Binomial relations x^p = x^q spanning the lattice of relations among the generators."""
    n = len(cp.generators)
    cols = transpose(cp.generators, n)
    out = []
    for z in kernel_basis(cols, n):
        p = tuple(max(0, x) for x in z)
        q = tuple(max(0, -x) for x in z)
        out.append((p, q))
    return out


def localization_check(ag: AmpleGroup, i: int, search: int = 64) -> list[str]:
    """Compare the chart semigroup of certificate i with the localization at f_i.

    Returns the list of failures; empty means the generators are contained
    both ways.
    """
    fan = ag.fan
    cert = ag.certificates[i]
    d = fan.rank + ag.rank
    full = semigroup_inequalities(ag)
    chart = semigroup_inequalities(ag, cert.cone)
    f = ag.section(i)
    problems = []

    def in_full(x):
        return all(dot(a, x) >= 0 for a in full)

    def in_chart(x):
        return all(dot(a, x) >= 0 for a in chart)

    for g in monoid_generators(chart, d):
        if not any(in_full(tuple(a + k * b for a, b in zip(g, f))) for k in range(search + 1)):
            problems.append(f"chart generator {g} is not a fraction over f")
    for g in monoid_generators(full, d):
        if not in_chart(g):
            problems.append(f"global generator {g} is not regular on the chart")
    if not in_chart(tuple(-x for x in f)):
        problems.append("f is not invertible on the chart")
    return problems
