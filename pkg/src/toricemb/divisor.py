"""Invariant divisors, the class group, sections, and divisoriality."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fan import Fan, global_props
from .lattice import (
    FinAbGroup,
    clear_denominators,
    rref,
    cokernel,
    Vector,
    dot,
    kernel_basis,
    lattice_basis,
    matvec,
    rank,
    solve_integer,
    transpose,
)
from .polyhedral import LinearSystem, UnboundedError, lattice_points, lp_solve


class SpanError(ValueError):
    """The rays of the fan do not span N_Q."""


class NotCartier(ValueError):
    def __init__(self, cone: tuple[int, ...]):
        super().__init__(f"no integral local equation on cone {list(cone)}")
        self.cone = cone


class NotDivisorial(ValueError):
    def __init__(self, cone: tuple[int, ...]):
        super().__init__(f"no effective Cartier divisor cuts out the chart of cone {list(cone)}")
        self.cone = cone


def jobs() -> int:
    """Parallelism level from the TORICEMB_JOBS environment variable."""
    try:
        return max(1, int(os.environ.get("TORICEMB_JOBS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# class group


@dataclass(frozen=True)
class ClassGroup:
    fan: Fan
    group: FinAbGroup
    degree_map: tuple[tuple[int, ...], ...]  # group coordinates x rays

    def degree(self, coeffs: Sequence[int]) -> Vector:
        return self.group.reduce(matvec(self.degree_map, coeffs))

    @property
    def ray_degrees(self) -> list[Vector]:
        n = len(self.fan.rays)
        return [self.degree([int(i == j) for j in range(n)]) for i in range(n)]


def principal_divisor(fan: Fan, u: Sequence[int]) -> Vector:
    """Coefficients of div(chi^u)."""
    return tuple(dot(u, v) for v in fan.rays)


def graded_cokernel(rows: Sequence[Sequence[int]]) -> tuple[FinAbGroup, tuple[tuple[int, ...], ...]]:
    """Cokernel of u -> (r.u)_r, with each free coordinate sign-normalised.

    The first nonzero degree in every free coordinate is made positive so
    that, e.g., projective space gets degrees (1, ..., 1).
    """
    coker = cokernel([list(v) for v in rows])
    proj = [list(r) for r in coker.projection]
    for k in range(coker.group.free_rank):
        first = next((x for x in proj[k] if x != 0), 0)
        if first < 0:
            proj[k] = [-x for x in proj[k]]
    return coker.group, tuple(map(tuple, proj))


def class_group(fan: Fan) -> ClassGroup:
    if rank(fan.rays) < fan.rank:
        raise SpanError("rays do not span N_Q")
    group, proj = graded_cokernel(fan.rays)
    return ClassGroup(fan, group, proj)


def exact_sequence_ok(cg: ClassGroup) -> bool:
    """0 -> M -> Z^rays -> Cl -> 0 is exact in the middle (and the composite vanishes)."""
    fan = cg.fan
    n = len(fan.rays)
    for j in range(fan.rank):
        u = [int(i == j) for i in range(fan.rank)]
        if any(cg.degree(principal_divisor(fan, u))):
            return False
    # kernel of the degree map, computed with the torsion relations adjoined
    g = cg.group
    M = [list(cg.degree_map[k]) + [c[k] for c in g.relation_columns()] for k in range(g.ngens)]
    if g.ngens:
        ker = [tuple(z[:n]) for z in kernel_basis(M)]
    else:
        ker = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    image = lattice_basis([principal_divisor(fan, e) for e in _basis(fan.rank)], n)
    ker = lattice_basis(ker, n)
    cols_img = transpose(image, len(image)) if image else []
    for v in ker:
        if not image or solve_integer(cols_img, v, len(image)) is None:
            return False
    return len(ker) == len(image)


def _basis(n):
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


# ---------------------------------------------------------------------------
# divisors


@dataclass(frozen=True)
class WeilDivisor:
    fan: Fan
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.fan.rays):
            raise ValueError("coefficient list length must equal the ray count")

    def __add__(self, other: WeilDivisor) -> WeilDivisor:
        return WeilDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, c: int) -> WeilDivisor:
        return WeilDivisor(self.fan, tuple(c * a for a in self.coeffs))

    @property
    def effective(self) -> bool:
        return all(a >= 0 for a in self.coeffs)


@dataclass(frozen=True)
class CartierData:
    """A Weil divisor with local functionals m_sigma, m_sigma(v_rho) = -a_rho."""

    divisor: WeilDivisor
    local: tuple[Vector, ...]  # one per maximal cone, in fan.max_cones order

    def check(self) -> list[str]:
        fan = self.divisor.fan
        bad = []
        for c, m in zip(fan.max_cones, self.local):
            for i in c:
                if dot(m, fan.rays[i]) != -self.divisor.coeffs[i]:
                    bad.append(f"m on cone {list(c)} disagrees with a_{i}")
        return bad


def cartier_data(D: WeilDivisor) -> CartierData:
    """Local equations of D on every maximal cone; raises NotCartier."""
    fan = D.fan
    local = []
    for c in fan.max_cones:
        A = [list(fan.rays[i]) for i in c]
        m = solve_integer(A, [-D.coeffs[i] for i in c], fan.rank)
        if m is None:
            raise NotCartier(c)
        local.append(tuple(m))
    return CartierData(D, tuple(local))


def is_cartier(D: WeilDivisor) -> bool:
    try:
        cartier_data(D)
    except NotCartier:
        return False
    return True


def picard_rank(fan: Fan) -> int:
    """Rank of Pic(X): rank of the invariant Cartier lattice minus rank M.

    Computed from the integer kernel of the gluing conditions on the local
    functionals, independently of any feasibility search.
    """
    nc = len(fan.max_cones)
    r = fan.rank
    rows = []
    for i, v in enumerate(fan.rays):
        owners = [t for t, c in enumerate(fan.max_cones) if i in c]
        for s, t in zip(owners, owners[1:]):
            row = [0] * (nc * r)
            for j in range(r):
                row[s * r + j] += v[j]
                row[t * r + j] -= v[j]
            rows.append(row)
    dim = len(kernel_basis(rows, nc * r)) if rows else nc * r
    return dim - r


@dataclass(frozen=True)
class SectionPolytope:
    divisor: WeilDivisor
    points: tuple[Vector, ...]


def global_sections(D: WeilDivisor, bound: int | None = None) -> SectionPolytope:
    """Lattice points u with u(v_rho) >= -a_rho, i.e. monomial sections of O(D)."""
    fan = D.fan
    ineqs = [(v, a) for v, a in zip(fan.rays, D.coeffs)]
    try:
        pts = lattice_points(ineqs, fan.rank, box=bound)
    except UnboundedError as e:
        raise UnboundedError(f"section polytope is unbounded; supply a bound ({e})") from None
    return SectionPolytope(D, tuple(pts))


# ---------------------------------------------------------------------------
# divisoriality


@dataclass(frozen=True)
class Certificate:
    """An effective Cartier divisor whose support misses exactly the chart of ``cone``."""

    cone: tuple[int, ...]
    cartier: CartierData

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.cartier.divisor.coeffs


def verify_certificate(fan: Fan, cert: Certificate) -> list[str]:
    """Problems with a certificate; empty when it re-verifies."""
    problems = []
    a = cert.coeffs
    if cert.cone not in fan.max_cones:
        problems.append(f"{list(cert.cone)} is not a maximal cone")
    if len(a) != len(fan.rays):
        return problems + ["wrong coefficient count"]
    if len(cert.cartier.local) != len(fan.max_cones):
        return problems + ["wrong number of local functionals"]
    if any(x < 0 for x in a):
        problems.append("divisor is not effective")
    for i in range(len(fan.rays)):
        if i in cert.cone and a[i] != 0:
            problems.append(f"a_{i} must vanish on the target cone")
        if i not in cert.cone and a[i] < 1:
            problems.append(f"a_{i} must be positive off the target cone")
    problems += cert.cartier.check()
    return problems


@lru_cache(maxsize=64)
def _gluing_space(fan: Fan) -> tuple[tuple[int, ...], ...]:
    """Integer basis (over Q) of compatible families (m_tau) of local functionals.

    A family is compatible when m_s(v_rho) = m_t(v_rho) for every ray shared
    by maximal cones s and t. Found as a rational nullspace, each vector then
    scaled to be integral.
    """
    nc, r = len(fan.max_cones), fan.rank
    rows = []
    for i, v in enumerate(fan.rays):
        owners = [t for t, c in enumerate(fan.max_cones) if i in c]
        for s, t in zip(owners, owners[1:]):
            row = [0] * (nc * r)
            for j in range(r):
                row[s * r + j] += v[j]
                row[t * r + j] -= v[j]
            rows.append(row)
    if not rows:
        return tuple(tuple(int(i == j) for j in range(nc * r)) for i in range(nc * r))
    R, pivots = rref(rows)
    free = [j for j in range(nc * r) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * (nc * r)
        x[f] = Fraction(1)
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        basis.append(clear_denominators(x))
    return tuple(basis)


def _ray_owner(fan: Fan, i: int) -> int:
    return next(t for t, c in enumerate(fan.max_cones) if i in c)


def _divisoriality_system(fan: Fan, sigma: tuple[int, ...]):
    """LP over coefficients c of the gluing space; a_rho(c) is linear in c."""
    basis = _gluing_space(fan)
    r = fan.rank
    sys = LinearSystem()
    names = [sys.add_variable(f"c{k}") for k in range(len(basis))]
    objective: dict[str, int] = {}
    for i, v in enumerate(fan.rays):
        t = _ray_owner(fan, i)
        # a_rho = -m_t(v_rho)
        form = {}
        for name, b in zip(names, basis):
            x = -sum(b[t * r + j] * v[j] for j in range(r))
            if x:
                form[name] = x
        if i in sigma:
            sys.eq(form)
        else:
            sys.ge(form, -1)
            for k, x in form.items():
                objective[k] = objective.get(k, 0) + x
    return sys, objective


def _certificate_for(fan: Fan, sigma: tuple[int, ...]) -> Certificate | None:
    sys, objective = _divisoriality_system(fan, sigma)
    res = lp_solve(sys, objective or None)
    if res.point is None:
        return None
    basis = _gluing_space(fan)
    r = fan.rank
    c = [res.point[f"c{k}"] for k in range(len(basis))]
    # The constraints are a_rho = 0 on sigma's rays and a_rho >= 1 elsewhere,
    # with a linear in c and the gluing built into the basis. Scaling c by a
    # positive integer keeps the equalities and only strengthens a_rho >= 1,
    # so clearing denominators yields an integral certificate.
    c = clear_denominators(c) if any(c) else tuple(0 for _ in c)
    flat = [sum(ck * b[j] for ck, b in zip(c, basis)) for j in range(len(fan.max_cones) * r)]
    local = tuple(tuple(flat[t * r:(t + 1) * r]) for t in range(len(fan.max_cones)))
    a = tuple(-dot(local[_ray_owner(fan, i)], v) for i, v in enumerate(fan.rays))
    return Certificate(sigma, CartierData(WeilDivisor(fan, a), local))


def divisoriality_certificates(fan: Fan) -> list[Certificate]:
    """One certificate per maximal cone; raises NotDivisorial on the first failure."""
    cones = list(fan.max_cones)
    n = jobs()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            certs = list(pool.map(lambda c: _certificate_for(fan, c), cones))
    else:
        certs = [_certificate_for(fan, c) for c in cones]
    for c, cert in zip(cones, certs):
        if cert is None:
            raise NotDivisorial(c)
    return certs


def is_divisorial(fan: Fan) -> bool:
    try:
        divisoriality_certificates(fan)
    except NotDivisorial:
        return False
    return True


# ---------------------------------------------------------------------------
# k-divisoriality


@dataclass(frozen=True)
class KDivisorialStatus:
    status: str  # "YES", "NO", "UNKNOWN"
    k: int
    reason: str
    certificates: tuple[Certificate, ...] = ()
    ample: CartierData | None = None
    witness: tuple[int, ...] | None = None

    def section_for(self, cones: Sequence[tuple[int, ...]]) -> list[Vector]:
        """Monomials of a section of the ample divisor nonvanishing at the given fixed points.

        The sum of the vertex monomials chi^{m_sigma} does not vanish at the
        distinguished point of any listed cone, and its complement is affine
        because the divisor is ample.
        """
        if self.ample is None:
            raise ValueError("no ample certificate")
        fan = self.ample.divisor.fan
        return sorted({self.ample.local[fan.max_cones.index(c)] for c in cones})


def is_ample(cd: CartierData) -> bool:
    """Strict convexity of the support function over full-dimensional maximal cones."""
    fan = cd.divisor.fan
    a = cd.divisor.coeffs
    if any(fan.dims[frozenset(c)] != fan.rank for c in fan.max_cones):
        return False
    for c, m in zip(fan.max_cones, cd.local):
        for i, v in enumerate(fan.rays):
            if i not in c and dot(m, v) <= -a[i]:
                return False
    return True


def find_ample(fan: Fan, coeff_bound: int = 3) -> CartierData | None:
    """Bounded search for an ample invariant Cartier divisor.

    Any ample divisor can be translated by a principal divisor to vanish on
    the rays of the first maximal cone and be positive elsewhere, so only
    those coefficient vectors are searched.
    """
    sigma0 = fan.max_cones[0]
    others = [i for i in range(len(fan.rays)) if i not in sigma0]
    for total in range(len(others), coeff_bound * len(others) + 1):
        for vals in itertools.product(range(1, coeff_bound + 1), repeat=len(others)):
            if sum(vals) != total:
                continue
            a = [0] * len(fan.rays)
            for i, x in zip(others, vals):
                a[i] = x
            try:
                cd = cartier_data(WeilDivisor(fan, tuple(a)))
            except NotCartier:
                continue
            if is_ample(cd):
                return cd
    return None


def k_divisorial_status(fan: Fan, k: int, coeff_bound: int = 3) -> KDivisorialStatus:
    """Exact for k = 1 and for simplicial fans at k = 2; a bounded search otherwise."""
    if k < 1:
        raise ValueError("k must be positive")
    try:
        certs = tuple(divisoriality_certificates(fan))
    except NotDivisorial as e:
        return KDivisorialStatus("NO", k, "not divisorial", witness=e.cone)
    if k == 1:
        return KDivisorialStatus("YES", 1, "divisoriality certificates", certs)
    if k == 2 and global_props(fan).simplicial:
        return KDivisorialStatus("YES", 2, "simplicial", certs)
    D = find_ample(fan, coeff_bound)
    if D is not None:
        return KDivisorialStatus("YES", k, "ample divisor", certs, ample=D)
    return KDivisorialStatus("UNKNOWN", k, f"no ample divisor with coefficients <= {coeff_bound}", certs)


# ---------------------------------------------------------------------------
# serialisation


def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "cone": list(cert.cone),
        "coefficients": list(cert.coeffs),
        "local": [list(m) for m in cert.cartier.local],
    }


def certificate_from_dict(fan: Fan, d: dict) -> Certificate:
    D = WeilDivisor(fan, tuple(int(x) for x in d["coefficients"]))
    return Certificate(
        tuple(int(i) for i in d["cone"]),
        CartierData(D, tuple(tuple(int(x) for x in m) for m in d["local"])),
    )
