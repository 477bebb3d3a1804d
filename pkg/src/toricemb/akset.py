"""Maximal open subsets with a chart-sharing property on finite orbit spaces.

Points are torus orbits and opens are unions of orbits closed under
generization. A subset Y is a U_k-subset for a family U of opens when any
k points of Y lie in a common member of U.

With the default family of invariant affine charts this is weaker than
asking for common affine neighbourhoods: the two fixed points of the
projective line share no invariant chart, although they share an affine
open set. Separatedness of toric objects is decided in ``embed`` instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .conoid import QuotientPresentation
from .fan import Fan, orbit_poset


@dataclass(frozen=True)
class FiniteSpace:
    """A finite T0 space given by point closures."""

    names: tuple[str, ...]
    closures: tuple[frozenset[int], ...]

    def __post_init__(self):
        for i, c in enumerate(self.closures):
            if i not in c:
                raise ValueError(f"closure of point {i} must contain it")
            for j in c:
                if not self.closures[j] <= c:
                    raise ValueError("closure operator is not transitive")

    @property
    def points(self) -> frozenset[int]:
        return frozenset(range(len(self.names)))

    def closure(self, S: Iterable[int]) -> frozenset[int]:
        out = set()
        for i in S:
            out |= self.closures[i]
        return frozenset(out)

    def is_open(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        return not self.closure(self.points - S) & S

    def open_sets(self) -> list[frozenset[int]]:
        """Every open set; exponential, for small spaces only."""
        pts = sorted(self.points)
        out = []
        for mask in range(1 << len(pts)):
            S = frozenset(p for b, p in enumerate(pts) if mask >> b & 1)
            if self.is_open(S):
                out.append(S)
        return out

    def star(self, i: int) -> frozenset[int]:
        """Smallest open set containing point i."""
        return frozenset(j for j in self.points if i in self.closures[j])


def fan_space(f: Fan) -> tuple[FiniteSpace, list[frozenset[int]]]:
    """Orbit space of a toric variety with its invariant affine charts."""
    P = orbit_poset(f)
    names = tuple("{" + ",".join(map(str, sorted(c))) + "}" for c in P.cones)
    space = FiniteSpace(names, tuple(P.closure(i) for i in range(len(P))))
    charts = [frozenset(j for j, d in enumerate(P.cones) if d <= frozenset(c)) for c in f.max_cones]
    return space, charts


def presentation_space(qp: QuotientPresentation) -> tuple[FiniteSpace, list[frozenset[int]]]:
    """Orbit space of the quotient of the listed charts (possibly non-separated)."""
    faces = sorted(qp.faces, key=lambda s: (len(s), sorted(s)))
    names = tuple("{" + ",".join(map(str, sorted(c))) + "}" for c in faces)
    closures = tuple(frozenset(j for j, g in enumerate(faces) if f <= g) for f in faces)
    space = FiniteSpace(names, closures)
    charts = [
        frozenset(j for j, g in enumerate(faces) if g <= m) for m in qp.maximal_faces
    ]
    return space, charts


def _bad_tuples(space: FiniteSpace, family: Sequence[frozenset[int]], k: int):
    pts = sorted(space.points)
    for t in itertools.product(pts, repeat=k):
        s = set(t)
        if not any(s <= U for U in family):
            yield t


def complement_components(space: FiniteSpace, family: Sequence[frozenset[int]], k: int) -> list[tuple[int, ...]]:
    """Generic k-tuples of the irreducible components of X^k minus the union of U^k."""
    if k < 1:
        raise ValueError("k must be positive")
    A = list(_bad_tuples(space, family, k))
    Aset = set(A)

    def below(s, t):  # t lies in the closure of s
        return all(b in space.closures[a] for a, b in zip(s, t))

    comps = [t for t in A if not any(s != t and below(s, t) for s in Aset)]
    return sorted(comps)


def xy_operator(space: FiniteSpace, components: Sequence[tuple[int, ...]], Y: Iterable[int]) -> frozenset[int]:
    """Remove the closures of the component projections that miss Y."""
    Y = frozenset(Y)
    removed = set()
    for t in components:
        for p in t:
            cl = space.closures[p]
            if not cl & Y:
                removed |= cl
    return space.points - frozenset(removed)


def is_uk(Y: Iterable[int], family: Sequence[frozenset[int]], k: int) -> bool:
    Y = sorted(set(Y))
    return all(
        any(set(t) <= U for U in family) for t in itertools.combinations_with_replacement(Y, k)
    )


@dataclass(frozen=True)
class AkAnalysis:
    k: int
    components: tuple[tuple[int, ...], ...]
    values: tuple[frozenset[int], ...]  # distinct X(Y) candidates examined
    maximal: tuple[frozenset[int], ...]


def _encode(S: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(S))


def maximal_uk_subsets(space: FiniteSpace, family: Sequence[frozenset[int]], k: int) -> list[frozenset[int]]:
    return list(analyse(space, family, k).maximal)


def analyse(space: FiniteSpace, family: Sequence[frozenset[int]], k: int) -> AkAnalysis:
    """Components, candidate values X(Y), and the maximal open U_k-subsets.

    X(Y) only depends on which component projections Y meets. For open Y
    that is the set of projection points lying in Y, so the candidates are
    X minus the closure of any subset of projection points.
    """
    comps = complement_components(space, family, k)
    marks = sorted({p for t in comps for p in t})
    values = set()
    for r in range(len(marks) + 1):
        for W in itertools.combinations(marks, r):
            values.add(space.points - space.closure(W))
    values = sorted(values, key=lambda s: (-len(s), _encode(s)))
    good = [V for V in values if is_uk(V, family, k)]
    maximal = [V for V in good if not any(V < W for W in good)]
    return AkAnalysis(k, tuple(comps), tuple(values), tuple(sorted(maximal, key=_encode)))


# brute force references


def brute_force_maximal(space: FiniteSpace, family: Sequence[frozenset[int]], k: int) -> list[frozenset[int]]:
    good = [Y for Y in space.open_sets() if is_uk(Y, family, k)]
    return sorted((Y for Y in good if not any(Y < Z for Z in good)), key=_encode)
