"""Fans, their validity and global properties, and the orbit poset."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import Vector, primitive
from .polyhedral import (
    RationalCone,
    cone,
    cone_props,
    face_index_sets,
    intersect,
    monoid_generators,
)


class FanError(ValueError):
    """Malformed fan data (structure, not geometry)."""


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    cones: tuple[tuple[int, ...], ...] = ()

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Fan:
    """A fan stored by its maximal cones (ray-index tuples).

    Construct with :meth:`Fan.make`, which canonicalises the cone list.
    Faces are derived on demand and cached.
    """

    rank: int
    rays: tuple[Vector, ...]
    max_cones: tuple[tuple[int, ...], ...]

    @classmethod
    def make(cls, rank: int, rays: Iterable[Sequence[int]], max_cones: Iterable[Iterable[int]]) -> Fan:
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        cones = tuple(sorted(tuple(sorted(set(int(i) for i in c))) for c in max_cones))
        if rank < 1:
            raise FanError("rank must be positive")
        for i, r in enumerate(rays):
            if len(r) != rank:
                raise FanError(f"ray {i} has length {len(r)}, expected {rank}")
            if not any(r) or primitive(r) != r:
                raise FanError(f"ray {i} = {r} is not a primitive nonzero vector")
        if len(set(rays)) != len(rays):
            raise FanError("duplicate rays")
        used = set()
        for c in cones:
            for i in c:
                if not 0 <= i < len(rays):
                    raise FanError(f"cone {list(c)} refers to missing ray {i}")
            used.update(c)
        if used != set(range(len(rays))):
            missing = sorted(set(range(len(rays))) - used)
            raise FanError(f"rays {missing} occur in no maximal cone")
        for a, b in combinations(cones, 2):
            if set(a) <= set(b) or set(b) <= set(a):
                raise FanError(f"cone {list(a)} and cone {list(b)} are nested")
        if len(set(cones)) != len(cones):
            raise FanError("duplicate maximal cones")
        return cls(rank, rays, cones)

    def cone_of(self, idx: Iterable[int]) -> RationalCone:
        return cone([self.rays[i] for i in sorted(idx)], self.rank)

    @cached_property
    def all_cones(self) -> list[frozenset[int]]:
        """Every cone of the fan as a ray-index set, by dimension then index."""
        seen = set()
        for c in self.max_cones:
            gens = [self.rays[i] for i in c]
            for F in face_index_sets(gens, self.rank):
                seen.add(frozenset(c[i] for i in F))
        return sorted(seen, key=lambda s: (len(s), sorted(s)))

    @cached_property
    def dims(self) -> dict[frozenset[int], int]:
        return {s: self.cone_of(s).dim for s in self.all_cones}

    def __str__(self):
        return f"Fan(rank={self.rank}, rays={list(self.rays)}, max_cones={[list(c) for c in self.max_cones]})"


def validate_fan(f: Fan) -> Violation | None:
    """None when f is a genuine fan, otherwise the first violation found."""
    cones = {}
    for c in f.max_cones:
        C = f.cone_of(c)
        if not C.strongly_convex:
            return Violation("not-strongly-convex", f"cone {list(c)} contains a line", (c,))
        extreme = set(C.generators)
        for i in c:
            if f.rays[i] not in extreme:
                return Violation(
                    "redundant-ray", f"ray {i} is not extreme in cone {list(c)}", (c,)
                )
        cones[c] = C
    faces_of = {}
    for c in f.max_cones:
        faces_of[c] = {
            frozenset(c[i] for i in F) for F in face_index_sets([f.rays[i] for i in c], f.rank)
        }
    for a, b in combinations(f.max_cones, 2):
        common = frozenset(a) & frozenset(b)
        meet = intersect(cones[a], cones[b])
        if meet != f.cone_of(common) or common not in faces_of[a] or common not in faces_of[b]:
            return Violation(
                "bad-intersection",
                f"cone {list(a)} and cone {list(b)} meet in {meet!r}, "
                f"which is not their common face on rays {sorted(common)}",
                (a, b),
            )
    return None


def check_fan(f: Fan) -> Fan:
    v = validate_fan(f)
    if v is not None:
        raise FanError(str(v))
    return f


@dataclass(frozen=True)
class FanProperties:
    smooth: bool
    simplicial: bool
    complete: bool


def walls(f: Fan) -> dict[frozenset[int], list[tuple[int, ...]]]:
    """Codimension-one cones mapped to the full-dimensional maximal cones containing them."""
    out: dict[frozenset[int], list[tuple[int, ...]]] = {}
    for c in f.max_cones:
        if f.dims[frozenset(c)] != f.rank:
            continue
        for F in face_index_sets([f.rays[i] for i in c], f.rank):
            s = frozenset(c[i] for i in F)
            if f.dims[s] == f.rank - 1:
                out.setdefault(s, []).append(c)
    return out


def is_complete(f: Fan) -> bool:
    """Support is all of N_Q.

    Decided by walls: every maximal cone is full-dimensional, every wall lies
    in exactly two maximal cones, and the wall-adjacency graph is connected.
    """
    if any(f.dims[frozenset(c)] != f.rank for c in f.max_cones):
        return False
    W = walls(f)
    if not W or any(len(v) != 2 for v in W.values()):
        return False
    adj = {c: set() for c in f.max_cones}
    for a, b in W.values():
        adj[a].add(b)
        adj[b].add(a)
    start = f.max_cones[0]
    seen, stack = {start}, [start]
    while stack:
        for d in adj[stack.pop()] - seen:
            seen.add(d)
            stack.append(d)
    return len(seen) == len(f.max_cones)


def global_props(f: Fan) -> FanProperties:
    props = [cone_props(f.cone_of(c)) for c in f.max_cones]
    return FanProperties(
        smooth=all(p.smooth for p in props),
        simplicial=all(p.simplicial for p in props),
        complete=is_complete(f),
    )


@dataclass(frozen=True)
class OrbitPoset:
    """Cones of a fan ordered by inclusion; orbit closures are up-sets."""

    cones: tuple[frozenset[int], ...]
    dims: tuple[int, ...]
    covers: tuple[tuple[int, int], ...]  # (i, j): cone i is a facet of cone j

    def __len__(self):
        return len(self.cones)

    def closure(self, i: int) -> frozenset[int]:
        """Orbits in the closure of orbit i: cones containing cone i."""
        return frozenset(j for j, c in enumerate(self.cones) if self.cones[i] <= c)

    def index(self, c: Iterable[int]) -> int:
        return self.cones.index(frozenset(c))


def orbit_poset(f: Fan) -> OrbitPoset:
    cones = tuple(f.all_cones)
    dims = tuple(f.dims[c] for c in cones)
    covers = tuple(
        (i, j)
        for i, a in enumerate(cones)
        for j, b in enumerate(cones)
        if a < b and dims[j] == dims[i] + 1
    )
    return OrbitPoset(cones, dims, covers)


def invariant_charts(f: Fan) -> list[tuple[frozenset[int], list[Vector]]]:
    """For every cone, generators of the semigroup of its dual cone in M."""
    return [
        (c, monoid_generators([f.rays[i] for i in sorted(c)], f.rank)) for c in f.all_cones
    ]


# ---------------------------------------------------------------------------
# file format


def fan_to_dict(f: Fan) -> dict:
    return {"rank": f.rank, "rays": [list(r) for r in f.rays], "max_cones": [list(c) for c in f.max_cones]}


def _fmt(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in rows) + "]"


def serialize_fan(f: Fan) -> str:
    return (
        "{\n"
        f'  "rank": {f.rank},\n'
        f'  "rays": {_fmt(f.rays)},\n'
        f'  "max_cones": {_fmt(f.max_cones)}\n'
        "}\n"
    )


def fan_from_dict(d: dict) -> Fan:
    for key in ("rank", "rays", "max_cones"):
        if key not in d:
            raise FanError(f"missing field {key!r}")
    try:
        return Fan.make(int(d["rank"]), d["rays"], d["max_cones"])
    except (TypeError, ValueError) as e:
        if isinstance(e, FanError):
            raise
        raise FanError(f"bad field value: {e}") from e


def parse_fan(text: str) -> Fan:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FanError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(d, dict):
        raise FanError("line 1, column 1: expected an object")
    return fan_from_dict(d)
