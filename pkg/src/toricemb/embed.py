"""Free loci, separatedness, and closed embeddings into smooth toric ambients."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .conoid import (
    AmpleGroup,
    QuotientPresentation,
    build_ample_group,
    presentation_exact,
    presentation_from_degrees,
    section_semigroup,
)
from .divisor import divisoriality_certificates, k_divisorial_status
from .fan import Fan, fan_from_dict, fan_to_dict
from .lattice import Vector, dot, generates, solve_integer, transpose
from .polyhedral import intersect, monoid_generators


class BoundExhausted(RuntimeError):
    """The section semigroup was not complete within the degree bound."""


class VerificationFailure(RuntimeError):
    def __init__(self, chart, message: str):
        super().__init__(f"chart {sorted(chart)}: {message}")
        self.chart = chart


def _lex(face: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(face))


def all_faces(n: int) -> list[frozenset[int]]:
    return [
        frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)
    ]


def is_free(qp: QuotientPresentation, face: Iterable[int]) -> bool:
    """H acts freely on the orbit of cone(e_i : i in face)."""
    face = set(face)
    return generates(qp.group, [qp.degrees[j] for j in range(qp.n) if j not in face])


def free_locus(qp: QuotientPresentation) -> list[frozenset[int]]:
    """All orthant faces (of K^n, not just listed ones) with a free H-action."""
    return sorted((f for f in all_faces(qp.n) if is_free(qp, f)), key=_lex)


class _PairCheck:
    """Cached image-cone test for pairs of orthant faces."""

    def __init__(self, qp: QuotientPresentation):
        self.qp = qp
        self.cones = {}
        self.pairs = {}

    def image(self, f):
        if f not in self.cones:
            self.cones[f] = self.qp.image_cone(f)
        return self.cones[f]

    def ok(self, a, b) -> bool:
        key = (a, b) if _lex(a) <= _lex(b) else (b, a)
        if key not in self.pairs:
            ca, cb = self.image(a), self.image(b)
            good = ca.strongly_convex and cb.strongly_convex
            good = good and intersect(ca, cb) == self.image(a & b)
            self.pairs[key] = good
        return self.pairs[key]


def is_separated(qp: QuotientPresentation, checker: _PairCheck | None = None):
    """(True, None) or (False, (face, face)) for the first failing pair.

    The quotient of the listed charts is separated iff every pair of image
    cones meets exactly in the image of the common face, and every image
    cone is strongly convex. When every face is free the images are smooth
    cones on which Q is injective, and pairs of maximal faces suffice; the
    full lexicographic scan then only runs to name a witness.
    """
    chk = checker or _PairCheck(qp)
    if all(is_free(qp, f) for f in qp.maximal_faces):
        tops = sorted(qp.maximal_faces, key=_lex)
        if all(chk.ok(a, b) for a, b in itertools.combinations(tops, 2)) and all(
            chk.image(a).strongly_convex for a in tops
        ):
            return True, None
    faces = sorted(qp.faces, key=_lex)
    for a, b in itertools.combinations(faces, 2):
        if not chk.ok(a, b):
            return False, (a, b)
    for a in faces:
        if not chk.image(a).strongly_convex:
            return False, (a, a)
    return True, None


def limit_orbits(qp: QuotientPresentation, w: Sequence[int]) -> set[frozenset[int]]:
    """Limit orbits of the one-parameter subgroup w in the listed charts.

    Only meaningful for faces in the free locus, where e_i (i in face) map
    to part of a lattice basis and the coordinates of w are unique.
    """
    out = set()
    for f in qp.faces:
        idx = sorted(f)
        if not idx:
            if not any(w):
                out.add(frozenset())
            continue
        cols = transpose([qp.Q[i] for i in idx], len(idx))
        c = solve_integer(cols, w, len(idx))
        if c is not None and all(x >= 0 for x in c):
            out.add(frozenset(i for i, x in zip(idx, c) if x > 0))
    return out


# ---------------------------------------------------------------------------
# embeddings


@dataclass
class EmbeddingArtifact:
    fan: Fan
    ambient: QuotientPresentation
    generators: tuple[Vector, ...]  # (u, lambda) per ambient coordinate
    charts: dict  # ambient face (sorted tuple) -> source cone (sorted tuple)
    witnesses: dict  # ambient face -> {source HB element: exponent vector}
    separated: bool
    transcript: list[str] = field(default_factory=list)
    note: str = ""


def vanishing_pattern(ag: AmpleGroup, gens, cone_rays) -> frozenset[int]:
    """Generators vanishing at the distinguished point of the cone."""
    d = ag.fan.rank
    out = set()
    for k, g in enumerate(gens):
        u, lam = g[:d], g[d:]
        a = ag.a(lam)
        if any(dot(u, ag.fan.rays[i]) + a[i] > 0 for i in cone_rays):
            out.add(k)
    return frozenset(out)


def _chart_source(fan: Fan, patterns: dict, face) -> tuple[int, ...] | None:
    """The cone tau with X meeting the ambient chart in U_tau, if it exists."""
    inside = [c for c in fan.all_cones if patterns[c] <= face]
    top = max(inside, key=len)
    if all(c <= top for c in inside) and {c for c in fan.all_cones if c <= top} == set(inside):
        return _lex(top)
    return None


def _lift(gens, face, target, search: int = 6) -> Vector | None:
    """e in Z^n with e_i >= 0 on face and sum e_i g_i = target."""
    n = len(gens)
    face = sorted(face)
    rest = [j for j in range(n) if j not in face]
    rest_cols = transpose([gens[j] for j in rest], len(rest)) if rest else None
    for total in range(search + 1):
        for e in _compositions(total, len(face)):
            r = list(target)
            for k, i in zip(e, face):
                r = [a - k * b for a, b in zip(r, gens[i])]
            if rest_cols is None:
                sol = () if not any(r) else None
            else:
                sol = solve_integer(rest_cols, r, len(rest))
            if sol is not None:
                out = [0] * n
                for k, i in zip(e, face):
                    out[i] = k
                for k, j in zip(sol, rest):
                    out[j] = k
                return tuple(out)
    return None


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def _check_chart(fan, gens, patterns, face):
    src = _chart_source(fan, patterns, face)
    if src is None:
        raise VerificationFailure(face, "image meets the chart in a non-affine set")
    hb = monoid_generators([fan.rays[i] for i in src], fan.rank)
    d = fan.rank
    lam0 = (0,) * (len(gens[0]) - d)
    wit = {}
    for h in hb:
        e = _lift(gens, face, tuple(h) + lam0)
        if e is None:
            raise VerificationFailure(face, f"semigroup element {tuple(h)} of cone {list(src)} is not a restriction")
        wit[tuple(h)] = e
    return src, wit


def build_embedding(fan: Fan, k: int = 2, bound: int = 2, policy: str = "min_rank") -> EmbeddingArtifact:
    """Closed embedding of X into a smooth toric ambient given as a quotient.

    Pipeline: divisoriality certificates, ample group, section semigroup,
    lifted charts, then greedy enlargement inside the free locus while the
    ambient stays separated and every chart still verifies (k = 2 only).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > 2:
        status = k_divisorial_status(fan, k)
        if status.status != "YES":
            raise ValueError(f"{k}-divisoriality not established ({status.reason})")
    log = []
    certs = divisoriality_certificates(fan)
    log.append(f"certificates: {len(certs)}")
    ag = build_ample_group(fan, certs, policy)
    log.append(f"ample group rank {ag.rank}, degrees {[list(d) for d in ag.basis_degrees]}")
    sg = section_semigroup(ag, bound)
    if not sg.complete:
        raise BoundExhausted(f"section semigroup has generators beyond degree bound {bound}")
    gens = sg.generators
    log.append(f"semigroup generators: {len(gens)}")
    patterns = {c: vanishing_pattern(ag, gens, c) for c in fan.all_cones}
    lifted = sorted({patterns[frozenset(c)] for c in fan.max_cones}, key=_lex)
    degs = [tuple(g[fan.rank:]) for g in gens]
    qp = presentation_from_degrees(degs, lifted)
    free = set(free_locus(qp))
    for f in lifted:
        if f not in free:
            raise VerificationFailure(f, "lifted chart is not in the free locus")
    chk = _PairCheck(qp)
    charts, wits = {}, {}
    for f in lifted:
        charts[_lex(f)], wits[_lex(f)] = _check_chart(fan, gens, patterns, f)
    if k == 2:
        # the family is separated and free; a new free face only has to be
        # compatible with the current maximal faces
        grown = True
        while grown:
            grown = False
            for f in sorted(free, key=_lex):
                if f in qp.faces:
                    continue
                tops = qp.maximal_faces
                if not chk.image(f).strongly_convex or not all(chk.ok(f, m) for m in tops):
                    continue
                try:
                    res = _check_chart(fan, gens, patterns, f)
                except VerificationFailure:
                    continue
                qp = qp.with_faces(list(tops) + [f])
                charts[_lex(f)], wits[_lex(f)] = res
                log.append(f"added face {list(_lex(f))}")
                grown = True
        note = "maximal among explored faces"
    else:
        note = "lifted charts only; enlargement is limited to k = 2"
    # drop charts that became non-maximal
    maximal = {_lex(f) for f in qp.maximal_faces}
    charts = {f: c for f, c in charts.items() if f in maximal}
    wits = {f: w for f, w in wits.items() if f in maximal}
    sep = is_separated(qp, chk)[0]
    art = EmbeddingArtifact(fan, qp, tuple(gens), charts, wits, sep, log, note)
    art.transcript.extend(verify_closed_embedding(art))
    return art


def verify_closed_embedding(art: EmbeddingArtifact) -> list[str]:
    """Re-check an artifact from its stored witnesses; raises VerificationFailure."""
    fan, qp, gens = art.fan, art.ambient, art.generators
    d = fan.rank
    out = []
    if not presentation_exact(qp):
        raise VerificationFailure(frozenset(), "ambient degree sequence is not exact")
    for f in qp.faces:
        if not is_free(qp, f):
            raise VerificationFailure(f, "face is not in the free locus")
    out.append(f"smooth: all {len(qp.faces)} faces free")
    for j in range(qp.rank):
        col = [qp.Q[i][j] for i in range(qp.n)]
        if any(sum(c * g[d + t] for c, g in zip(col, gens)) for t in range(len(gens[0]) - d)):
            raise VerificationFailure(frozenset(), "ambient torus characters have nonzero degree")
    max_faces = {_lex(f) for f in qp.maximal_faces}
    if set(art.charts) != max_faces:
        missing = sorted(max_faces - set(art.charts)) or sorted(set(art.charts) - max_faces)
        raise VerificationFailure(frozenset(missing[0]), "no chart record")
    covered = set()
    for face, src in sorted(art.charts.items()):
        hb = monoid_generators([fan.rays[i] for i in src], d)
        w = art.witnesses[face]
        for h in hb:
            e = w.get(tuple(h))
            if e is None:
                raise VerificationFailure(frozenset(face), f"missing semigroup element {tuple(h)}")
            if any(e[i] < 0 for i in face):
                raise VerificationFailure(frozenset(face), f"witness for {tuple(h)} is not regular")
            img = [sum(x * g[t] for x, g in zip(e, gens)) for t in range(len(gens[0]))]
            if tuple(img[:d]) != tuple(h) or any(img[d:]):
                raise VerificationFailure(frozenset(face), f"witness for {tuple(h)} maps elsewhere")
        covered.add(frozenset(src))
        out.append(f"chart {list(face)} -> cone {list(src)}: {len(hb)} generators lifted")
    for c in fan.max_cones:
        if frozenset(c) not in covered:
            raise VerificationFailure(frozenset(), f"cone {list(c)} is not covered by any chart")
    sep = is_separated(qp)[0]
    if sep != art.separated:
        raise VerificationFailure(frozenset(), "recorded separatedness flag is wrong")
    out.append(f"separated: {sep}")
    out.append("closed embedding verified")
    return out


# ---------------------------------------------------------------------------
# serialisation


def presentation_to_dict(qp: QuotientPresentation) -> dict:
    return {
        "n": qp.n,
        "Q": [list(r) for r in qp.Q],
        "faces": [list(_lex(f)) for f in qp.maximal_faces],
    }


def presentation_from_dict(d: dict) -> QuotientPresentation:
    from .conoid import quotient_presentation

    Q = d["Q"]
    if len(Q) != int(d["n"]):
        raise ValueError("Q must have one row per coordinate")
    return quotient_presentation(Q, d["faces"])


def artifact_to_dict(art: EmbeddingArtifact) -> dict:
    return {
        "kind": "embedding",
        "fan": fan_to_dict(art.fan),
        "ambient": presentation_to_dict(art.ambient),
        "generators": [list(g) for g in art.generators],
        "charts": [
            {
                "face": list(f),
                "cone": list(c),
                "witnesses": [[list(h), list(e)] for h, e in sorted(art.witnesses[f].items())],
            }
            for f, c in sorted(art.charts.items())
        ],
        "separated": art.separated,
        "note": art.note,
        "transcript": list(art.transcript),
    }


def artifact_from_dict(d: dict) -> EmbeddingArtifact:
    fan = fan_from_dict(d["fan"])
    qp = presentation_from_dict(d["ambient"])
    charts, wits = {}, {}
    for rec in d["charts"]:
        f = tuple(rec["face"])
        charts[f] = tuple(rec["cone"])
        wits[f] = {tuple(h): tuple(e) for h, e in rec["witnesses"]}
    return EmbeddingArtifact(
        fan,
        qp,
        tuple(tuple(g) for g in d["generators"]),
        charts,
        wits,
        bool(d["separated"]),
        list(d.get("transcript", [])),
        d.get("note", ""),
    )


def dumps_artifact(art: EmbeddingArtifact) -> str:
    return json.dumps(artifact_to_dict(art), indent=1) + "\n"
