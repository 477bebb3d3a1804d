import itertools

import pytest

from oracles import separated_by_limits
from toricemb import examples as ex
from toricemb.conoid import cox_presentation, quotient_presentation
from toricemb.embed import (
    VerificationFailure,
    artifact_from_dict,
    artifact_to_dict,
    build_embedding,
    free_locus,
    is_separated,
    limit_orbits,
    verify_closed_embedding,
)


def doubled_line():
    return quotient_presentation([[1], [1]], [[0], [1]])


def down_closed_families(faces):
    faces = sorted(faces, key=lambda s: (len(s), sorted(s)))
    for r in range(1, len(faces) + 1):
        for fam in itertools.combinations(faces, r):
            s = set(fam)
            if all(frozenset(g) in s for f in fam for k in range(len(f)) for g in itertools.combinations(sorted(f), k)):
                yield fam


def test_free_locus_p2():
    qp = cox_presentation(ex.p2()).quotient
    free = free_locus(qp)
    assert len(free) == 7 and frozenset({0, 1, 2}) not in free


def test_free_locus_weighted():
    qp = cox_presentation(ex.weighted_p112()).quotient
    free = set(free_locus(qp))
    assert frozenset({0, 2}) not in free
    assert frozenset({0, 1}) in free


def test_trivial_grading_everything_free():
    qp = quotient_presentation([[1, 0], [0, 1]], [[0, 1]])
    assert str(qp.group) == "0"
    assert len(free_locus(qp)) == 4


def test_free_locus_down_closed():
    for f in (ex.p2(), ex.weighted_p112(), ex.p1xp1(), ex.hirzebruch(2)):
        free = set(free_locus(cox_presentation(f).quotient))
        for F in free:
            for k in range(len(F)):
                for g in itertools.combinations(sorted(F), k):
                    assert frozenset(g) in free


def test_separatedness_examples():
    assert is_separated(cox_presentation(ex.p2()).quotient) == (True, None)
    ok, wit = is_separated(doubled_line())
    assert not ok and wit == (frozenset({0}), frozenset({1}))
    assert limit_orbits(doubled_line(), (1,)) == {frozenset({0}), frozenset({1})}
    assert is_separated(quotient_presentation([[1, 0], [0, 1]], [[0, 1]]))[0]


@pytest.mark.parametrize("name", ["p1", "p2", "p1xp1", "doubled"])
def test_separatedness_agrees_with_limits(name):
    qp = doubled_line() if name == "doubled" else cox_presentation(getattr(ex, name)()).quotient
    for fam in down_closed_families(free_locus(qp)):
        sub = qp.with_faces(fam)
        assert is_separated(sub)[0] == separated_by_limits(sub), fam


def test_embed_p1_is_identity():
    art = build_embedding(ex.p1(), 2, 2)
    qp = art.ambient
    assert qp.n == 2 and qp.degrees == ((1,), (1,))
    assert sorted(map(sorted, qp.faces)) == [[], [0], [1]]
    assert art.separated


def test_embed_weighted_plane_in_p3():
    art = build_embedding(ex.weighted_p112(), 2, 2)
    qp = art.ambient
    assert qp.n == 4 and qp.degrees == ((1,),) * 4
    assert set(qp.faces) == set(free_locus(qp))
    assert len(qp.maximal_faces) == 4
    assert art.separated
    # the singular chart has three semigroup generators, all lifted
    assert any(len(w) == 3 and art.charts[f] == (0, 2) for f, w in art.witnesses.items())


def test_embed_p2_smooth_input():
    art = build_embedding(ex.p2(), 2, 2)
    assert art.ambient.n == 3 and art.separated


def test_embed_random_simplicial():
    import random

    rng = random.Random(21)
    for _ in range(3):
        f = ex.random_simplicial_complete_fan(rng, max_rays=5)
        if f.rank > 2:
            continue
        art = build_embedding(f, 2, 3)
        assert set(art.ambient.faces) <= set(free_locus(art.ambient))
        assert art.separated


def test_artifact_round_trip_and_determinism():
    a = build_embedding(ex.weighted_p112(), 2, 2)
    b = build_embedding(ex.weighted_p112(), 2, 2)
    assert artifact_to_dict(a) == artifact_to_dict(b)
    again = artifact_from_dict(artifact_to_dict(a))
    assert verify_closed_embedding(again)[-1] == "closed embedding verified"


def test_deleted_chart_fails_verification():
    d = artifact_to_dict(build_embedding(ex.weighted_p112(), 2, 2))
    d["charts"] = d["charts"][1:]
    with pytest.raises(VerificationFailure):
        verify_closed_embedding(artifact_from_dict(d))


def test_tampered_witness_fails():
    d = artifact_to_dict(build_embedding(ex.p2(), 2, 2))
    h, e = d["charts"][0]["witnesses"][0]
    d["charts"][0]["witnesses"][0] = [h, [x + 1 for x in e]]
    with pytest.raises(VerificationFailure):
        verify_closed_embedding(artifact_from_dict(d))


def test_k3_requires_status():
    art = build_embedding(ex.p2(), 3, 2)
    assert art.note.startswith("lifted charts only")
    with pytest.raises(Exception):
        build_embedding(ex.nondivisorial3(), 2, 2)
