"""Command-line interface: ``toricemb <command> <input> [options]``.

Inputs are file paths or corpus names (``p2``, ``wp112``, ``hirzebruch_3``, ...).
Exit codes: 0 success or YES, 1 NO or a violation, 2 UNKNOWN or bound
exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from importlib import resources
from pathlib import Path

from . import akset, conoid, divisor, embed
from .examples import hirzebruch
from .fan import Fan, FanError, fan_from_dict, fan_to_dict, global_props, orbit_poset, validate_fan

OK, NO, UNKNOWN, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


def corpus_names() -> list[str]:
    root = resources.files("toricemb") / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json") and p.name != "manifest.json")


def corpus_text(name: str) -> str | None:
    p = resources.files("toricemb") / "corpus" / f"{name}.json"
    return p.read_text() if p.is_file() else None


def load(source: str):
    """A Fan or a QuotientPresentation from a path or corpus name."""
    path = Path(source)
    if path.is_file():
        text, label = path.read_text(), str(path)
    else:
        text, label = corpus_text(source), source
        if text is None:
            m = re.fullmatch(r"hirzebruch_(\d+)", source)
            if m:
                return hirzebruch(int(m.group(1)))
            raise InputError(f"{source}: no such file or corpus entry")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{label}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(d, dict):
        raise InputError(f"{label}: line 1, column 1: expected an object")
    try:
        if "Q" in d:
            return embed.presentation_from_dict(d)
        return fan_from_dict(d)
    except (FanError, ValueError, TypeError, KeyError) as e:
        raise InputError(f"{label}: {e}") from None


def load_fan(source: str) -> Fan:
    obj = load(source)
    if not isinstance(obj, Fan):
        raise InputError(f"{source}: expected a fan, got a presentation")
    v = validate_fan(obj)
    if v is not None:
        raise InputError(f"{source}: invalid fan: {v}")
    return obj


# ---------------------------------------------------------------------------
# reports


class Report:
    def __init__(self, command: str, target: str, seed: int):
        self.fields: list[tuple[str, object]] = [
            ("command", command), ("input", target), ("seed", seed)
        ]

    def add(self, key: str, value):
        self.fields.append((key, value))

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(dict(self.fields), indent=1, default=_plain) + "\n"
        head = self.fields[:3]
        lines = [f"# toricemb {head[0][1]} {head[1][1]} seed={head[2][1]}"]
        for k, v in self.fields[3:]:
            if isinstance(v, list) and v and isinstance(v[0], (list, dict, str)):
                lines.append(f"{k}:")
                lines.extend(f"  {_human(x)}" for x in v)
            else:
                lines.append(f"{k}: {_human(v)}")
        return "\n".join(lines) + "\n"


def _plain(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return str(x)


def _human(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, dict):
        return ", ".join(f"{k}={_human(x)}" for k, x in v.items())
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    return str(v)


def _faces(fs) -> list:
    return [sorted(f) for f in fs]


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, rep: Report) -> int:
    obj = load(args.input)
    if isinstance(obj, Fan):
        v = validate_fan(obj)
        if v is not None:
            rep.add("valid", False)
            rep.add("violation", v.kind)
            rep.add("witness", [list(c) for c in v.cones])
            rep.add("message", v.message)
            return NO
        p = global_props(obj)
        rep.add("valid", True)
        rep.add("rank", obj.rank)
        rep.add("rays", len(obj.rays))
        rep.add("smooth", p.smooth)
        rep.add("simplicial", p.simplicial)
        rep.add("complete", p.complete)
        rep.add("orbits", len(orbit_poset(obj)))
        return OK
    qp = obj
    free = set(embed.free_locus(qp))
    nonfree = [sorted(f) for f in qp.faces if f not in free]
    rep.add("coordinates", qp.n)
    rep.add("group", str(qp.group))
    rep.add("degrees", [list(d) for d in qp.degrees])
    rep.add("faces", _faces(qp.maximal_faces))
    rep.add("non_free_faces", nonfree)
    if nonfree:
        return NO
    sep, wit = embed.is_separated(qp)
    rep.add("separated", sep)
    if not sep:
        rep.add("witness", _faces(wit))
        return NO
    return OK


def cmd_classgroup(args, rep: Report) -> int:
    f = load_fan(args.input)
    cg = divisor.class_group(f)
    rep.add("group", str(cg.group))
    rep.add("degrees", [list(d) for d in cg.ray_degrees])
    rep.add("exact", divisor.exact_sequence_ok(cg))
    rep.add("picard_rank", divisor.picard_rank(f))
    return OK


def cmd_cox(args, rep: Report) -> int:
    f = load_fan(args.input)
    cp = conoid.cox_presentation(f)
    rep.add("coordinates", len(cp.generators))
    rep.add("group", str(cp.group))
    rep.add("degrees", [list(d) for d in cp.degrees])
    rep.add("irrelevant", [" ".join(f"x{i}" for i in m) or "1" for m in cp.irrelevant])
    rep.add("stabilizers", [f"{list(c)}: {'infinite' if s is None else s}" for c, s in cp.stabilizers])
    rep.add("free", cp.free)
    rep.add("exact", conoid.presentation_exact(cp.quotient))
    return OK


def _bundle(f: Fan, certs) -> dict:
    return {
        "kind": "certificates",
        "fan": fan_to_dict(f),
        "certificates": [divisor.certificate_to_dict(c) for c in certs],
    }


def cmd_divisorial(args, rep: Report) -> int:
    f = load_fan(args.input)
    k = args.k
    if k < 1:
        raise InputError("--k must be positive")
    st = divisor.k_divisorial_status(f, k)
    rep.add("k", k)
    rep.add("status", {"YES": "DIVISORIAL" if k == 1 else "YES", "NO": "NOT_DIVISORIAL", "UNKNOWN": "UNKNOWN"}[st.status])
    rep.add("reason", st.reason)
    if st.witness is not None:
        rep.add("witness_cone", list(st.witness))
    for c in st.certificates:
        rep.add(f"certificate {list(c.cone)}", list(c.coeffs))
    if st.ample is not None:
        rep.add("ample_divisor", list(st.ample.divisor.coeffs))
    if args.out and st.certificates:
        Path(args.out).write_text(json.dumps(_bundle(f, st.certificates), indent=1) + "\n")
        rep.add("written", args.out)
    return {"YES": OK, "NO": NO, "UNKNOWN": UNKNOWN}[st.status]


def cmd_conoid(args, rep: Report) -> int:
    f = load_fan(args.input)
    if args.bound < 1:
        raise InputError("--bound must be at least 1")
    try:
        certs = divisor.divisoriality_certificates(f)
    except divisor.NotDivisorial as e:
        rep.add("status", "NOT_DIVISORIAL")
        rep.add("witness_cone", list(e.cone))
        return NO
    ag = conoid.build_ample_group(f, certs, args.policy)
    sg = conoid.section_semigroup(ag, args.bound)
    cp = conoid.conoid_presentation(sg)
    rep.add("ample_rank", ag.rank)
    rep.add("basis_degrees", [list(d) for d in ag.basis_degrees])
    rep.add("generators", [f"u={list(g[:f.rank])} lambda={list(g[f.rank:])}" for g in sg.generators])
    rep.add("sections", [list(d) for d in cp.distinguished])
    rep.add("relations", [f"{list(p)} = {list(q)}" for p, q in conoid.relations(cp)])
    rep.add("complete", sg.complete)
    return OK if sg.complete else UNKNOWN


def cmd_embed(args, rep: Report) -> int:
    f = load_fan(args.input)
    if args.bound < 1:
        raise InputError("--bound must be at least 1")
    try:
        art = embed.build_embedding(f, args.k, args.bound, args.policy)
    except divisor.NotDivisorial as e:
        rep.add("status", "NOT_DIVISORIAL")
        rep.add("witness_cone", list(e.cone))
        return NO
    except embed.BoundExhausted as e:
        rep.add("status", "BOUND_EXHAUSTED")
        rep.add("message", str(e))
        return UNKNOWN
    except embed.VerificationFailure as e:
        rep.add("status", "VERIFICATION_FAILED")
        rep.add("message", str(e))
        return NO
    except ValueError as e:
        rep.add("status", "UNKNOWN")
        rep.add("message", str(e))
        return UNKNOWN
    qp = art.ambient
    free = set(embed.free_locus(qp))
    rep.add("status", "VERIFIED")
    rep.add("coordinates", qp.n)
    rep.add("group", str(qp.group))
    rep.add("degrees", [list(d) for d in qp.degrees])
    rep.add("faces", _faces(qp.maximal_faces))
    rep.add("free_locus_is_all_listed", set(qp.faces) <= free)
    rep.add("separated", art.separated)
    rep.add("smooth", set(qp.faces) <= free)
    rep.add("note", art.note)
    rep.add("transcript", list(art.transcript))
    if args.out:
        Path(args.out).write_text(embed.dumps_artifact(art))
        rep.add("written", args.out)
    return OK


def cmd_aksets(args, rep: Report) -> int:
    obj = load(args.input)
    if isinstance(obj, Fan):
        v = validate_fan(obj)
        if v is not None:
            raise InputError(f"{args.input}: invalid fan: {v}")
        space, family = akset.fan_space(obj)
    else:
        space, family = akset.presentation_space(obj)
    a = akset.analyse(space, family, args.k)
    name = space.names
    rep.add("k", args.k)
    rep.add("orbits", list(name))
    rep.add("components", ["(" + ", ".join(name[i] for i in t) + ")" for t in a.components])
    rep.add("maximal", ["{" + " ".join(name[i] for i in sorted(m)) + "}" for m in a.maximal])
    return OK


def cmd_verify(args, rep: Report) -> int:
    path = Path(args.input)
    if not path.is_file():
        raise InputError(f"{args.input}: no such file")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{args.input}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    kind = d.get("kind") if isinstance(d, dict) else None
    rep.add("kind", kind)
    try:
        if kind == "certificates":
            f = fan_from_dict(d["fan"])
            problems = []
            for rec in d["certificates"]:
                c = divisor.certificate_from_dict(f, rec)
                problems += [f"{list(c.cone)}: {p}" for p in divisor.verify_certificate(f, c)]
            covered = {tuple(r["cone"]) for r in d["certificates"]}
            problems += [f"{list(c)}: no certificate" for c in f.max_cones if c not in covered]
            rep.add("checked", len(d["certificates"]))
            rep.add("problems", problems)
            rep.add("verified", not problems)
            return NO if problems else OK
        if kind == "embedding":
            art = embed.artifact_from_dict(d)
            try:
                lines = embed.verify_closed_embedding(art)
            except embed.VerificationFailure as e:
                rep.add("verified", False)
                rep.add("problem", str(e))
                return NO
            rep.add("transcript", lines)
            rep.add("verified", True)
            return OK
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{args.input}: malformed {kind} file: {e}") from None
    raise InputError(f"{args.input}: unknown artifact kind {kind!r}")


COMMANDS = {
    "check": cmd_check,
    "classgroup": cmd_classgroup,
    "cox": cmd_cox,
    "divisorial": cmd_divisorial,
    "conoid": cmd_conoid,
    "embed": cmd_embed,
    "aksets": cmd_aksets,
    "verify": cmd_verify,
}


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricemb", description="Exact toric variety computations.")
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.add_argument("--seed", type=int, default=0, help="recorded in the report header")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("input", help="file path or corpus name")
        if name in ("divisorial", "embed", "aksets"):
            s.add_argument("--k", type=int, default=2 if name != "divisorial" else 1)
        if name in ("conoid", "embed"):
            s.add_argument("--bound", type=int, default=2)
            s.add_argument("--policy", choices=["min_rank", "per_cone"], default="min_rank")
        if name in ("divisorial", "embed"):
            s.add_argument("--out", help="write a re-verifiable certificate/artifact file")
    return p


def main(argv: list[str] | None = None) -> int:
    args = parser().parse_args(argv)
    rep = Report(args.command, args.input, args.seed)
    try:
        code = COMMANDS[args.command](args, rep)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT_ERROR
    sys.stdout.write(rep.render(args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
