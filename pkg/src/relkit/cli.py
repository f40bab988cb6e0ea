"""``relkit`` command line.

Exit status: 0 when the asserted verdict holds (or the search succeeds),
1 on a counterexample or when no term system exists, 2 on usage, parse or
budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fixtures
from .algebra import FiniteAlgebra, format_algebra, format_term, free_algebra, load_algebra
from .errors import RelkitError
from .identities import FAMILIES, gen_identity
from .lang import check_statement, format_statement, load_statement, parse_statement
from .relations import (ENUM_BUDGET, SORTS, classify, enumerate_relations, format_relation, parse_relations,
                        preorder_lattice)
from .terms import PRESETS, find_term_system, satisfies

CAVEAT = ("note: generated mode tests relations generated by small seed sets; "
          "pass --mode exhaustive for a complete check")


class UsageError(Exception):
    pass


class Report:
    """Collects ``key: value`` records; prints text or one JSON object per line."""

    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout

    def emit(self, key: str, value=None, **fields):
        if self.fmt == "json-lines":
            record = {"key": key}
            if value is not None:
                record["value"] = value
            record.update(fields)
            print(json.dumps(record, default=str), file=self.out)
        else:
            extra = " ".join(f"{k}={v}" for k, v in fields.items())
            text = f"{key}: {value}" if value is not None else key
            print(f"{text} {extra}".rstrip(), file=self.out)


# --------------------------------------------------------------------------- loading

def resolve_algebra(spec: str):
    """``fixtures:NAME`` or a path; returns ``(algebra, fixture or None)``."""
    if spec.startswith("fixtures:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.NAMES:
            raise UsageError(f"unknown fixture {name!r}; known: {', '.join(fixtures.NAMES)}")
        fx = fixtures.build(name)
        return fx.algebra, fx
    try:
        return load_algebra(spec), None
    except FileNotFoundError:
        raise UsageError(f"algebra file not found: {spec}") from None


def _statement(args):
    given = [x for x in (args.stmt, args.stmt_file, args.family) if x]
    if len(given) != 1:
        raise UsageError("give exactly one of --stmt, --stmt-file, --family")
    if args.stmt:
        return parse_statement(args.stmt)
    if args.stmt_file:
        try:
            return load_statement(args.stmt_file)
        except FileNotFoundError:
            raise UsageError(f"statement file not found: {args.stmt_file}") from None
    return parse_statement(gen_identity(args.family, args.n, args.k))


def _element(alg: FiniteAlgebra, fx, token: str) -> int:
    token = token.strip()
    if fx is not None and token in fx.elements:
        return fx.elements[token]
    if alg.labels and token in alg.labels:
        return alg.labels.index(token)
    if token.isdigit() and int(token) < alg.size:
        return int(token)
    raise UsageError(f"unknown element {token!r}")


def _pair(alg, fx, text: str | None):
    if not text:
        return None
    # labels may contain commas, so accept "a;b" as well as "a,b"
    parts = text.split(";") if ";" in text else text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--pair needs two elements, got {text!r}")
    return _element(alg, fx, parts[0]), _element(alg, fx, parts[1])


def _relations(alg, fx, path: str | None):
    rels = dict(fx.relations) if fx is not None else {}
    if path:
        try:
            with open(path) as fh:
                rels.update(parse_relations(fh.read(), alg.size))
        except FileNotFoundError:
            raise UsageError(f"relations file not found: {path}") from None
    return rels


# --------------------------------------------------------------------------- subcommands

def cmd_check(args, out: Report) -> int:
    alg, fx = resolve_algebra(args.algebra)
    stmt = _statement(args)
    rels = _relations(alg, fx, args.relations)
    pair = _pair(alg, fx, args.pair)
    out.emit("statement", format_statement(stmt))
    out.emit("algebra", alg.name, size=alg.size)
    out.emit("mode", args.mode)
    if args.mode.startswith("generated"):
        out.emit("caveat", CAVEAT)
    verdict = check_statement(alg, stmt, args.mode, budget=args.budget, relations=rels, pair=pair)
    for note in verdict.notes:
        out.emit("note", note)
    out.emit("bindings", verdict.checked, distinct=verdict.distinct, space=verdict.space,
             complete=verdict.complete)
    if verdict.holds:
        scope = "exhaustively on this algebra" if verdict.complete else "on the tested bindings"
        out.emit("verdict", "holds", scope=scope.replace(" ", "_"))
        out.emit("variety", "holds on tested algebras")
        return 0
    cx = verdict.counterexample
    a, c = cx.pair
    out.emit("verdict", "fails")
    out.emit("variety", "fails in the variety generated by this algebra")
    out.emit("pair", f"({alg.label(a)}, {alg.label(c)})", indices=f"{a},{c}")
    out.emit("direction", "lhs <= rhs" if cx.direction == "<=" else "rhs <= lhs")
    if cx.midpoint:
        out.emit("midpoint", " ".join(alg.label(b) for b in cx.midpoint))
    for name, r in cx.binding.items():
        out.emit("binding", format_relation(name, r))
    if cx.seeds:
        for name, seeds in cx.seeds.items():
            out.emit("seeds", f"{name} " + " ".join(f"({p},{q})" for p, q in seeds))
    return 1


def cmd_find_terms(args, out: Report) -> int:
    if not args.preset:
        raise UsageError("find-terms needs --preset")
    alg, fx = resolve_algebra(args.algebra)
    target = alg
    if fx is not None and fx.generator:
        target = fixtures.generator_of(fx)
        out.emit("search", target.name, reason=f"generates the variety of {alg.name}")
    result = find_term_system(target, args.preset, budget=args.budget)
    out.emit("preset", result.spec.name)
    out.emit("free-sizes", " ".join(f"F({k})={v}" for k, v in sorted(result.free_sizes.items())))
    if not result.found:
        out.emit("result", "none")
        return 1
    out.emit("result", "found")
    for name, text in result.solution.describe().items():
        out.emit("term", f"{name} = {text}")
    if target is not alg:
        ok = satisfies(alg, result.spec, result.solution.terms)
        out.emit("verified", ok, on=alg.name)
        if not ok:
            return 1
    return 0


def cmd_free(args, out: Report) -> int:
    alg, _ = resolve_algebra(args.algebra)
    k = args.k or 3
    F = free_algebra(alg, k, args.budget)
    out.emit("free", F.size, algebra=alg.name, generators=k)
    if args.list:
        for i, t in enumerate(F.witnesses):
            out.emit("element", f"{i} {format_term(t)}")
    return 0


def cmd_relations(args, out: Report) -> int:
    alg, fx = resolve_algebra(args.algebra)
    if args.lattice:
        report = preorder_lattice(alg, args.budget or ENUM_BUDGET)
        out.emit("preorders", report.size, modular=report.modular,
                 distributive=report.distributive)
        if report.failure is not None:
            out.emit("failing-triple", " ".join(map(str, report.failure)))
        return 0
    sort = args.sort or "congruence"
    rels = enumerate_relations(alg, sort, args.budget or ENUM_BUDGET)
    out.emit("relations", len(rels), sort=sort, algebra=alg.name)
    names = {r.rows: n for n, r in (fx.relations.items() if fx else [])}
    for i, r in enumerate(rels):
        out.emit("relation", format_relation(names.get(r.rows, f"r{i}"), r))
    if fx is not None:
        for name, r in fx.relations.items():
            out.emit("named", name, sorts=str(classify(alg, r)))
    return 0


def cmd_gen_identity(args, out: Report) -> int:
    if not args.family:
        raise UsageError("gen-identity needs --family; known: " + ", ".join(FAMILIES))
    text = gen_identity(args.family, args.n, args.k)
    if args.format == "json-lines":
        out.emit("statement", text)
    else:
        print(text, file=out.out)
    return 0


def cmd_verify_paper(args, out: Report) -> int:
    try:
        report = fixtures.verify_paper_suite(args.only or None, quick=args.quick)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    for r in report.results:
        out.emit("PASS" if r.passed else "FAIL", f"{r.fixture}: {r.name}", anchor=repr(r.anchor),
                 detail=repr(r.detail), seconds=f"{r.seconds:.2f}")
    failed = len(report.failures())
    out.emit("summary", f"{len(report.results) - failed} passed, {failed} failed")
    return 0 if report.passed else 1


def cmd_export(args, out: Report) -> int:
    alg, fx = resolve_algebra(args.algebra)
    text = format_algebra(alg)
    if fx is not None:
        text += "".join(format_relation(n, r) + "\n" for n, r in fx.relations.items())
    print(text, end="", file=out.out)
    return 0


COMMANDS = {
    "check": cmd_check, "find-terms": cmd_find_terms, "free": cmd_free,
    "relations": cmd_relations, "gen-identity": cmd_gen_identity,
    "verify-paper": cmd_verify_paper, "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relkit", description="Relation identities on finite algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, algebra=True):
        if algebra:
            sp.add_argument("--algebra", required=True, help="fixtures:NAME or a path")
        sp.add_argument("--budget", type=int, default=None)
        sp.add_argument("--format", choices=["text", "json-lines"], default="text")

    sp = sub.add_parser("check", help="check a relation identity on an algebra")
    common(sp)
    sp.add_argument("--stmt")
    sp.add_argument("--stmt-file")
    sp.add_argument("--family")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--mode", default="generated:2")
    sp.add_argument("--relations", help="file of relation literals for fixed mode")
    sp.add_argument("--pair", help="only test this pair, e.g. x,z or 3;5")

    sp = sub.add_parser("find-terms", help="search for a term system")
    common(sp)
    sp.add_argument("--preset", help=", ".join(PRESETS) + ", hmN, nuK")

    sp = sub.add_parser("free", help="size of a free algebra")
    common(sp)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--list", action="store_true", help="print a term per element")

    sp = sub.add_parser("relations", help="enumerate relations of one sort")
    common(sp)
    sp.add_argument("--sort", choices=sorted(SORTS))
    sp.add_argument("--lattice", action="store_true", help="report on the preorder lattice")

    sp = sub.add_parser("gen-identity", help="expand an identity family")
    common(sp, algebra=False)
    sp.add_argument("--family")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)

    sp = sub.add_parser("verify-paper", help="run every fixture's expected facts")
    common(sp, algebra=False)
    sp.add_argument("--only", nargs="*", help="fixture names")
    sp.add_argument("--quick", action="store_true", help="skip the slow facts")

    sp = sub.add_parser("export", help="print an algebra and its named relations")
    common(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = Report(args.format)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"relkit: {exc}", file=sys.stderr)
        return 2
    except (RelkitError, ValueError) as exc:
        print(f"relkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
