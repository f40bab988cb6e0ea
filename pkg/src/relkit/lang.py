"""Relation-identity statements: parsing, printing, evaluation and checking.

Grammar::

    stmt   := { decl } expr ("<=" | "=") expr
    decl   := ("cong"|"tol"|"rel") ident {"," ident} ";"
    expr   := cterm { "o" cterm }
    cterm  := factor { "&" factor }
    factor := atom { "*" | "^" }
    atom   := ident | "0" | "1" | "(" expr ")" | "gen(" uexpr ")"
    uexpr  := expr { "|" expr }

A raw union ``(R | S)`` is also accepted when directly followed by ``*``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from math import prod
from typing import Iterator, Mapping, Sequence, Union

from .algebra import FiniteAlgebra
from .errors import BudgetExceeded, ParseError, SortError
from .relations import (ENUM_BUDGET, BinaryRelation, _sort, admissible_closure, compose,
                        converse, enumerate_relations, generate, intersect, seed_pairs,
                        transitive_closure, union_raw, verified)

DECL_SORTS = ("cong", "tol", "rel")


# --------------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Diag:
    pass


@dataclass(frozen=True)
class Full:
    pass


@dataclass(frozen=True)
class Compose:
    parts: tuple


@dataclass(frozen=True)
class Meet:
    parts: tuple


@dataclass(frozen=True)
class UnionRaw:
    parts: tuple


@dataclass(frozen=True)
class Gen:
    child: object


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Converse:
    child: object


Expr = Union[Ref, Diag, Full, Compose, Meet, UnionRaw, Gen, Star, Converse]


@dataclass(frozen=True)
class IdentityStatement:
    decls: tuple[tuple[str, str], ...]  # (name, cong|tol|rel) in declaration order
    lhs: Expr
    rhs: Expr
    connective: str  # "<=" or "="

    @property
    def sorts(self) -> dict[str, str]:
        return dict(self.decls)

    @property
    def variables(self) -> list[str]:
        return [name for name, _ in self.decls]

    def __str__(self):
        return format_statement(self)


# --------------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(<=|⊆|gen\s*\(|[A-Za-z_][A-Za-z0-9_]*|[01])|(.))", re.S)


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        tok = m.group(1) or m.group(2)
        start = m.start(1) if m.group(1) else m.start(2)
        if tok is None:
            break
        if tok == "⊆":
            tok = "<="
        elif tok.startswith("gen") and tok.endswith("("):
            tok = "gen("
        toks.append((tok, start))
        pos = m.end()
    toks.append(("", len(text)))
    return toks


def _is_ident(tok: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok)) and tok != "o"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.sorts: dict[str, str] = {}

    def peek(self) -> str:
        return self.toks[self.i][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            shown = repr(tok) if tok else "end of input"
            raise ParseError(f"expected {expected!r}, found {shown}", self.pos())
        self.i += 1
        return tok

    def statement(self) -> IdentityStatement:
        decls: list[tuple[str, str]] = []
        while self.peek() in DECL_SORTS:
            # a declaration keyword may also be a variable name; look for the list shape
            nxt = self.toks[self.i + 1][0]
            if not _is_ident(nxt):
                break
            sort = self.take()
            while True:
                name_pos = self.pos()
                name = self.take()
                if not _is_ident(name):
                    raise ParseError(f"expected a variable name, found {name!r}", name_pos)
                if name in self.sorts:
                    raise ParseError(f"variable {name!r} declared twice", name_pos)
                self.sorts[name] = sort
                decls.append((name, sort))
                if self.peek() == ",":
                    self.take()
                    continue
                self.take(";")
                break
        lhs = self.expr()
        if self.peek() not in ("<=", "="):
            shown = repr(self.peek()) if self.peek() else "end of input"
            raise ParseError(f"expected '<=' or '=', found {shown}", self.pos())
        conn = self.take()
        rhs = self.expr()
        if self.peek() != "":
            raise ParseError(f"unexpected {self.peek()!r}", self.pos())
        return IdentityStatement(tuple(decls), lhs, rhs, conn)

    def expr(self):
        parts = [self.cterm()]
        while self.peek() == "o":
            self.take()
            parts.append(self.cterm())
        return parts[0] if len(parts) == 1 else Compose(tuple(parts))

    def cterm(self):
        parts = [self.factor()]
        while self.peek() == "&":
            self.take()
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else Meet(tuple(parts))

    def factor(self):
        start = self.pos()
        node = self.atom()
        if isinstance(node, UnionRaw) and self.peek() != "*":
            raise ParseError("a raw union must sit directly under gen(...) or *", start)
        while self.peek() in ("*", "^"):
            node = Star(node) if self.take() == "*" else Converse(node)
        return node

    def union(self, closing: str):
        parts = [self.expr()]
        while self.peek() == "|":
            self.take()
            parts.append(self.expr())
        self.take(closing)
        return parts[0] if len(parts) == 1 else UnionRaw(tuple(parts))

    def atom(self):
        tok, at = self.peek(), self.pos()
        if tok == "0":
            self.take()
            return Diag()
        if tok == "1":
            self.take()
            return Full()
        if tok == "(":
            self.take()
            return self.union(")")
        if tok == "gen(":
            self.take()
            return Gen(self.union(")"))
        if _is_ident(tok):
            self.take()
            if tok not in self.sorts:
                raise ParseError(f"undeclared variable {tok!r}", at)
            return Ref(tok)
        shown = repr(tok) if tok else "end of input"
        raise ParseError(f"expected a relation, found {shown}", at)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_statement(text: str) -> IdentityStatement:
    """Parse one statement; ``#`` starts a comment that runs to the end of the line."""
    return _Parser(_strip_comments(text)).statement()


def load_statement(path: str) -> IdentityStatement:
    with open(path) as fh:
        return parse_statement(fh.read())


# --------------------------------------------------------------------------- printing

def format_expr(e: Expr) -> str:
    return _fmt(e, 0)


# precedence levels: 0 compose, 1 meet, 2 postfix/atom
def _fmt(e, level: int) -> str:
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Diag):
        return "0"
    if isinstance(e, Full):
        return "1"
    if isinstance(e, Compose):
        s = " o ".join(_fmt(p, 2) for p in e.parts)
        return s if level == 0 else f"({s})"
    if isinstance(e, Meet):
        s = "&".join(_fmt(p, 2) for p in e.parts)
        return s if level <= 1 else f"({s})"
    if isinstance(e, UnionRaw):
        return "(" + " | ".join(_fmt(p, 0) for p in e.parts) + ")"
    if isinstance(e, Gen):
        inner = e.child.parts if isinstance(e.child, UnionRaw) else (e.child,)
        return "gen(" + " | ".join(_fmt(p, 0) for p in inner) + ")"
    if isinstance(e, (Star, Converse)):
        mark = "*" if isinstance(e, Star) else "^"
        return _fmt(e.child, 2) + mark
    raise TypeError(f"not an expression: {e!r}")


def format_statement(stmt: IdentityStatement) -> str:
    groups = []
    for sort, run in itertools.groupby(stmt.decls, key=lambda d: d[1]):
        groups.append(f"{sort} " + ",".join(name for name, _ in run) + ";")
    head = " ".join(groups)
    body = f"{format_expr(stmt.lhs)} {stmt.connective} {format_expr(stmt.rhs)}"
    return f"{head} {body}" if head else body


# --------------------------------------------------------------------------- evaluation

def check_sort(alg: FiniteAlgebra, name: str, sort: str, r: BinaryRelation) -> None:
    if r.size != alg.size:
        raise SortError(f"{name} is a relation on {r.size} elements, the algebra has {alg.size}")
    flags = verified(alg, r).flags
    if not flags.has(_sort(sort)):
        raise SortError(f"{name} is declared {sort} but the bound relation is not a {_sort(sort)}")


def eval_expr(alg: FiniteAlgebra, expr: Expr, binding: Mapping[str, BinaryRelation],
              sorts: Mapping[str, str] | None = None) -> BinaryRelation:
    """Value of ``expr`` under ``binding``; with ``sorts``, bound relations are sort-checked first."""
    if sorts:
        for name, sort in sorts.items():
            if name in binding:
                check_sort(alg, name, sort, binding[name])
    return _eval(alg, expr, binding, {})


def _eval(alg, e, binding, memo):
    if e in memo:
        return memo[e]
    n = alg.size
    if isinstance(e, Ref):
        try:
            out = binding[e.name]
        except KeyError:
            raise SortError(f"no relation bound to {e.name!r}") from None
        if out.size != n:
            raise SortError(f"{e.name} is a relation on {out.size} elements, the algebra has {n}")
    elif isinstance(e, Diag):
        out = BinaryRelation.diagonal(n)
    elif isinstance(e, Full):
        out = BinaryRelation.full(n)
    elif isinstance(e, Compose):
        out = _eval(alg, e.parts[0], binding, memo)
        for p in e.parts[1:]:
            out = compose(out, _eval(alg, p, binding, memo))
    elif isinstance(e, Meet):
        out = _eval(alg, e.parts[0], binding, memo)
        for p in e.parts[1:]:
            out = intersect(out, _eval(alg, p, binding, memo))
    elif isinstance(e, UnionRaw):
        out = _eval(alg, e.parts[0], binding, memo)
        for p in e.parts[1:]:
            out = union_raw(out, _eval(alg, p, binding, memo))
    elif isinstance(e, Gen):
        out = admissible_closure(alg, _eval(alg, e.child, binding, memo))
    elif isinstance(e, Star):
        out = transitive_closure(_eval(alg, e.child, binding, memo))
    elif isinstance(e, Converse):
        out = converse(_eval(alg, e.child, binding, memo))
    else:
        raise TypeError(f"not an expression: {e!r}")
    memo[e] = out
    return out


def _chain(alg, e: Expr, binding, a: int, c: int) -> tuple[int, ...]:
    """Interior points of the least chain witnessing ``(a, c)`` in the first composition of ``e``."""
    while isinstance(e, Meet):
        comps = [p for p in e.parts if isinstance(p, Compose)]
        if not comps:
            return ()
        e = comps[0]
    if not isinstance(e, Compose):
        return ()
    memo: dict = {}
    parts = [_eval(alg, p, binding, memo) for p in e.parts]
    # suffix[i]: composition of parts[i:]
    suffix = [None] * len(parts)
    suffix[-1] = parts[-1]
    for i in range(len(parts) - 2, -1, -1):
        suffix[i] = compose(parts[i], suffix[i + 1])
    if (a, c) not in suffix[0]:
        return ()
    out = []
    cur = a
    for i in range(len(parts) - 1):
        nxt = next(b for b in parts[i].image(cur) if (b, c) in suffix[i + 1])
        out.append(nxt)
        cur = nxt
    return tuple(out)


# --------------------------------------------------------------------------- modes and verdicts

@dataclass(frozen=True)
class Mode:
    kind: str  # exhaustive | generated | sampled | fixed
    k: int = 2
    trials: int = 0
    seed: int = 0
    binding: tuple[tuple[str, str], ...] = ()  # fixed mode: variable -> relation name

    def __str__(self):
        if self.kind == "generated":
            return f"generated:{self.k}"
        if self.kind == "sampled":
            return f"sampled:{self.trials}:{self.seed}"
        if self.kind == "fixed":
            return "fixed:" + ",".join(f"{v}={r}" for v, r in self.binding)
        return self.kind


def parse_mode(text: str) -> Mode:
    """``exhaustive``, ``generated:K``, ``sampled:T:SEED`` or ``fixed:var=name,...``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "exhaustive" and not rest:
            return Mode("exhaustive")
        if kind == "generated":
            k = int(rest) if rest else 2
            if k < 0:
                raise ValueError
            return Mode("generated", k=k)
        if kind == "sampled":
            t, _, s = rest.partition(":")
            return Mode("sampled", trials=int(t), seed=int(s) if s else 0)
        if kind == "fixed":
            pairs = []
            for item in filter(None, rest.split(",")):
                var, eq, rel = item.partition("=")
                if not eq or not var.strip() or not rel.strip():
                    raise ValueError
                pairs.append((var.strip(), rel.strip()))
            return Mode("fixed", binding=tuple(pairs))
    except ValueError:
        pass
    raise ParseError(f"bad mode {text!r}; expected exhaustive, generated:K, "
                     f"sampled:T:SEED or fixed:var=rel,...")


@dataclass
class Counterexample:
    binding: dict[str, BinaryRelation]
    pair: tuple[int, int]
    midpoint: tuple[int, ...] = ()  # interior of the least chain through the lhs composition
    direction: str = "<="  # which inclusion failed: "<=" (lhs in rhs) or ">=" (rhs in lhs)
    seeds: dict[str, tuple] | None = None  # generated mode: seed pairs per variable


@dataclass
class Verdict:
    holds: bool
    counterexample: Counterexample | None = None
    mode: str = ""
    checked: int = 0  # bindings examined
    distinct: int = 0  # distinct relation tuples actually evaluated
    complete: bool = True  # whether the mode's whole binding space was covered
    space: int = 0  # size of the mode's binding space
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.holds


def violating_pairs(alg: FiniteAlgebra, stmt: IdentityStatement,
                    binding: Mapping[str, BinaryRelation]) -> list[tuple[int, int, str]]:
    """Every ``(a, c, direction)`` breaking the statement under ``binding``."""
    memo: dict = {}
    lhs = _eval(alg, stmt.lhs, binding, memo)
    rhs = _eval(alg, stmt.rhs, binding, memo)
    sides = [(lhs, rhs, "<=")] + ([(rhs, lhs, ">=")] if stmt.connective == "=" else [])
    out = []
    for left, right, direction in sides:
        for a, (r, s) in enumerate(zip(left.rows, right.rows)):
            out.extend((a, c, direction) for c in range(alg.size) if (r & ~s) >> c & 1)
    return out


def _violation(alg, stmt: IdentityStatement, binding, pair=None) -> Counterexample | None:
    memo: dict = {}
    lhs = _eval(alg, stmt.lhs, binding, memo)
    rhs = _eval(alg, stmt.rhs, binding, memo)
    for left, right, direction in ((lhs, rhs, "<="), (rhs, lhs, ">=")):
        rows = range(alg.size) if pair is None else [pair[0]]
        for a in rows:
            extra = left.rows[a] & ~right.rows[a]
            if pair is not None:
                extra &= 1 << pair[1]
            if extra:
                c = (extra & -extra).bit_length() - 1
                side = stmt.lhs if direction == "<=" else stmt.rhs
                return Counterexample(dict(binding), (a, c), _chain(alg, side, binding, a, c),
                                      direction)
        if stmt.connective == "<=":
            break
    return None


def holds_under(alg: FiniteAlgebra, stmt: IdentityStatement,
                binding: Mapping[str, BinaryRelation],
                pair: tuple[int, int] | None = None) -> Counterexample | None:
    """``None`` when the statement holds for this binding, else the first violating pair.

    With ``pair`` only that pair is examined.
    """
    for name, sort in stmt.decls:
        if name not in binding:
            raise SortError(f"no relation bound to {name!r}")
        check_sort(alg, name, sort, binding[name])
    return _violation(alg, stmt, binding, pair)


GENERATED_BUDGET = 2000


def seed_sets(n: int, sort: str, k: int) -> list[tuple[tuple[int, int], ...]]:
    """All sets of at most ``k`` seed pairs, smallest first, then lexicographic."""
    pairs = seed_pairs(n, _sort(sort))
    return [c for size in range(k + 1) for c in itertools.combinations(pairs, size)]


def _generated(alg: FiniteAlgebra, sort: str, seeds: tuple) -> BinaryRelation:
    key = ("generated", _sort(sort), seeds)
    cache = alg.cache
    if key not in cache:
        cache[key] = generate(alg, seeds, sort)
    return cache[key]


def _unrank(index: int, radices: Sequence[int]) -> tuple[int, ...]:
    out = []
    for r in reversed(radices):
        index, d = divmod(index, r)
        out.append(d)
    return tuple(reversed(out))


def _indices(total: int, budget: int, seed: int = 0) -> tuple[Iterator[int], bool]:
    if total <= budget:
        return iter(range(total)), True
    return iter(sorted(random.Random(seed).sample(range(total), budget))), False


def check_statement(alg: FiniteAlgebra, stmt: IdentityStatement, mode: Mode | str = "generated:2",
                    *, budget: int | None = None,
                    relations: Mapping[str, BinaryRelation] | None = None,
                    pair: tuple[int, int] | None = None) -> Verdict:
    """Decide ``stmt`` on ``alg`` over the bindings selected by ``mode``.

    ``budget`` caps the number of bindings: exhaustive mode refuses larger
    spaces, generated mode samples that many bindings (reproducibly) from a
    larger space.  ``relations`` resolves names in a fixed binding.  With
    ``pair`` only that pair is tested in each binding.
    """
    if isinstance(mode, str):
        mode = parse_mode(mode)
    variables = stmt.variables
    sorts = stmt.sorts

    if mode.kind == "fixed":
        relations = relations or {}
        named = dict(mode.binding)
        binding = {}
        for v in variables:
            ref = named.get(v, v)
            if ref not in relations:
                raise SortError(f"no relation named {ref!r} to bind to {v!r}")
            binding[v] = relations[ref]
        cx = holds_under(alg, stmt, binding, pair)
        return Verdict(cx is None, cx, str(mode), 1, 1, True, 1)

    if mode.kind == "exhaustive":
        budget = ENUM_BUDGET if budget is None else budget
        families = [enumerate_relations(alg, sorts[v], budget) for v in variables]
        total = prod(len(f) for f in families)
        if total > budget:
            raise BudgetExceeded(f"exhaustive check needs {total} bindings, budget is {budget}")
        verdict = Verdict(True, mode=str(mode), space=total)
        for combo in itertools.product(*families):
            verdict.checked += 1
            verdict.distinct += 1
            cx = _violation(alg, stmt, dict(zip(variables, combo)), pair)
            if cx is not None:
                verdict.holds, verdict.counterexample = False, cx
                return verdict
        return verdict

    if mode.kind == "generated":
        budget = GENERATED_BUDGET if budget is None else budget
        options = [seed_sets(alg.size, sorts[v], mode.k) for v in variables]
        radices = [len(o) for o in options]
        total = prod(radices)
        indices, complete = _indices(total, budget)
        verdict = Verdict(True, mode=str(mode), complete=complete, space=total)
        if not complete:
            verdict.notes.append(f"sampled {budget} of {total} seed-set tuples")
        seen: set = set()
        for index in indices:
            choice = [options[i][d] for i, d in enumerate(_unrank(index, radices))]
            rels = [_generated(alg, sorts[v], s) for v, s in zip(variables, choice)]
            verdict.checked += 1
            key = tuple(r.rows for r in rels)
            if key in seen:
                continue
            seen.add(key)
            verdict.distinct += 1
            cx = _violation(alg, stmt, dict(zip(variables, rels)), pair)
            if cx is not None:
                cx.seeds = dict(zip(variables, choice))
                verdict.holds, verdict.counterexample = False, cx
                return verdict
        return verdict

    if mode.kind == "sampled":
        rng = random.Random(mode.seed)
        pools = {v: seed_pairs(alg.size, sorts[v]) for v in variables}
        verdict = Verdict(True, mode=str(mode), complete=False, space=mode.trials)
        seen = set()
        for _ in range(mode.trials):
            choice = []
            for v in variables:
                pool = pools[v]
                size = rng.randint(1, min(3, len(pool))) if pool else 0
                choice.append(tuple(sorted(rng.sample(pool, size))))
            rels = [_generated(alg, sorts[v], s) for v, s in zip(variables, choice)]
            verdict.checked += 1
            key = tuple(r.rows for r in rels)
            if key in seen:
                continue
            seen.add(key)
            verdict.distinct += 1
            cx = _violation(alg, stmt, dict(zip(variables, rels)), pair)
            if cx is not None:
                cx.seeds = dict(zip(variables, choice))
                verdict.holds, verdict.counterexample = False, cx
                return verdict
        return verdict

    raise ValueError(f"unknown mode {mode.kind!r}")


__all__ = [
    "Ref", "Diag", "Full", "Compose", "Meet", "UnionRaw", "Gen", "Star", "Converse", "Expr",
    "IdentityStatement", "parse_statement", "load_statement", "format_expr", "format_statement",
    "eval_expr", "Mode", "parse_mode", "Verdict", "Counterexample", "check_statement",
    "holds_under", "seed_sets", "violating_pairs",
]
