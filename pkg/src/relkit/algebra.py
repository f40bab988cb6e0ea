"""Finite algebras, terms, subuniverses and free algebras of finitely generated varieties."""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .closure import OpTable, closure, decode, encode
from .errors import AlgebraError, BudgetExceeded, ParseError

FREE_BUDGET = 1 << 20  # max tuples in the ambient power A^(n^k)


def env_budget(default: int) -> int:
    value = os.environ.get("RELKIT_BUDGET")
    return int(value) if value else default


@dataclass(frozen=True)
class Operation:
    symbol: str
    arity: int
    table: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    name: str
    size: int
    ops: tuple[Operation, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("algebra size must be positive")
        symbols = [op.symbol for op in self.ops]
        if len(set(symbols)) != len(symbols):
            raise AlgebraError(f"duplicate operation symbols in {self.name}")
        for op in self.ops:
            if op.arity < 0:
                raise AlgebraError(f"negative arity for {op.symbol}")
            if len(op.table) != self.size ** op.arity:
                raise AlgebraError(
                    f"table of {op.symbol} has {len(op.table)} entries, "
                    f"expected {self.size ** op.arity}")
            if any(not 0 <= v < self.size for v in op.table):
                raise AlgebraError(f"table of {op.symbol} has out-of-range entries")
        if self.labels is not None and len(self.labels) != self.size:
            raise AlgebraError("labels must name every element")

    @classmethod
    def from_function(cls, name: str, size: int, ops: Sequence[tuple[str, int, object]],
                      labels=None) -> FiniteAlgebra:
        """Build tables by calling ``fn(*args)`` for every argument tuple."""
        built = []
        for symbol, arity, fn in ops:
            table = tuple(int(fn(*args)) for args in itertools.product(range(size), repeat=arity))
            built.append(Operation(symbol, arity, table))
        return cls(name, size, tuple(built), tuple(labels) if labels else None)

    def op(self, symbol: str) -> Operation:
        for op in self.ops:
            if op.symbol == symbol:
                return op
        raise AlgebraError(f"unknown operation symbol {symbol!r} in {self.name}")

    def apply(self, symbol: str, *args: int) -> int:
        op = self.op(symbol)
        if len(args) != op.arity:
            raise AlgebraError(f"{symbol} expects {op.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            if not 0 <= a < self.size:
                raise AlgebraError(f"element {a} out of range")
            idx = idx * self.size + a
        return op.table[idx]

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    @cached_property
    def op_tables(self) -> list[OpTable]:
        return [OpTable(op.symbol, op.arity, np.array(op.table, dtype=np.int64)) for op in self.ops]

    @cached_property
    def cache(self) -> dict:
        # memo space for derived structures (relation families, free algebras)
        return {}

    def arities(self) -> dict[str, int]:
        return {op.symbol: op.arity for op in self.ops}


# --------------------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return var_name(self.index)


@dataclass(frozen=True)
class App:
    symbol: str
    children: tuple = ()

    def __str__(self):
        return format_term(self)


Term = Var | App

_NAMES = "xyzuv"


def var_name(i: int, total: int | None = None) -> str:
    if (total is None or total <= len(_NAMES)) and i < len(_NAMES):
        return _NAMES[i]
    return f"x{i}"


def format_term(t: Term, names: Sequence[str] | None = None) -> str:
    memo: dict[int, str] = {}

    def go(s):
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            out = names[s.index] if names else var_name(s.index)
        elif not s.children:
            out = s.symbol
        else:
            out = f"{s.symbol}({','.join(go(c) for c in s.children)})"
        memo[key] = out
        return out

    return go(t)


def term_size(t: Term) -> int:
    """Number of nodes of ``t`` written out as a tree."""
    memo: dict[int, int] = {}

    def go(s):
        if id(s) not in memo:
            memo[id(s)] = 1 if isinstance(s, Var) else 1 + sum(go(c) for c in s.children)
        return memo[id(s)]

    return go(t)


def max_var(t: Term) -> int:
    """Largest variable index occurring in ``t`` (-1 if none)."""
    memo: dict[int, int] = {}

    def go(s):
        if id(s) not in memo:
            memo[id(s)] = s.index if isinstance(s, Var) else max((go(c) for c in s.children), default=-1)
        return memo[id(s)]

    return go(t)


def substitute(t: Term, args: Sequence[Term]) -> Term:
    """Replace every ``Var(i)`` in ``t`` by ``args[i]``, preserving shared subterms."""
    memo: dict[int, Term] = {}

    def go(s):
        key = id(s)
        if key not in memo:
            if isinstance(s, Var):
                if s.index >= len(args):
                    raise AlgebraError(f"substitution provides {len(args)} terms, "
                                       f"term uses variable {s.index}")
                memo[key] = args[s.index]
            else:
                memo[key] = App(s.symbol, tuple(go(c) for c in s.children))
        return memo[key]

    return go(t)


def compose(outer: Term, *inner: Term) -> Term:
    return substitute(outer, inner)


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_term(text: str, variables: Sequence[str] = ("x", "y", "z", "u", "v")) -> Term:
    """Parse ``f(x,g(y,z))``-style text; names in ``variables`` (or ``x0, x1, ...``) are variables."""
    tokens = [(m.start(1) if m.group(1) else m.start(2), m.group(1) or m.group(2))
              for m in _TOKEN.finditer(text) if (m.group(1) or m.group(2))]
    pos = 0

    def peek():
        return tokens[pos][1] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of term", len(text))
        where, tok = tokens[pos]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", where)
        pos += 1
        return tok

    def term():
        where = tokens[pos][0] if pos < len(tokens) else len(text)
        name = take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError(f"unexpected {name!r}", where)
        if peek() == "(":
            take("(")
            children = [term()]
            while peek() == ",":
                take(",")
                children.append(term())
            take(")")
            return App(name, tuple(children))
        if name in variables:
            return Var(list(variables).index(name))
        m = re.fullmatch(r"x(\d+)", name)
        if m:
            return Var(int(m.group(1)))
        return App(name, ())

    t = term()
    if pos != len(tokens):
        raise ParseError(f"trailing input {tokens[pos][1]!r}", tokens[pos][0])
    return t


def check_term(alg: FiniteAlgebra, t: Term, extra: dict[str, int] | None = None) -> None:
    arities = alg.arities()
    if extra:
        arities.update(extra)
    seen: set[int] = set()

    def go(s):
        if id(s) in seen or isinstance(s, Var):
            return
        seen.add(id(s))
        if s.symbol not in arities:
            raise AlgebraError(f"unknown symbol {s.symbol!r}")
        if len(s.children) != arities[s.symbol]:
            raise AlgebraError(f"{s.symbol} has arity {arities[s.symbol]}, "
                               f"applied to {len(s.children)} arguments")
        for c in s.children:
            go(c)

    go(t)


def eval_term(alg: FiniteAlgebra, t: Term, env: Sequence[int]) -> int:
    for a in env:
        if not 0 <= a < alg.size:
            raise AlgebraError(f"element {a} out of range")
    check_term(alg, t)
    memo: dict[int, int] = {}

    def go(s):
        key = id(s)
        if key not in memo:
            if isinstance(s, Var):
                if s.index >= len(env):
                    raise AlgebraError(f"no value for variable {s.index}")
                memo[key] = env[s.index]
            else:
                memo[key] = alg.apply(s.symbol, *(go(c) for c in s.children))
        return memo[key]

    return go(t)


def assignment_columns(n: int, k: int) -> list[np.ndarray]:
    """Value of each variable across all ``n**k`` assignments, last variable fastest."""
    if k == 0:
        return []
    grid = np.indices((n,) * k).reshape(k, -1)
    return [grid[i].astype(np.int64) for i in range(k)]


def term_table(alg: FiniteAlgebra, t: Term, k: int, *,
               unknowns: dict[str, tuple[int, np.ndarray]] | None = None) -> np.ndarray:
    """Values of ``t`` on all assignments of its first ``k`` variables.

    ``unknowns`` maps extra symbols to ``(arity, table)`` pairs, used to
    evaluate term-condition equations for candidate free-algebra elements.
    """
    n = alg.size
    cols = assignment_columns(n, k)
    count = n ** k
    tables = {op.symbol: op for op in alg.op_tables}
    memo: dict[int, np.ndarray] = {}

    def go(s):
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            if s.index >= k:
                raise AlgebraError(f"variable {s.index} outside the {k} evaluated")
            out = cols[s.index]
        else:
            if unknowns and s.symbol in unknowns:
                arity, table = unknowns[s.symbol]
            elif s.symbol in tables:
                arity, table = tables[s.symbol].arity, tables[s.symbol].table
            else:
                raise AlgebraError(f"unknown symbol {s.symbol!r}")
            if len(s.children) != arity:
                raise AlgebraError(f"{s.symbol} has arity {arity}, applied to {len(s.children)}")
            idx = np.zeros(count, dtype=np.int64)
            for c in s.children:
                idx = idx * n + go(c)
            out = table[idx]
        memo[key] = out
        return out

    return np.broadcast_to(go(t), (count,))


def equation_holds(alg: FiniteAlgebra, lhs: Term, rhs: Term) -> bool:
    """Whether ``lhs = rhs`` holds under every assignment, i.e. in the variety generated by ``alg``."""
    k = max(max_var(lhs), max_var(rhs)) + 1
    return bool(np.array_equal(term_table(alg, lhs, k), term_table(alg, rhs, k)))


# --------------------------------------------------------------------------- subuniverses

@dataclass(frozen=True)
class Subuniverse:
    elements: tuple[int, ...]
    witnesses: tuple[Term, ...]  # over variables indexing the generators

    def __contains__(self, a):
        return a in self.elements

    def as_set(self) -> set[int]:
        return set(self.elements)


def _witness_terms(ops: list[OpTable], prov: list, gen_vars: list[int]) -> list[Term]:
    terms: list[Term] = []
    g = iter(gen_vars)
    for p in prov:
        if p is None:
            terms.append(Var(next(g)))
        else:
            oi, args = p
            terms.append(App(ops[oi].symbol, tuple(terms[a] for a in args)))
    return terms


def subuniverse_closure(alg: FiniteAlgebra, gens: Sequence[int]) -> Subuniverse:
    """Smallest subuniverse containing ``gens``, elements in breadth-first discovery order."""
    gens = list(gens)
    if not gens:
        raise AlgebraError("subuniverse_closure needs at least one generator")
    for a in gens:
        if not 0 <= a < alg.size:
            raise AlgebraError(f"element {a} out of range")
    first: dict[int, int] = {}
    for i, a in enumerate(gens):
        first.setdefault(a, i)
    arr = np.array(gens, dtype=np.int64).reshape(-1, 1)
    for elems, prov, _ in closure(alg.op_tables, arr, alg.size):
        pass
    gen_vars = [first[a] for a in dict.fromkeys(gens)]
    terms = _witness_terms(alg.op_tables, prov, gen_vars)
    return Subuniverse(tuple(int(v) for v in elems[:, 0]), tuple(terms))


# --------------------------------------------------------------------------- free algebras

@dataclass(frozen=True, eq=False)
class FreeAlgebra:
    base: FiniteAlgebra
    rank: int
    elements: np.ndarray  # (m, n^rank), row e is the term operation of element e
    witnesses: tuple[Term, ...]
    generator_indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> dict[int, int]:
        codes = encode(self.elements, self.base.size)
        return {int(c): i for i, c in enumerate(codes)}

    def index_of(self, values: Sequence[int]) -> int | None:
        code = int(encode(np.asarray(values, dtype=np.int64).reshape(1, -1), self.base.size)[0])
        return self._index.get(code)

    def as_algebra(self, name: str | None = None) -> FiniteAlgebra:
        """The free algebra as a :class:`FiniteAlgebra` on ``0..size-1``."""
        key = ("as_algebra",)
        cache = self.__dict__.setdefault("_alg_cache", {})
        if key in cache:
            return cache[key]
        n, m = self.base.size, self.size
        codes = encode(self.elements, n)
        lookup = np.full(n ** self.elements.shape[1], -1, dtype=np.int64)
        lookup[codes] = np.arange(m)
        ops = []
        for op in self.base.op_tables:
            r = op.arity
            out = np.empty(m ** r, dtype=np.int64)
            step = max(1, (1 << 21) // max(1, self.elements.shape[1]))
            for start in range(0, m ** r, step):
                lin = np.arange(start, min(m ** r, start + step), dtype=np.int64)
                idx = np.unravel_index(lin, (m,) * r) if r else ()
                flat = np.zeros((len(lin), self.elements.shape[1]), dtype=np.int64)
                for j in range(r):
                    flat = flat * n + self.elements[idx[j]]
                vals = op.table[flat]
                out[start:start + len(lin)] = lookup[encode(vals, n)]
            if (out < 0).any():
                raise AlgebraError("free algebra is not closed under its operations")
            ops.append(Operation(op.symbol, r, tuple(int(v) for v in out)))
        labels = tuple(format_term(t) if len(format_term(t)) < 60 else f"e{i}"
                       for i, t in enumerate(self.witnesses))
        alg = FiniteAlgebra(name or f"F({self.base.name},{self.rank})", m, tuple(ops), labels)
        cache[key] = alg
        return alg


def _projections(n: int, k: int) -> np.ndarray:
    return np.stack(assignment_columns(n, k)) if k else np.zeros((0, 1), dtype=np.int64)


def _check_free_budget(alg: FiniteAlgebra, k: int, budget: int | None) -> None:
    if k < 1:
        raise AlgebraError("free algebra rank must be at least 1")
    budget = env_budget(FREE_BUDGET) if budget is None else budget
    width = alg.size ** k
    # compare n^(n^k) against the budget without building huge integers
    if width * np.log2(alg.size) > np.log2(budget) + 1e-9 and alg.size > 1:
        raise BudgetExceeded(
            f"free algebra of rank {k} over {alg.name} lives in a power of "
            f"{alg.size}^{width} tuples, above the budget of {budget}")


def free_algebra_waves(alg: FiniteAlgebra, k: int, budget: int | None = None,
                       max_work: int | None = None) -> Iterator[tuple[FreeAlgebra, int]]:
    """Grow ``F(k)`` wave by wave; yields the partial algebra and the first index of the newest wave."""
    _check_free_budget(alg, k, budget)
    gens = _projections(alg.size, k)
    # projections coincide on a one-element base; the first variable names the element
    order: dict[int, int] = {}
    uniq_vars, gen_idx = [], []
    for i, c in enumerate(encode(gens, alg.size)):
        if int(c) not in order:
            order[int(c)] = len(order)
            uniq_vars.append(i)
        gen_idx.append(order[int(c)])
    for elems, prov, start in closure(alg.op_tables, gens, alg.size, max_work=max_work):
        terms = _witness_terms(alg.op_tables, prov, uniq_vars)
        yield FreeAlgebra(alg, k, elems, tuple(terms), tuple(gen_idx)), start


def free_algebra(alg: FiniteAlgebra, k: int, budget: int | None = None) -> FreeAlgebra:
    """``F(k)`` of the variety generated by ``alg``, as term operations on ``alg``."""
    key = ("free", k)
    if key in alg.cache:
        return alg.cache[key]
    last = None
    for last, _ in free_algebra_waves(alg, k, budget):
        pass
    alg.cache[key] = last
    return last


# --------------------------------------------------------------------------- text format

def parse_algebra(text: str) -> FiniteAlgebra:
    """Read the line-oriented ``algebra/size/op`` format."""
    words: list[tuple[str, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        words.extend((w, lineno) for w in line.split())
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(words):
            raise ParseError("unexpected end of algebra description")
        pos += 1
        return words[pos - 1]

    def take_int(what):
        w, line = take()
        try:
            return int(w)
        except ValueError:
            raise ParseError(f"line {line}: expected {what}, found {w!r}") from None

    w, line = take()
    if w != "algebra":
        raise ParseError(f"line {line}: expected 'algebra'")
    name, _ = take()
    w, line = take()
    if w != "size":
        raise ParseError(f"line {line}: expected 'size'")
    n = take_int("size")
    ops = []
    while pos < len(words):
        w, line = take()
        if w != "op":
            raise ParseError(f"line {line}: expected 'op', found {w!r}")
        symbol, _ = take()
        arity = take_int("arity")
        table = tuple(take_int("table entry") for _ in range(n ** arity))
        ops.append(Operation(symbol, arity, table))
    return FiniteAlgebra(name, n, tuple(ops))


def format_algebra(alg: FiniteAlgebra) -> str:
    lines = [f"algebra {alg.name}", f"size {alg.size}"]
    if alg.labels:
        lines.insert(0, "# elements: " + " ".join(f"{i}={lab}" for i, lab in enumerate(alg.labels)))
    for op in alg.ops:
        lines.append(f"op {op.symbol} {op.arity}")
        row = alg.size if op.arity else 1
        for start in range(0, len(op.table), row):
            lines.append(" ".join(str(v) for v in op.table[start:start + row]))
    return "\n".join(lines) + "\n"


def load_algebra(path: str) -> FiniteAlgebra:
    with open(path) as fh:
        return parse_algebra(fh.read())


__all__ = [
    "FiniteAlgebra", "Operation", "Var", "App", "Term", "FreeAlgebra", "Subuniverse",
    "eval_term", "term_table", "equation_holds", "subuniverse_closure", "free_algebra",
    "free_algebra_waves", "parse_term", "format_term", "substitute", "compose", "max_var",
    "term_size", "parse_algebra", "format_algebra", "load_algebra", "decode",
]
