"""Reflexive binary relations as row bitsets, and their generation on finite algebras.

Row ``a`` of a relation is an int whose bit ``b`` is set iff ``(a, b)`` is in
the relation.  Every relation here contains the diagonal.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .closure import OpTable, expand
from .errors import BudgetExceeded, ParseError, PreconditionError

SORTS = ("admissible", "tolerance", "congruence")
ENUM_BUDGET = 100_000

# sort names used by the identity language
SORT_ALIASES = {"rel": "admissible", "tol": "tolerance", "cong": "congruence",
                "admissible": "admissible", "tolerance": "tolerance", "congruence": "congruence"}


def _sort(sort: str) -> str:
    try:
        return SORT_ALIASES[sort]
    except KeyError:
        raise ValueError(f"unknown sort {sort!r}") from None


@dataclass(frozen=True)
class SortFlags:
    reflexive: bool
    admissible: bool
    symmetric: bool
    transitive: bool

    @property
    def tolerance(self) -> bool:
        return self.admissible and self.symmetric

    @property
    def congruence(self) -> bool:
        return self.tolerance and self.transitive

    def has(self, sort: str) -> bool:
        sort = _sort(sort)
        return {"admissible": self.admissible, "tolerance": self.tolerance,
                "congruence": self.congruence}[sort] and self.reflexive


@dataclass(frozen=True)
class BinaryRelation:
    size: int
    rows: tuple[int, ...]
    flags: SortFlags | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.size:
            raise ValueError("one row per element required")

    # construction -------------------------------------------------------
    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> BinaryRelation:
        rows = [1 << a for a in range(n)]
        for a, b in pairs:
            a, b = int(a), int(b)
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"pair {(a, b)} outside a {n}-element universe")
            rows[a] |= 1 << b
        return cls(n, tuple(rows))

    @classmethod
    def diagonal(cls, n: int) -> BinaryRelation:
        return cls.from_pairs(n, ())

    @classmethod
    def full(cls, n: int) -> BinaryRelation:
        return cls(n, ((1 << n) - 1,) * n)

    @classmethod
    def from_matrix(cls, matrix) -> BinaryRelation:
        m = np.asarray(matrix, dtype=bool)
        return cls.from_pairs(m.shape[0], zip(*np.nonzero(m)))

    @classmethod
    def kernel(cls, labels: Sequence, key) -> BinaryRelation:
        """Kernel of ``key`` over elements ``0..len(labels)-1`` (``key`` applied to labels)."""
        vals = [key(x) for x in labels]
        n = len(vals)
        return cls.from_pairs(n, ((a, b) for a in range(n) for b in range(n) if vals[a] == vals[b]))

    def with_flags(self, flags: SortFlags) -> BinaryRelation:
        return BinaryRelation(self.size, self.rows, flags)

    # queries ------------------------------------------------------------
    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.rows[a] >> b & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in range(self.size) if self.rows[a] >> b & 1]

    def nontrivial_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in self.pairs() if a != b]

    def __len__(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def __le__(self, other: BinaryRelation) -> bool:
        _same(self, other)
        return all(r & ~s == 0 for r, s in zip(self.rows, other.rows))

    def __lt__(self, other: BinaryRelation) -> bool:
        return self <= other and self.rows != other.rows

    def image(self, a: int) -> list[int]:
        return [b for b in range(self.size) if self.rows[a] >> b & 1]

    def is_reflexive(self) -> bool:
        return all(r >> a & 1 for a, r in enumerate(self.rows))

    def is_symmetric(self) -> bool:
        return self.rows == converse(self).rows

    def is_transitive(self) -> bool:
        return compose(self, self).rows == self.rows

    def as_int(self) -> int:
        """All ``n*n`` bits packed into one int, row 0 lowest."""
        out = 0
        for a, r in enumerate(self.rows):
            out |= r << (a * self.size)
        return out

    def matrix(self) -> np.ndarray:
        return np.array([[self.rows[a] >> b & 1 for b in range(self.size)]
                         for a in range(self.size)], dtype=bool)

    def __repr__(self):
        return f"BinaryRelation({self.size}, {self.nontrivial_pairs()})"

    # operators -----------------------------------------------------------
    def __matmul__(self, other):
        return compose(self, other)

    def __and__(self, other):
        return intersect(self, other)


def _same(r: BinaryRelation, s: BinaryRelation) -> None:
    if r.size != s.size:
        raise ValueError(f"relations on {r.size} and {s.size} elements")


def compose(r: BinaryRelation, s: BinaryRelation) -> BinaryRelation:
    """``a (r o s) c`` iff ``a r b s c`` for some ``b``."""
    _same(r, s)
    srows = s.rows
    out = []
    for row in r.rows:
        acc = 0
        while row:
            low = row & -row
            acc |= srows[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return BinaryRelation(r.size, tuple(out))


def compose_all(rels: Sequence[BinaryRelation]) -> BinaryRelation:
    out = rels[0]
    for s in rels[1:]:
        out = compose(out, s)
    return out


def intersect(r: BinaryRelation, s: BinaryRelation) -> BinaryRelation:
    _same(r, s)
    return BinaryRelation(r.size, tuple(a & b for a, b in zip(r.rows, s.rows)))


def union_raw(r: BinaryRelation, s: BinaryRelation) -> BinaryRelation:
    """Pointwise union; carries no sort flags since unions need not be admissible."""
    _same(r, s)
    return BinaryRelation(r.size, tuple(a | b for a, b in zip(r.rows, s.rows)))


def converse(r: BinaryRelation) -> BinaryRelation:
    n = r.size
    out = [0] * n
    for a, row in enumerate(r.rows):
        while row:
            low = row & -row
            out[low.bit_length() - 1] |= 1 << a
            row ^= low
    return BinaryRelation(n, tuple(out))


def transitive_closure(r: BinaryRelation) -> BinaryRelation:
    rows = list(r.rows)
    n = r.size
    for k in range(n):
        bit, rk = 1 << k, rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return BinaryRelation(n, tuple(rows))


def power(r: BinaryRelation, m: int) -> BinaryRelation:
    """``m``-fold composition ``r o r o ... o r`` (``m >= 1``)."""
    if m < 1:
        raise ValueError("power needs m >= 1")
    out = r
    for _ in range(m - 1):
        out = compose(out, r)
    return out


# --------------------------------------------------------------------------- derivations

@dataclass(frozen=True)
class Derivation:
    """How one pair entered a generated relation.

    ``kind`` is ``diag``, ``seed``, ``converse`` (of ``premises[0]``),
    ``trans`` (``premises`` are ``(a,b)`` and ``(b,c)``) or ``op`` (``symbol``
    applied componentwise to the ``premises``).
    """
    kind: str
    premises: tuple[tuple[int, int], ...] = ()
    symbol: str | None = None


@dataclass
class DerivationLog:
    size: int
    entries: dict[tuple[int, int], Derivation] = field(default_factory=dict)

    def add(self, pair, derivation) -> None:
        self.entries.setdefault(pair, derivation)

    def __getitem__(self, pair) -> Derivation:
        return self.entries[pair]

    def replay(self, alg: FiniteAlgebra, seeds: Iterable[tuple[int, int]] = ()) -> BinaryRelation:
        """Rebuild the relation from the log, checking each step against its premises."""
        seeds = set(seeds)
        have: set[tuple[int, int]] = set()
        for (a, b), d in self.entries.items():
            if d.kind == "diag":
                ok = a == b
            elif d.kind == "seed":
                ok = (a, b) in seeds or not seeds
            elif d.kind == "converse":
                ok = d.premises[0] == (b, a) and d.premises[0] in have
            elif d.kind == "trans":
                (p, q), (q2, s) = d.premises
                ok = p == a and s == b and q == q2 and all(x in have for x in d.premises)
            elif d.kind == "op":
                ok = (all(x in have for x in d.premises)
                      and alg.apply(d.symbol, *(x for x, _ in d.premises)) == a
                      and alg.apply(d.symbol, *(y for _, y in d.premises)) == b)
            else:
                ok = False
            if not ok:
                raise ValueError(f"derivation of {(a, b)} does not replay: {d}")
            have.add((a, b))
        return BinaryRelation.from_pairs(self.size, have)


# --------------------------------------------------------------------------- generation

def _pairs_closure(alg: FiniteAlgebra, seeds: list[tuple[int, int]], symmetric: bool,
                   log: DerivationLog | None, max_work: int | None = None) -> BinaryRelation:
    """Least reflexive (and optionally symmetric) relation containing ``seeds`` closed under the ops."""
    n = alg.size
    seen = np.zeros(n * n, dtype=bool)
    elems: list[tuple[int, int]] = []

    def push(pair, derivation):
        code = pair[0] * n + pair[1]
        if not seen[code]:
            seen[code] = True
            elems.append(pair)
            if log is not None:
                log.add(pair, derivation)

    for a in range(n):
        push((a, a), Derivation("diag"))
    old = n  # the diagonal is closed under every operation
    for p in seeds:
        push(p, Derivation("seed"))
        if symmetric:
            push((p[1], p[0]), Derivation("converse", (p,)))
    ops = [op for op in alg.op_tables if op.arity > 0]
    while len(elems) > old:
        arr = np.array(elems, dtype=np.int64)
        wave = expand(ops, arr, old, n, seen, max_work)
        old = len(elems)
        for vec, (oi, args) in zip(wave.vectors, wave.provenance):
            pair = (int(vec[0]), int(vec[1]))
            push(pair, Derivation("op", tuple(elems[i] for i in args), ops[oi].symbol))
            if symmetric:
                push((pair[1], pair[0]), Derivation("converse", (pair,)))
    rows = [0] * n
    for a, b in elems:
        rows[a] |= 1 << b
    return BinaryRelation(n, tuple(rows))


def _automaton(alg: FiniteAlgebra, op: OpTable) -> tuple[list[np.ndarray], np.ndarray]:
    """Transitions between distinct partial applications of ``op``.

    Level ``j`` states are the distinct functions ``op(a1..aj, -)``;
    ``delta[j][state, a]`` is the level ``j+1`` state after fixing one more
    argument, and ``values[state]`` reads the result at the last level.
    """
    key = ("automaton", op.symbol)
    if key in alg.cache:
        return alg.cache[key]
    n, r = alg.size, op.arity
    ids = []
    for j in range(r + 1):
        rows = op.table.reshape(n ** j, n ** (r - j))
        _, inverse = np.unique(rows, axis=0, return_inverse=True)
        ids.append(inverse.reshape(-1))
    delta = []
    for j in range(r):
        d = np.zeros((ids[j].max() + 1, n), dtype=np.int64)
        child = ids[j + 1].reshape(n ** j, n)
        d[ids[j]] = child
        delta.append(d)
    values = np.zeros(ids[r].max() + 1, dtype=np.int64)
    values[ids[r]] = op.table
    alg.cache[key] = (delta, values)
    return delta, values


def _apply_op(alg: FiniteAlgebra, op: OpTable, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Codes ``u*n+v`` of all ``(op(a..), op(b..))`` with every ``(a_i, b_i)`` among the given pairs."""
    delta, values = _automaton(alg, op)
    p = np.zeros(1, dtype=np.int64)
    q = np.zeros(1, dtype=np.int64)
    step = max(1, (1 << 22) // max(1, len(left)))
    for d in delta:
        base = int(d.max()) + 1
        parts = []
        for start in range(0, len(p), step):
            ps, qs = p[start:start + step], q[start:start + step]
            parts.append(np.unique(d[ps[:, None], left[None, :]].reshape(-1) * base
                                   + d[qs[:, None], right[None, :]].reshape(-1)))
        codes = np.unique(np.concatenate(parts))
        p, q = codes // base, codes % base
    return values[p] * alg.size + values[q]


def _sweep_closure(alg: FiniteAlgebra, seeds: list[tuple[int, int]], symmetric: bool) -> BinaryRelation:
    """Same relation as :func:`_pairs_closure`, by repeated whole-relation application."""
    n = alg.size
    have = np.zeros(n * n, dtype=bool)
    have[np.arange(n) * (n + 1)] = True
    for a, b in seeds:
        have[a * n + b] = True
        if symmetric:
            have[b * n + a] = True
    ops = [op for op in alg.op_tables if op.arity > 0]
    while True:
        codes = np.nonzero(have)[0]
        left, right = codes // n, codes % n
        before = int(have.sum())
        for op in ops:
            have[_apply_op(alg, op, left, right)] = True
        if symmetric:
            m = have.reshape(n, n)
            have = (m | m.T).reshape(-1)
        if int(have.sum()) == before:
            break
    return BinaryRelation.from_matrix(have.reshape(n, n))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _congruence(alg: FiniteAlgebra, seeds: list[tuple[int, int]],
                log: DerivationLog | None) -> BinaryRelation:
    """Congruence generated by ``seeds``: union-find closed under basic translations.

    Only pairs that merge two classes are pushed through the translations;
    every other pair is already a chain of such edges, and translations map
    chains to chains.
    """
    n = alg.size
    uf = _UnionFind(n)
    edges: list[tuple[tuple[int, int], Derivation]] = []
    work: list[tuple[int, int]] = []
    for a, b in seeds:
        if uf.union(a, b):
            edges.append(((a, b), Derivation("seed")))
            work.append((a, b))
    shaped = [(op.symbol, op.arity, op.table.reshape((n,) * op.arity))
              for op in alg.op_tables if op.arity > 0]
    while work:
        a, b = work.pop(0)
        for symbol, r, table in shaped:
            for j in range(r):
                ta = np.take(table, a, axis=j).reshape(-1)
                tb = np.take(table, b, axis=j).reshape(-1)
                labels = np.array([uf.find(x) for x in range(n)])
                diff = np.nonzero(labels[ta] != labels[tb])[0]
                for pos in diff:
                    u, v = int(ta[pos]), int(tb[pos])
                    if uf.union(u, v):
                        ctx = np.unravel_index(int(pos), (n,) * (r - 1)) if r > 1 else ()
                        ctx = [int(c) for c in ctx]
                        args = [(c, c) for c in ctx[:j]] + [(a, b)] + [(c, c) for c in ctx[j:]]
                        edges.append(((u, v), Derivation("op", tuple(args), symbol)))
                        work.append((u, v))
    classes: dict[int, int] = {}
    for x in range(n):
        classes[uf.find(x)] = classes.get(uf.find(x), 0) | 1 << x
    rel = BinaryRelation(n, tuple(classes[uf.find(x)] for x in range(n)))
    if log is not None:
        _log_equivalence(n, edges, log)
    return rel


def _log_equivalence(n: int, edges, log: DerivationLog) -> None:
    """Log the equivalence closure of ``edges`` with converse/transitivity steps."""
    for a in range(n):
        log.add((a, a), Derivation("diag"))
    rows = [1 << a for a in range(n)]

    def put(pair, d):
        if not rows[pair[0]] >> pair[1] & 1:
            rows[pair[0]] |= 1 << pair[1]
            log.add(pair, d)

    for pair, d in edges:
        put(pair, d)
        put((pair[1], pair[0]), Derivation("converse", (pair,)))
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(n):
                if a == b or not rows[a] >> b & 1:
                    continue
                extra = rows[b] & ~rows[a]
                while extra:
                    low = extra & -extra
                    c = low.bit_length() - 1
                    put((a, c), Derivation("trans", ((a, b), (b, c))))
                    extra ^= low
                    changed = True


def _flags_for(sort: str) -> SortFlags:
    return SortFlags(True, True, sort != "admissible", sort == "congruence")


def _clean_seeds(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for a, b in pairs:
        if not (0 <= a < alg.size and 0 <= b < alg.size):
            raise PreconditionError(f"pair {(a, b)} outside the universe of {alg.name}")
        if a != b and (a, b) not in out:
            out.append((int(a), int(b)))
    return out


def generate(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]], sort: str,
             max_work: int | None = None) -> BinaryRelation:
    """Least relation of ``sort`` containing ``pairs`` (no derivation log)."""
    sort = _sort(sort)
    seeds = _clean_seeds(alg, pairs)
    if sort == "congruence":
        rel = _congruence(alg, seeds, None)
    else:
        rel = _sweep_closure(alg, seeds, sort == "tolerance")
    return rel.with_flags(_flags_for(sort))


def generated_relation(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]], sort: str,
                       max_work: int | None = None) -> tuple[BinaryRelation, DerivationLog]:
    """Least relation of ``sort`` containing ``pairs``, with the first derivation of every pair."""
    sort = _sort(sort)
    seeds = _clean_seeds(alg, pairs)
    log = DerivationLog(alg.size)
    if sort == "congruence":
        rel = _congruence(alg, seeds, log)
    else:
        rel = _pairs_closure(alg, seeds, sort == "tolerance", log, max_work)
    return rel.with_flags(_flags_for(sort)), log


def admissible_closure(alg: FiniteAlgebra, r: BinaryRelation) -> BinaryRelation:
    if not r.is_reflexive():
        raise PreconditionError("admissible_closure expects a reflexive relation")
    return generate(alg, r.nontrivial_pairs(), "admissible")


def is_admissible(alg: FiniteAlgebra, r: BinaryRelation) -> bool:
    pairs = np.array(r.pairs(), dtype=np.int64)
    seen = np.zeros(r.size * r.size, dtype=bool)
    seen[pairs[:, 0] * r.size + pairs[:, 1]] = True
    ops = [op for op in alg.op_tables if op.arity > 0]
    for op in alg.op_tables:
        if op.arity == 0 and not r.rows[op.table[0]] >> int(op.table[0]) & 1:
            return False
    return len(expand(ops, pairs, 0, r.size, seen).codes) == 0


def classify(alg: FiniteAlgebra, r: BinaryRelation) -> SortFlags:
    if r.size != alg.size:
        raise ValueError("relation and algebra sizes differ")
    return SortFlags(r.is_reflexive(), is_admissible(alg, r), r.is_symmetric(), r.is_transitive())


def verified(alg: FiniteAlgebra, r: BinaryRelation) -> BinaryRelation:
    return r if r.flags is not None else r.with_flags(classify(alg, r))


# --------------------------------------------------------------------------- enumeration

def seed_pairs(n: int, sort: str) -> list[tuple[int, int]]:
    """Off-diagonal pairs worth seeding with; symmetric sorts need only ``a < b``."""
    if _sort(sort) == "admissible":
        return [(a, b) for a in range(n) for b in range(n) if a != b]
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def principal_relations(alg: FiniteAlgebra, sort: str) -> dict[tuple[int, int], BinaryRelation]:
    sort = _sort(sort)
    key = ("principal", sort)
    if key not in alg.cache:
        alg.cache[key] = {p: generate(alg, [p], sort) for p in seed_pairs(alg.size, sort)}
    return alg.cache[key]


def join(alg: FiniteAlgebra, r: BinaryRelation, s: BinaryRelation, sort: str) -> BinaryRelation:
    """Least relation of ``sort`` containing both."""
    if r <= s:
        return s
    if s <= r:
        return r
    return generate(alg, union_raw(r, s).nontrivial_pairs(), sort)


def _join_closure(principals: list[BinaryRelation], bottom: BinaryRelation, joiner,
                  budget: int) -> list[BinaryRelation]:
    family = {bottom.rows: bottom}
    queue = [bottom]
    while queue:
        r = queue.pop(0)
        for p in principals:
            if p <= r:
                continue
            j = joiner(r, p)
            if j.rows not in family:
                family[j.rows] = j
                queue.append(j)
                if len(family) > budget:
                    raise BudgetExceeded(f"more than {budget} relations in the family")
    return sorted(family.values(), key=lambda x: (len(x), x.rows))


def enumerate_relations(alg: FiniteAlgebra, sort: str, budget: int = ENUM_BUDGET) -> list[BinaryRelation]:
    """All reflexive relations of ``sort``: the join-closure of the principal ones."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    sort = _sort(sort)
    key = ("enum", sort)
    if key in alg.cache:
        if len(alg.cache[key]) > budget:
            raise BudgetExceeded(f"more than {budget} relations in the family")
        return alg.cache[key]
    principals = list({r.rows: r for r in principal_relations(alg, sort).values()}.values())
    bottom = BinaryRelation.diagonal(alg.size).with_flags(SortFlags(True, True, True, True))
    out = _join_closure(principals, bottom, lambda r, s: join(alg, r, s, sort), budget)
    alg.cache[key] = out
    return out


@dataclass
class LatticeReport:
    elements: list[BinaryRelation]
    distributive: bool
    modular: bool
    failure: tuple | None = None  # first failing triple of indices, if any

    @property
    def size(self) -> int:
        return len(self.elements)


def lattice_tables(elements: list[BinaryRelation]) -> tuple[np.ndarray, np.ndarray]:
    """Join and meet tables of a family closed under intersection with a top element."""
    codes = [r.as_int() for r in elements]
    index = {c: i for i, c in enumerate(codes)}
    L = len(elements)
    meet = np.empty((L, L), dtype=np.int64)
    for i in range(L):
        for j in range(L):
            meet[i, j] = index[codes[i] & codes[j]]
    leq = np.array([[codes[i] & ~codes[j] == 0 for j in range(L)] for i in range(L)], dtype=bool)
    sizes = np.array([len(r) for r in elements], dtype=np.int64)
    big = sizes.max() + 1
    join_t = np.empty((L, L), dtype=np.int64)
    for i in range(L):
        ub = leq[i][None, :] & leq  # ub[j, z]: z above both i and j
        join_t[i] = np.argmin(np.where(ub, sizes[None, :], big), axis=1)
    return join_t, meet


def check_lattice(elements: list[BinaryRelation]) -> LatticeReport:
    J, M = lattice_tables(elements)
    L = len(elements)
    leq = M == np.arange(L)[:, None]
    failure = None
    modular = True
    for x in range(L):
        # x ^ (y v z) = (x ^ y) v (x ^ z)
        bad = np.argwhere(M[x][J] != J[M[x][:, None], M[x][None, :]])
        if failure is None and len(bad):
            failure = (x, int(bad[0][0]), int(bad[0][1]))
        # x <= z implies x v (y ^ z) = (x v y) ^ z
        if modular:
            lhs = J[x][M]
            rhs = M[J[x][:, None], np.arange(L)[None, :]]
            if ((lhs != rhs) & leq[x][None, :]).any():
                modular = False
    return LatticeReport(elements, failure is None, modular, failure)


def preorder_lattice(alg: FiniteAlgebra, budget: int = ENUM_BUDGET) -> LatticeReport:
    """Lattice of admissible preorders, checked for distributivity and modularity."""
    if budget <= 0:
        raise ValueError("budget must be positive")

    def close(pairs):
        return transitive_closure(generate(alg, pairs, "admissible"))

    principals = list({r.rows: r for r in
                       (close([p]) for p in seed_pairs(alg.size, "admissible"))}.values())

    def joiner(r, s):
        return close(union_raw(r, s).nontrivial_pairs())

    elements = _join_closure(principals, BinaryRelation.diagonal(alg.size), joiner, budget)
    return check_lattice(elements)


# --------------------------------------------------------------------------- literals

_LITERAL = re.compile(r"rel\s+([A-Za-z_][A-Za-z0-9_]*)\s*\{([^}]*)\}")
_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def format_relation(name: str, r: BinaryRelation) -> str:
    body = " ".join(f"({a},{b})" for a, b in r.nontrivial_pairs())
    return f"rel {name} {{ {body} }}" if body else f"rel {name} {{ }}"


def parse_relations(text: str, n: int) -> dict[str, BinaryRelation]:
    """Parse one or more ``rel <name> { (a,b) ... }`` literals (diagonal implicit)."""
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    text = "\n".join(lines)
    out = {}
    end = 0
    for m in _LITERAL.finditer(text):
        if text[end:m.start()].strip():
            raise ParseError(f"unexpected text {text[end:m.start()].strip()!r}", end)
        body = m.group(2)
        leftovers = _PAIR.sub("", body).strip()
        if leftovers:
            raise ParseError(f"malformed pair list in relation {m.group(1)}", m.start(2))
        pairs = [(int(a), int(b)) for a, b in _PAIR.findall(body)]
        out[m.group(1)] = BinaryRelation.from_pairs(n, pairs)
        end = m.end()
    if text[end:].strip():
        raise ParseError(f"unexpected text {text[end:].strip()!r}", end)
    return out


__all__ = [
    "BinaryRelation", "SortFlags", "Derivation", "DerivationLog", "compose", "compose_all",
    "intersect", "union_raw", "converse", "transitive_closure", "power", "generate",
    "generated_relation", "admissible_closure", "classify", "enumerate_relations",
    "preorder_lattice", "LatticeReport", "format_relation", "parse_relations", "join",
    "seed_pairs", "principal_relations", "verified", "SORTS", "check_lattice",
]
