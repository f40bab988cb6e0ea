"""Slow, obviously-correct reference implementations the fast code is checked against."""

import itertools
import random

from relkit.algebra import FiniteAlgebra, Operation


def random_algebra(rng: random.Random, n: int | None = None, max_ops: int = 2,
                   arities=(1, 2)) -> FiniteAlgebra:
    n = n or rng.randint(1, 3)
    ops = []
    for i in range(rng.randint(1, max_ops)):
        arity = rng.choice(arities)
        ops.append(Operation(f"f{i}", arity, tuple(rng.randrange(n) for _ in range(n ** arity))))
    return FiniteAlgebra(f"rand{n}", n, tuple(ops))


def apply(alg, symbol, args):
    return alg.apply(symbol, *args)


def compose(n, r, s):
    return {(a, c) for a, b in r for b2, c in s if b == b2}


def warshall(n, r):
    m = [[(a, b) in r for b in range(n)] for a in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                m[i][j] = m[i][j] or (m[i][k] and m[k][j])
    return {(i, j) for i in range(n) for j in range(n) if m[i][j]}


def is_admissible(alg, r):
    for op in alg.ops:
        for choice in itertools.product(sorted(r), repeat=op.arity):
            left = alg.apply(op.symbol, *(p[0] for p in choice))
            right = alg.apply(op.symbol, *(p[1] for p in choice))
            if (left, right) not in r:
                return False
    return True


def has_sort(alg, r, sort):
    n = alg.size
    if any((a, a) not in r for a in range(n)) or not is_admissible(alg, r):
        return False
    if sort in ("tolerance", "congruence") and any((b, a) not in r for a, b in r):
        return False
    if sort == "congruence" and compose(n, r, r) - r:
        return False
    return True


def all_relations(alg, sort):
    """Every reflexive relation of ``sort``, by filtering all reflexive matrices."""
    n = alg.size
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for mask in range(1 << len(off)):
        r = {(a, a) for a in range(n)} | {p for i, p in enumerate(off) if mask >> i & 1}
        if has_sort(alg, r, sort):
            out.append(frozenset(r))
    return out


def generated(alg, seeds, sort):
    """Least relation of ``sort`` containing ``seeds``: smallest member of the filtered family."""
    seeds = set(seeds)
    return min((r for r in all_relations(alg, sort) if seeds <= r), key=len)


def fixpoint_generated(alg, seeds, sort):
    """The same, by naive fixpoint iteration (usable beyond n = 3)."""
    n = alg.size
    r = {(a, a) for a in range(n)} | set(seeds)
    while True:
        new = set(r)
        for op in alg.ops:
            for choice in itertools.product(sorted(r), repeat=op.arity):
                new.add((alg.apply(op.symbol, *(p[0] for p in choice)),
                         alg.apply(op.symbol, *(p[1] for p in choice))))
        if sort in ("tolerance", "congruence"):
            new |= {(b, a) for a, b in new}
        if sort == "congruence":
            new |= compose(n, new, new)
        if new == r:
            return r
        r = new


def free_algebra_size(alg, k):
    """Number of k-ary term operations: close the projections under the operations."""
    points = list(itertools.product(range(alg.size), repeat=k))
    funcs = {tuple(p[i] for p in points) for i in range(k)}
    while True:
        new = set(funcs)
        for op in alg.ops:
            for args in itertools.product(sorted(funcs), repeat=op.arity):
                new.add(tuple(alg.apply(op.symbol, *(f[j] for f in args))
                              for j in range(len(points))))
        if new == funcs:
            return len(funcs)
        funcs = new


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def congruences_by_partitions(alg):
    """Congruences as the compatible partitions among all Bell(n) partitions.

    An equivalence is compatible iff each operation preserves it in each
    argument separately, which keeps the scan cheap.
    """
    out = []
    n = alg.size
    for part in set_partitions(list(range(n))):
        block = {a: i for i, b in enumerate(part) for a in b}
        if all(block[alg.apply(op.symbol, *rest[:i], a, *rest[i:])]
               == block[alg.apply(op.symbol, *rest[:i], b, *rest[i:])]
               for op in alg.ops for i in range(op.arity)
               for rest in itertools.product(range(n), repeat=op.arity - 1)
               for a in range(n) for b in range(a + 1, n) if block[a] == block[b]):
            out.append(frozenset((a, b) for a in range(n) for b in range(n) if block[a] == block[b]))
    return out


def as_set(rel):
    return frozenset(rel.pairs())
