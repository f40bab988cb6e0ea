"""Semi-naive, wave-ordered closure of coordinate vectors under pointwise operations.

Elements live in ``A^N`` for an ``n``-element base set and are stored as rows
of an ``(m, N)`` integer array.  Each row has an integer code (base-``n``
positional value, first coordinate most significant) so that a flat boolean
array of size ``n**N`` can serve as the membership index.

One call to :func:`expand` performs one breadth-first wave: every basic
operation is applied to every argument tuple drawn from the current elements
that contains at least one element added after ``old``.  New results are
returned in (operation order, lexicographic argument order) with duplicates
removed, which makes element numbering reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import BudgetExceeded

# cap on (argument tuples x coordinates) materialized at once
_CHUNK_CELLS = 1 << 21
# largest ambient power the dense membership bitmap may cover (1 GiB)
MAX_AMBIENT = 1 << 30


@dataclass(frozen=True)
class OpTable:
    symbol: str
    arity: int
    table: np.ndarray  # flat, last argument varying fastest


def weights(n: int, width: int) -> np.ndarray:
    return np.array([n ** (width - 1 - j) for j in range(width)], dtype=np.int64)


def encode(vectors: np.ndarray, n: int) -> np.ndarray:
    return vectors.astype(np.int64) @ weights(n, vectors.shape[1])


def decode(codes: np.ndarray, n: int, width: int) -> np.ndarray:
    out = np.empty((len(codes), width), dtype=np.int64)
    rest = np.asarray(codes, dtype=np.int64).copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % n
        rest //= n
    return out


@dataclass
class Wave:
    vectors: np.ndarray  # (k, N)
    codes: np.ndarray  # (k,)
    provenance: list  # (op position, argument indices)


def expand(ops: list[OpTable], elems: np.ndarray, old: int, n: int,
           seen: np.ndarray, max_work: int | None = None) -> Wave:
    m, width = elems.shape
    w = weights(n, width)
    cand_codes, cand_vecs, cand_op, cand_rank, cand_args = [], [], [], [], []
    work = 0
    for oi, op in enumerate(ops):
        r = op.arity
        if r == 0:
            if old == 0:
                vec = np.full((1, width), int(op.table[0]), dtype=np.int64)
                code = vec @ w
                if not seen[code[0]]:
                    cand_codes.append(code)
                    cand_vecs.append(vec)
                    cand_op.append(np.array([oi]))
                    cand_rank.append(np.array([0], dtype=np.int64))
                    cand_args.append(np.zeros((1, 0), dtype=np.int64))
            continue
        arg_w = [n ** (r - 1 - j) for j in range(r)]
        rank_w = np.array([m ** (r - 1 - j) for j in range(r)], dtype=np.int64)
        for p in range(r):
            ranges = ([np.arange(0, old)] * p + [np.arange(old, m)]
                      + [np.arange(0, m)] * (r - 1 - p))
            shape = tuple(len(x) for x in ranges)
            total = prod(shape)
            if total == 0:
                continue
            work += total
            if max_work is not None and work > max_work:
                raise BudgetExceeded(
                    f"closure wave needs more than {max_work} operation applications")
            step = max(1, _CHUNK_CELLS // max(width, 1))
            for start in range(0, total, step):
                lin = np.arange(start, min(total, start + step), dtype=np.int64)
                idx = np.unravel_index(lin, shape)
                args = np.stack([ranges[j][idx[j]] for j in range(r)], axis=1)
                flat = np.zeros((len(lin), width), dtype=np.int64)
                for j in range(r):
                    flat += elems[args[:, j]] * arg_w[j]
                vals = op.table[flat]
                codes = vals @ w
                fresh = ~seen[codes]
                if not fresh.any():
                    continue
                codes, vals, args = codes[fresh], vals[fresh], args[fresh]
                codes, first = np.unique(codes, return_index=True)
                cand_codes.append(codes)
                cand_vecs.append(vals[first])
                cand_op.append(np.full(len(first), oi))
                cand_rank.append(args[first] @ rank_w)
                cand_args.append(args[first])
    if not cand_codes:
        return Wave(np.zeros((0, width), dtype=np.int64), np.zeros(0, dtype=np.int64), [])
    codes = np.concatenate(cand_codes)
    opi = np.concatenate(cand_op)
    rank = np.concatenate(cand_rank)
    order = np.lexsort((rank, opi))
    codes = codes[order]
    _, first = np.unique(codes, return_index=True)
    keep = order[np.sort(first)]
    vecs_all = np.concatenate(cand_vecs)
    args_all = [a for chunk in cand_args for a in chunk]
    prov = [(int(opi[i]), tuple(int(v) for v in args_all[i])) for i in keep]
    return Wave(vecs_all[keep], np.concatenate(cand_codes)[keep], prov)


def closure(ops: list[OpTable], gens: np.ndarray, n: int, *, max_work: int | None = None):
    """Full closure of the rows of ``gens`` (duplicates dropped, first kept).

    Yields ``(vectors, provenance, wave_start)`` after the generators and after
    every wave, so callers can stop early.  Provenance of a generator is
    ``None``; otherwise ``(op position, argument indices)``.
    """
    width = gens.shape[1]
    if n ** width > MAX_AMBIENT:
        raise BudgetExceeded(f"ambient power {n}^{width} is too large to index")
    seen = np.zeros(n ** width, dtype=bool)
    codes = encode(gens, n) if len(gens) else np.zeros(0, dtype=np.int64)
    keep = []
    for i, c in enumerate(codes):
        if not seen[c]:
            seen[c] = True
            keep.append(i)
    elems = gens[keep].astype(np.int64)
    prov: list = [None] * len(keep)
    old = 0
    yield elems, prov, 0
    while True:
        wave = expand(ops, elems, old, n, seen, max_work)
        if old == 0 and len(elems) == 0 and len(wave.codes) == 0:
            return
        old = len(elems)
        if len(wave.codes) == 0:
            return
        seen[wave.codes] = True
        elems = np.concatenate([elems, wave.vectors])
        prov = prov + wave.provenance
        yield elems, prov, old
