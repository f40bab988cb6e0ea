"""Searching free algebras for term systems, derived terms, and witness chains."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import (App, FiniteAlgebra, FreeAlgebra, Term, Var, eval_term, equation_holds,
                      format_term, free_algebra, free_algebra_waves, max_var, parse_term,
                      substitute, term_table)
from .errors import AlgebraError, PreconditionError
from .relations import BinaryRelation, classify, intersect


@dataclass(frozen=True)
class TermSystemSpec:
    name: str
    unknowns: tuple[tuple[str, int], ...]
    equations: tuple[tuple[Term, Term], ...]
    labels: tuple[str, ...] = ()  # one short name per equation

    def __post_init__(self):
        arities = dict(self.unknowns)
        used = set()

        def walk(t):
            if isinstance(t, App):
                if t.symbol in arities:
                    used.add(t.symbol)
                    if len(t.children) != arities[t.symbol]:
                        raise AlgebraError(f"{t.symbol} has arity {arities[t.symbol]}, "
                                           f"applied to {len(t.children)}")
                for c in t.children:
                    walk(c)

        for lhs, rhs in self.equations:
            walk(lhs)
            walk(rhs)
        missing = [s for s, _ in self.unknowns if s not in used]
        if missing:
            raise AlgebraError(f"unknowns never used: {', '.join(missing)}")


def system(name: str, unknowns: Sequence[tuple[str, int]], equations: Sequence[str]) -> TermSystemSpec:
    """Build a spec from ``"lhs = rhs"`` strings, optionally prefixed ``"label: "``."""
    eqs, labels = [], []
    for i, text in enumerate(equations):
        label, sep, body = text.partition(":")
        if not sep:
            label, body = f"E{i + 1}", text
        lhs, _, rhs = body.partition("=")
        eqs.append((parse_term(lhs.strip()), parse_term(rhs.strip())))
        labels.append(label.strip())
    return TermSystemSpec(name, tuple(unknowns), tuple(eqs), tuple(labels))


def _nu(k: int) -> TermSystemSpec:
    eqs = []
    for i in range(k):
        args = ",".join("y" if j == i else "x" for j in range(k))
        eqs.append(f"N{i + 1}: n({args}) = x")
    return system(f"nu{k}", [("n", k)], eqs)


def _hm(n: int) -> TermSystemSpec:
    m = n - 1
    eqs = ["HM0: x = t1(x,y,y)"]
    eqs += [f"HM{i}: t{i}(x,x,y) = t{i + 1}(x,y,y)" for i in range(1, m)]
    eqs.append(f"HM{m}: t{m}(x,x,y) = y")
    return system(f"hm{n}", [(f"t{i}", 3) for i in range(1, n)], eqs)


_JONSSON = ["JL: x = j1(x,x,z)", "JC: j1(x,z,z) = j2(x,z,z)", "JR: j2(x,x,z) = z",
            "J1: x = j1(x,y,x)", "J2: j2(z,y,z) = z"]

_FIXED = {
    "majority": system("majority", [("m", 3)],
                       ["M1: m(x,x,y) = x", "M2: m(x,y,x) = x", "M3: m(y,x,x) = x"]),
    "maltsev": system("maltsev", [("p", 3)], ["P1: p(x,y,y) = x", "P2: p(x,x,y) = y"]),
    "jonsson3": system("jonsson3", [("j1", 3), ("j2", 3)], _JONSSON),
    "gumm2": system("gumm2", [("j1", 3), ("j2", 3)], _JONSSON[:4]),
    "djonsson2": system("djonsson2", [("d1", 3), ("d2", 3)],
                        ["DL: x = d1(x,x,z)", "DC: d1(x,z,z) = d2(x,x,z)", "DR: d2(x,z,z) = z",
                         "D1: x = d1(x,y,x)", "D2: d2(x,y,x) = x"]),
    # the 5-ary system a tolerance-identity probe extracts; listed for checking, not searching
    "eqw": system("eqw", [("w", 5)],
                  ["A: x = w(x,x,z,x,z)", "B: w(x,x,z,z,x) = z",
                   "C: x = w(x,y,x,y,x)", "D: w(x,y,x,x,y) = x"]),
}

PRESETS = tuple(_FIXED) + ("hmN", "nuK")


def preset(name: str) -> TermSystemSpec:
    if name in _FIXED:
        return _FIXED[name]
    m = re.fullmatch(r"(hm|nu)(\d+)", name)
    if m:
        k = int(m.group(2))
        if m.group(1) == "hm" and k >= 2:
            return _hm(k)
        if m.group(1) == "nu" and k >= 3:
            return _nu(k)
        raise ValueError(f"{name}: hm needs N >= 2 and nu needs K >= 3")
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


# --------------------------------------------------------------------------- instantiation

def expand_unknowns(t: Term, assignment: Mapping[str, Term]) -> Term:
    """Replace every application of an unknown by its assigned term."""
    if isinstance(t, Var):
        return t
    children = tuple(expand_unknowns(c, assignment) for c in t.children)
    if t.symbol in assignment:
        return substitute(assignment[t.symbol], children)
    return App(t.symbol, children)


def check_system(alg: FiniteAlgebra, spec: TermSystemSpec,
                 assignment: Mapping[str, Term]) -> list[tuple[str, bool]]:
    """Per-equation validity of ``spec`` on ``alg`` under ``assignment``."""
    out = []
    for label, (lhs, rhs) in zip(spec.labels, spec.equations):
        out.append((label, equation_holds(alg, expand_unknowns(lhs, assignment),
                                          expand_unknowns(rhs, assignment))))
    return out


def satisfies(alg: FiniteAlgebra, spec: TermSystemSpec, assignment: Mapping[str, Term]) -> bool:
    return all(ok for _, ok in check_system(alg, spec, assignment))


# --------------------------------------------------------------------------- search

@dataclass
class TermSolution:
    spec: TermSystemSpec
    terms: dict[str, Term]
    indices: dict[str, int]  # position of each chosen element in its free algebra
    searched: str  # name of the algebra whose free algebras were searched
    free_sizes: dict[int, int] = field(default_factory=dict)

    def describe(self) -> dict[str, str]:
        return {s: format_term(t) for s, t in self.terms.items()}


@dataclass
class SearchResult:
    """Outcome of a completed search; ``solution`` is ``None`` when no system exists."""
    spec: TermSystemSpec
    solution: TermSolution | None
    searched: str
    free_sizes: dict[int, int]
    candidates: dict[str, int]  # candidates per unknown surviving the single-unknown filters

    @property
    def found(self) -> bool:
        return self.solution is not None


def _equation_vars(lhs: Term, rhs: Term) -> int:
    return max(max_var(lhs), max_var(rhs)) + 1


def _unknowns_in(t: Term, names: set[str]) -> set[str]:
    if isinstance(t, Var):
        return set()
    out = {t.symbol} & names
    for c in t.children:
        out |= _unknowns_in(c, names)
    return out


class _Equation:
    def __init__(self, alg, lhs, rhs, names):
        self.alg = alg
        self.lhs, self.rhs = lhs, rhs
        self.k = _equation_vars(lhs, rhs)
        self.unknowns = _unknowns_in(lhs, names) | _unknowns_in(rhs, names)

    def holds(self, tables: Mapping[str, tuple[int, np.ndarray]]) -> bool:
        left = term_table(self.alg, self.lhs, self.k, unknowns=tables)
        right = term_table(self.alg, self.rhs, self.k, unknowns=tables)
        return bool(np.array_equal(left, right))


def find_term_system(alg: FiniteAlgebra, spec: TermSystemSpec | str, *,
                     budget: int | None = None) -> SearchResult:
    """Exhaustive search for ``spec`` among the term operations of ``alg``.

    Candidates for an unknown of arity ``r`` are the elements of ``F(r)``;
    the lexicographically least tuple of element indices (unknowns in
    declaration order) is returned.  A ``None`` solution means no such terms
    exist in the variety generated by ``alg``.
    """
    if isinstance(spec, str):
        spec = preset(spec)
    names = {s for s, _ in spec.unknowns}
    eqs = [_Equation(alg, l, r, names) for l, r in spec.equations]
    arities = sorted({r for _, r in spec.unknowns})
    free_sizes: dict[int, int] = {}

    if len(spec.unknowns) == 1:
        return _search_single(alg, spec, eqs, budget)

    frees: dict[int, FreeAlgebra] = {r: free_algebra(alg, r, budget) for r in arities}
    free_sizes = {r: f.size for r, f in frees.items()}
    cands: dict[str, list[int]] = {}
    for sym, r in spec.unknowns:
        F = frees[r]
        own = [e for e in eqs if e.unknowns == {sym}]
        cands[sym] = [i for i in range(F.size)
                      if all(e.holds({sym: (r, F.elements[i])}) for e in own)]
    order = [s for s, _ in spec.unknowns]
    arity = dict(spec.unknowns)
    # equations to check once the first i+1 unknowns are fixed
    due = [[e for e in eqs if len(e.unknowns) > 1 and e.unknowns <= set(order[:i + 1])
            and order[i] in e.unknowns] for i in range(len(order))]
    chosen: dict[str, int] = {}
    tables: dict[str, tuple[int, np.ndarray]] = {}

    def go(i: int) -> bool:
        if i == len(order):
            return True
        sym = order[i]
        F = frees[arity[sym]]
        for idx in cands[sym]:
            tables[sym] = (arity[sym], F.elements[idx])
            if all(e.holds(tables) for e in due[i]):
                chosen[sym] = idx
                if go(i + 1):
                    return True
        tables.pop(sym, None)
        return False

    result = SearchResult(spec, None, alg.name, free_sizes, {s: len(c) for s, c in cands.items()})
    if go(0):
        terms = {s: frees[arity[s]].witnesses[chosen[s]] for s in order}
        result.solution = TermSolution(spec, terms, dict(chosen), alg.name, free_sizes)
    return result


def _search_single(alg, spec, eqs, budget) -> SearchResult:
    """One unknown: scan ``F(r)`` wave by wave and stop at the first wave holding a solution."""
    (sym, r), = spec.unknowns
    F = None
    for F, start in free_algebra_waves(alg, r, budget):
        for idx in range(start, F.size):
            tables = {sym: (r, F.elements[idx])}
            if all(e.holds(tables) for e in eqs):
                # F(r) is only partly built here; its size so far is a lower bound
                sol = TermSolution(spec, {sym: F.witnesses[idx]}, {sym: idx}, alg.name,
                                   {r: F.size})
                return SearchResult(spec, sol, alg.name, {r: F.size}, {sym: idx + 1})
    size = F.size if F is not None else 0
    return SearchResult(spec, None, alg.name, {r: size}, {sym: size})


# --------------------------------------------------------------------------- derived terms

_X, _Y, _Z = Var(0), Var(1), Var(2)


def majority_from_w(w: Term) -> Term:
    """``m(x,y,z) = w(w(x,y,z,y,z), w(x,y,z,z,y), y, z, w(x,z,y,y,z))`` for a 5-ary ``w``."""
    if max_var(w) > 4:
        raise AlgebraError("w must be at most 5-ary")
    inner1 = substitute(w, (_X, _Y, _Z, _Y, _Z))
    inner2 = substitute(w, (_X, _Y, _Z, _Z, _Y))
    inner3 = substitute(w, (_X, _Z, _Y, _Y, _Z))
    return substitute(w, (inner1, inner2, _Y, _Z, inner3))


def directed_from_jonsson(j1: Term, j2: Term) -> tuple[Term, Term]:
    """``d1 = j1(j1(x,y,z),y,z)`` and ``d2 = j2(j2(x,z,z), j2(x,y,z), z)``."""
    for t in (j1, j2):
        if max_var(t) > 2:
            raise AlgebraError("Jonsson terms must be at most ternary")
    d1 = substitute(j1, (substitute(j1, (_X, _Y, _Z)), _Y, _Z))
    d2 = substitute(j2, (substitute(j2, (_X, _Z, _Z)), substitute(j2, (_X, _Y, _Z)), _Z))
    return d1, d2


# --------------------------------------------------------------------------- witness chains

@dataclass
class WitnessChain:
    elements: dict[str, int]  # e, f, g, g_bullet
    steps: list[tuple[str, str, str, bool]]  # (left, relation, right, holds)

    @property
    def holds(self) -> bool:
        return all(ok for *_, ok in self.steps)

    def failures(self) -> list[tuple[str, str, str]]:
        return [(l, r, s) for l, r, s, ok in self.steps if not ok]


def witness_chain(alg: FiniteAlgebra, a: int, b: int, c: int, R: BinaryRelation,
                  S: BinaryRelation, T: BinaryRelation, j1: Term, j2: Term) -> WitnessChain:
    """Elements ``e, f, g, g•`` built from ``j1, j2`` on ``a, b, c``, and the relation steps among them."""
    for name, rel in (("R", R), ("S", S), ("T", T)):
        flags = classify(alg, rel)
        if not (flags.reflexive and flags.admissible):
            raise PreconditionError(f"{name} is not a reflexive admissible relation")
    for name, rel, p, q in (("R", R, a, c), ("S", S, a, b), ("T", T, b, c)):
        if (p, q) not in rel:
            raise PreconditionError(f"{name} does not contain the pair {(p, q)}")
    system4 = TermSystemSpec("jonsson-core", (("j1", 3), ("j2", 3)),
                             preset("jonsson3").equations[:4], preset("jonsson3").labels[:4])
    bad = [lab for lab, ok in check_system(alg, system4, {"j1": j1, "j2": j2}) if not ok]
    if bad:
        raise PreconditionError(f"j1, j2 fail {', '.join(bad)} on {alg.name}")
    with_j2 = equation_holds(alg, substitute(j2, (_Z, _Y, _Z)), _Z)

    def J1(p, q, r):
        return eval_term(alg, j1, [p, q, r])

    def J2(p, q, r):
        return eval_term(alg, j2, [p, q, r])

    e = J1(J1(a, b, c), b, c)
    f = J1(J1(a, c, c), c, c)
    g = J2(J2(a, c, c), J2(b, c, c), c)
    gb = J2(J2(a, c, c), J2(a, b, c), c)
    names = {"a": a, "b": b, "c": c, "e": e, "f": f, "g": g, "g*": gb}
    rels = {"R": R, "S": S, "T": T, "RS": intersect(R, S), "RT": intersect(R, T)}
    plan = [("e", "R", "c"), ("f", "R", "c"), ("a", "RS", "e"), ("e", "RT", "f"),
            ("f", "T", "g"), ("g", "S", "c"), ("f", "S", "g*"), ("g*", "T", "c")]
    if with_j2:
        plan += [("f", "R", "g"), ("g", "R", "c"), ("f", "R", "g*"), ("g*", "R", "c")]
    steps = [(l, r, s, (names[l], names[s]) in rels[r]) for l, r, s in plan]
    return WitnessChain({"e": e, "f": f, "g": g, "g_bullet": gb}, steps)


__all__ = [
    "TermSystemSpec", "system", "preset", "PRESETS", "expand_unknowns", "check_system",
    "satisfies", "TermSolution", "SearchResult", "find_term_system", "majority_from_w",
    "directed_from_jonsson", "WitnessChain", "witness_chain",
]
