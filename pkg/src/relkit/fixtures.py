"""Built-in algebras, relations and terms, plus the end-to-end verification suite.

Boolean-derived operations are computed from formulas, never typed in as tables.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

from .algebra import FiniteAlgebra, Term, parse_term
from .relations import BinaryRelation, intersect

NAMES = ("impl2", "f2", "inu2", "median2", "unary3", "mitschke_B", "example51")


def implication(x, y):
    """Boolean ``x * y'``."""
    return x & (1 - y)


def f_op(x, y, z):
    """Boolean ``x * (y' + z)``."""
    return x & ((1 - y) | z)


def near_unanimity4(*xs):
    """Product of ``x_i + x_j`` over all unordered pairs of distinct indices."""
    out = 1
    for i, j in itertools.combinations(range(4), 2):
        out &= xs[i] | xs[j]
    return out


def median(x, y, z):
    return (x & y) | (y & z) | (x & z)


def _componentwise(fn, width):
    def op(*args):
        return tuple(fn(*coords) for coords in zip(*args))
    return op


def _bits(code: int, width: int) -> tuple[int, ...]:
    """Bits of ``code``, first coordinate = most significant."""
    return tuple(code >> (width - 1 - j) & 1 for j in range(width))


def boolean_subalgebra(name: str, width: int, members: list[tuple[int, ...]],
                       ops: list[tuple[str, int, Callable]]) -> FiniteAlgebra:
    """Algebra on ``members`` (tuples of bits) with Boolean ops applied componentwise."""
    index = {m: i for i, m in enumerate(members)}
    built = []
    for symbol, arity, fn in ops:
        comp = _componentwise(fn, width)
        table = []
        for args in itertools.product(members, repeat=arity):
            value = comp(*args)
            if value not in index:
                raise ValueError(f"{name} is not closed under {symbol}")
            table.append(index[value])
        built.append((symbol, arity, table))
    from .algebra import Operation
    labels = tuple("(" + ",".join(map(str, m)) + ")" for m in members)
    return FiniteAlgebra(name, len(members),
                         tuple(Operation(s, a, tuple(t)) for s, a, t in built), labels)


@dataclass
class Fact:
    name: str
    anchor: str  # what the fact reproduces, in words
    check: Callable[[], tuple[bool, str]]
    heavy: bool = False


@dataclass
class Fixture:
    name: str
    algebra: FiniteAlgebra
    relations: dict[str, BinaryRelation] = field(default_factory=dict)
    terms: dict[str, Term] = field(default_factory=dict)
    elements: dict[str, int] = field(default_factory=dict)
    # 2-element algebra generating the same variety, used for free-algebra searches
    generator: str | None = None
    facts: list[Fact] = field(default_factory=list)
    note: str = ""


def _impl2() -> Fixture:
    alg = FiniteAlgebra.from_function("impl2", 2, [("i", 2, implication)])
    f = "i(x,i(y,z))"
    terms = {
        "f": parse_term(f),
        "j1": parse_term("i(x,i(i(x,i(y,z)),z))"),  # f(x, f(x,y,z), z)
        "j2": parse_term("i(z,i(y,x))"),  # f(z, y, x)
    }
    return Fixture("impl2", alg, terms=terms)


def _f2() -> Fixture:
    alg = FiniteAlgebra.from_function("f2", 2, [("f", 3, f_op)])
    terms = {"j1": parse_term("f(x,f(x,y,z),z)"), "j2": parse_term("f(z,y,x)"),
             "f": parse_term("f(x,y,z)")}
    return Fixture("f2", alg, terms=terms)


def _inu2() -> Fixture:
    alg = FiniteAlgebra.from_function("inu2", 2, [("i", 2, implication), ("u", 4, near_unanimity4)])
    terms = {"u": parse_term("u(x,y,z,u)"), "j1": parse_term("i(x,i(i(x,i(y,z)),z))"),
             "j2": parse_term("i(z,i(y,x))")}
    return Fixture("inu2", alg, terms=terms)


def _median2() -> Fixture:
    alg = FiniteAlgebra.from_function("median2", 2, [("m", 3, median)])
    return Fixture("median2", alg, terms={"m": parse_term("m(x,y,z)")},
                   note="positive control: a majority algebra")


def _unary3() -> Fixture:
    g = {0: 1, 1: 2, 2: 2}
    alg = FiniteAlgebra.from_function("unary3", 3, [("g", 1, g.__getitem__)])
    R = BinaryRelation.from_pairs(3, [(0, 1), (1, 2)])
    return Fixture("unary3", alg, relations={"R": R})


def _mitschke_b() -> Fixture:
    members = [_bits(c, 3) for c in range(8) if c != 7]
    alg = boolean_subalgebra("mitschke_B", 3, members,
                             [("i", 2, implication), ("u", 4, near_unanimity4)])
    labels = members
    rels = {
        "alpha": BinaryRelation.kernel(labels, lambda t: t[1]),
        "beta": BinaryRelation.kernel(labels, lambda t: t[0]),
        "gamma": BinaryRelation.kernel(labels, lambda t: t[2]),
    }
    elems = {"a": members.index((1, 1, 0)), "b": members.index((1, 0, 1)),
             "c": members.index((0, 1, 1))}
    return Fixture("mitschke_B", alg, relations=rels, elements=elems, generator="inu2",
                   terms=dict(_inu2().terms))


X51 = (1, 1, 1, 0, 0)
Y51 = (1, 0, 0, 1, 0)
Z51 = (0, 1, 0, 1, 1)


def below(a, b) -> bool:
    return all(p <= q for p, q in zip(a, b))


def example51_universe() -> list[tuple[int, ...]]:
    return [t for t in (_bits(c, 5) for c in range(32))
            if below(t, X51) or below(t, Y51) or below(t, Z51)]


def _example51() -> Fixture:
    members = example51_universe()
    alg = boolean_subalgebra("example51", 5, members, [("i", 2, implication)])
    n = len(members)
    alpha = BinaryRelation.kernel(members, lambda t: t[1])
    beta = BinaryRelation.kernel(members, lambda t: (t[0], t[4]))
    gamma = BinaryRelation.kernel(members, lambda t: (t[2], t[3]))

    def in_x(t):
        return below(t, X51)

    def in_yz(t):
        return below(t, Y51) or below(t, Z51)

    psi = BinaryRelation.from_pairs(n, [
        (a, b) for a in range(n) for b in range(n)
        if (in_x(members[a]) and in_x(members[b])) or (in_yz(members[a]) and in_yz(members[b]))])
    theta = intersect(gamma, psi)
    elems = {"x": members.index(X51), "y": members.index(Y51), "z": members.index(Z51),
             "x1": members.index((1, 1, 0, 0, 0)), "z1": members.index((0, 1, 0, 0, 1))}
    return Fixture("example51", alg,
                   relations={"alpha": alpha, "beta": beta, "gamma": gamma, "Psi": psi,
                              "Theta": theta},
                   elements=elems, generator="impl2", terms=dict(_impl2().terms))


_BUILDERS = {
    "impl2": _impl2, "f2": _f2, "inu2": _inu2, "median2": _median2, "unary3": _unary3,
    "mitschke_B": _mitschke_b, "example51": _example51,
}
_CACHE: dict[str, Fixture] = {}


def build(name: str) -> Fixture:
    """Fixture by name; built once per process and shared."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


def generator_of(fx: Fixture) -> FiniteAlgebra:
    return build(fx.generator).algebra if fx.generator else fx.algebra


# --------------------------------------------------------------------------- expected facts

def _term_fact(fixture: str, preset_name: str, expect: bool, anchor: str) -> Fact:
    def check():
        from .terms import find_term_system, satisfies
        fx = build(fixture)
        res = find_term_system(generator_of(fx), preset_name)
        ok = res.found == expect
        detail = f"{'found' if res.found else 'none'} (free sizes {res.free_sizes})"
        if res.found:
            ok = ok and satisfies(fx.algebra, res.spec, res.solution.terms)
            detail += " " + ", ".join(f"{k}={v}" for k, v in res.solution.describe().items())
        return ok, detail
    return Fact(f"{preset_name} {'found' if expect else 'none'}", anchor, check)


def _stmt_fact(fixture: str, text: str, mode: str, expect: bool, anchor: str, *,
               pair: tuple[str, str] | None = None, midpoint: str | None = None,
               name: str | None = None, heavy: bool = False, min_bindings: int = 0) -> Fact:
    def check():
        from .lang import check_statement, parse_statement
        fx = build(fixture)
        stmt = parse_statement(text)
        focus = (fx.elements[pair[0]], fx.elements[pair[1]]) if pair else None
        v = check_statement(fx.algebra, stmt, mode, relations=fx.relations, pair=focus)
        ok = v.holds == expect and v.checked >= min_bindings
        detail = f"{'holds' if v.holds else 'fails'} after {v.checked} bindings"
        if not v.holds:
            cx = v.counterexample
            a, c = cx.pair
            detail += f" at ({fx.algebra.label(a)}, {fx.algebra.label(c)})"
            if midpoint is not None:
                ok = ok and cx.midpoint == (fx.elements[midpoint],)
                detail += f" via {', '.join(fx.algebra.label(b) for b in cx.midpoint)}"
        return ok, detail
    return Fact(name or f"{text} [{mode}]", anchor, check, heavy)


def _fact(name: str, anchor: str, heavy: bool = False):
    def wrap(fn):
        return Fact(name, anchor, fn, heavy)
    return wrap


def _impl2_facts() -> list[Fact]:
    facts = [
        _term_fact("impl2", "jonsson3", True, "implication algebras are 3-distributive"),
        _term_fact("impl2", "gumm2", True, "two Gumm terms exist in the implication variety"),
        _term_fact("impl2", "hm3", True, "implication algebras are 3-permutable"),
        _term_fact("impl2", "majority", False, "implication algebras have no majority term"),
        _term_fact("impl2", "maltsev", False, "implication algebras are not congruence permutable"),
        _term_fact("impl2", "nu4", False, "implication algebras have no near-unanimity term"),
    ]

    @_fact("given j1, j2 are Jonsson terms", "j1 = x(y+z), j2 = z(y'+x) satisfy the Jonsson equations")
    def given():
        from .terms import check_system, preset
        fx = build("impl2")
        res = check_system(fx.algebra, preset("jonsson3"), {"j1": fx.terms["j1"], "j2": fx.terms["j2"]})
        return all(ok for _, ok in res), ", ".join(f"{k}:{ok}" for k, ok in res)

    @_fact("directed terms from j1, j2", "composed d1, d2 are directed Jonsson terms")
    def directed():
        from .terms import directed_from_jonsson, satisfies, preset
        fx = build("impl2")
        d1, d2 = directed_from_jonsson(fx.terms["j1"], fx.terms["j2"])
        return satisfies(fx.algebra, preset("djonsson2"), {"d1": d1, "d2": d2}), "d1, d2 checked"

    @_fact("F(3) size", "free algebra on 3 generators of the implication variety")
    def free3():
        from .algebra import free_algebra
        size = free_algebra(build("impl2").algebra, 3).size
        expected = count_below_some_variable(3)
        return size == expected, f"{size} elements, oracle {expected}"

    @_fact("tolerance probe fails", "no majority term, so the tolerance identity fails in F(3)")
    def probe():
        from .probe import probe_free_identity
        r = probe_free_identity(build("impl2").algebra)
        return not r.success, f"probe {'succeeded' if r.success else 'failed'} on F(3) of size {r.free_size}"

    return facts + [given, directed, free3, probe]


def _f2_facts() -> list[Fact]:
    @_fact("f-reduct Jonsson terms", "j1 = f(x,f(x,y,z),z), j2 = f(z,y,x) on the f-reduct")
    def given():
        from .terms import satisfies, preset
        fx = build("f2")
        ok = satisfies(fx.algebra, preset("jonsson3"), {"j1": fx.terms["j1"], "j2": fx.terms["j2"]})
        return ok, "Jonsson equations checked"

    @_fact("f as an implication term", "f(x,y,z) = i(x,i(y,z)) on the Boolean reduct")
    def as_i():
        from .algebra import term_table
        f = term_table(build("f2").algebra, build("f2").terms["f"], 3)
        g = term_table(build("impl2").algebra, build("impl2").terms["f"], 3)
        return bool((f == g).all()), "tables compared"

    return [given, as_i,
            _term_fact("f2", "jonsson3", True, "the f-reduct is 3-distributive"),
            _term_fact("f2", "majority", False, "the f-reduct has no majority term")]


def _inu2_facts() -> list[Fact]:
    @_fact("tolerance probe fails", "the u-expanded variety has no majority term", heavy=True)
    def probe():
        from .probe import probe_free_identity
        r = probe_free_identity(build("inu2").algebra)
        return not r.success, f"probe {'succeeded' if r.success else 'failed'} on F(3) of size {r.free_size}"

    return [_term_fact("inu2", "nu4", True, "u is a 4-ary near-unanimity term"),
            _term_fact("inu2", "majority", False, "no majority term despite u"),
            _term_fact("inu2", "maltsev", False, "not congruence permutable"),
            _term_fact("inu2", "jonsson3", True, "3-distributive"),
            probe]


def _median2_facts() -> list[Fact]:
    @_fact("tolerance probe succeeds", "majority algebra: probe extracts w and a majority m")
    def probe():
        from .algebra import format_term
        from .probe import probe_free_identity
        r = probe_free_identity(build("median2").algebra)
        return r.success, f"m = {format_term(r.m)}" if r.m is not None else "no terms"

    return [probe, _term_fact("median2", "majority", True, "the median is a majority term")]


def _unary3_facts() -> list[Fact]:
    @_fact("three congruences", "the congruence lattice has 3 elements")
    def count():
        from .relations import enumerate_relations
        return len(enumerate_relations(build("unary3").algebra, "congruence")) == 3, "counted"

    @_fact("congruences permute", "pairwise permutable congruences")
    def permute():
        from .relations import compose, enumerate_relations
        cons = enumerate_relations(build("unary3").algebra, "congruence")
        ok = all(compose(a, b).rows == compose(b, a).rows for a in cons for b in cons)
        return ok, f"{len(cons) ** 2} pairs"

    @_fact("R admissible", "R is reflexive and admissible but not symmetric")
    def admissible():
        from .relations import classify
        fl = classify(build("unary3").algebra, build("unary3").relations["R"])
        return fl.reflexive and fl.admissible and not fl.symmetric, str(fl)

    @_fact("R o R differs from R", "R o R = R fails although congruences permute")
    def square():
        from .relations import compose
        R = build("unary3").relations["R"]
        RR = compose(R, R)
        return RR.rows != R.rows and (0, 2) in RR, "(0,2) in R o R"

    return [count, permute, admissible, square,
            _stmt_fact("unary3", "rel R; R o R <= R", "fixed:R=R", False,
                       "admissible-relation permutability fails on a single algebra",
                       name="R o R <= R fails")]


def _mitschke_facts() -> list[Fact]:
    @_fact("closed under i and u", "B = 2^3 minus (1,1,1) is a subuniverse for i and u")
    def closed():
        fx = build("mitschke_B")
        return fx.algebra.size == 7, f"{fx.algebra.size} elements"

    @_fact("admissible preorders distributive", "preorder lattice of a 3-distributive algebra",
           heavy=False)
    def preorders():
        from .relations import preorder_lattice
        rep = preorder_lattice(build("mitschke_B").algebra)
        return rep.distributive, f"{rep.size} preorders, distributive={rep.distributive}"

    @_fact("witness chain", "elements e, f, g, g* on a, b, c with the kernel congruences")
    def chain():
        from .terms import find_term_system, witness_chain
        fx = build("mitschke_B")
        sol = find_term_system(generator_of(fx), "jonsson3").solution
        r = fx.relations
        e = fx.elements
        wc = witness_chain(fx.algebra, e["a"], e["b"], e["c"], r["alpha"], r["beta"], r["gamma"],
                           sol.terms["j1"], sol.terms["j2"])
        return wc.holds, f"{len(wc.steps)} steps, failures {wc.failures()}"

    two = "cong a,b,c; a&(b o c) <= (a&b) o (a&c)"
    three = "cong a,b,c; a&(b o c) <= (a&b) o (a&c) o (a&b)"
    return [closed,
            _stmt_fact("mitschke_B", two, "fixed:a=alpha,b=beta,c=gamma", False,
                       "not 2-distributive: only (1,1,1) could join a and c",
                       name="2-distributivity fails at (a, c)"),
            _stmt_fact("mitschke_B", two, "exhaustive", False, "not 2-distributive",
                       name="2-distributivity fails over all congruences"),
            _stmt_fact("mitschke_B", three, "exhaustive", True, "3-distributive",
                       name="3-distributivity holds over all congruences"),
            preorders, chain,
            _term_fact("mitschke_B", "nu4", True, "4-ary near-unanimity term"),
            _term_fact("mitschke_B", "majority", False, "no majority term")]


def _example51_facts() -> list[Fact]:
    @_fact("universe size", "elements of 2^5 below x, y or z")
    def size():
        n = build("example51").algebra.size
        expected = count_below_any([X51, Y51, Z51])
        return n == expected, f"{n} elements, inclusion-exclusion {expected}"

    @_fact("Psi is a tolerance", "Psi is a tolerance, not transitive")
    def psi():
        from .relations import classify
        fx = build("example51")
        fl = classify(fx.algebra, fx.relations["Psi"])
        th = classify(fx.algebra, fx.relations["Theta"])
        return fl.tolerance and not fl.transitive and th.tolerance, f"Psi {fl}, Theta {th}"

    @_fact("alpha-beta classes", "x is ab-related only to x1, z only to z1")
    def classes():
        from .relations import intersect
        fx = build("example51")
        ab = intersect(fx.relations["alpha"], fx.relations["beta"])
        e = fx.elements
        ok = (set(ab.image(e["x"])) == {e["x"], e["x1"]}
              and set(ab.image(e["z"])) == {e["z"], e["z1"]})
        return ok, "classes compared"

    @_fact("Theta among x, x1, z, z1", "no Theta pairs among x, x1, z, z1 beyond x-x1 and z-z1")
    def theta():
        # gamma separates x from x1 (3rd coordinate) and z from z1 (4th), so the
        # allowed pairs are in fact absent too; the fact is the upper bound
        fx = build("example51")
        e = fx.elements
        pts = [e["x"], e["x1"], e["z"], e["z1"]]
        T = fx.relations["Theta"]
        got = {(p, q) for p in pts for q in pts if p != q and (p, q) in T}
        allowed = {(e["x"], e["x1"]), (e["x1"], e["x"]), (e["z"], e["z1"]), (e["z1"], e["z"])}
        return got <= allowed, f"{len(got)} nontrivial pairs"

    @_fact("generated tolerance inside Psi", "the tolerance generated by (y, z) lies in Psi")
    def gen_in_psi():
        from .relations import generate
        fx = build("example51")
        T = generate(fx.algebra, [(fx.elements["y"], fx.elements["z"])], "tolerance")
        return T <= fx.relations["Psi"], f"{len(T)} pairs"

    @_fact("witness chain", "elements e, f, g, g* on x, y, z with alpha, beta, Theta")
    def chain():
        from .terms import witness_chain
        fx = build("example51")
        r, e = fx.relations, fx.elements
        wc = witness_chain(fx.algebra, e["x"], e["y"], e["z"], r["alpha"], r["beta"], r["Theta"],
                           fx.terms["j1"], fx.terms["j2"])
        return wc.holds, f"{len(wc.steps)} steps, failures {wc.failures()}"

    ident = "cong a,b; tol T; a & (b o T) <= (a&b) o (a&T) o (a&b)"
    return [size, psi, classes, theta, gen_in_psi,
            _stmt_fact("example51", ident, "fixed:a=alpha,b=beta,T=Theta", False,
                       "the tolerance identity fails at (x, z), witnessed through y",
                       pair=("x", "z"), midpoint="y", name="tolerance identity fails at (x, z)"),
            chain,
            _term_fact("example51", "jonsson3", True, "3-distributive")]


def _identity_suite() -> list[Fact]:
    """Relation identities expected on the 3-distributive, 3-permutable fixtures."""
    from .identities import CD_NP, NPERM, gen_identity
    families = (["dist3-3a", "dist3-3b", "dist3-3c", "gumm-3ga", "gumm-3gb", "gumm-3gc",
                 "cor3-3dd"] + [f"nperm-{x}" for x in NPERM] + [f"cd-np-{x}" for x in CD_NP])
    out = []
    for fixture in ("mitschke_B", "example51"):
        for fam in families:
            text = gen_identity(fam, n=3)
            out.append((fixture, _stmt_fact(fixture, text, "generated:2", True,
                                            f"{fam} at n=3 in a 3-distributive 3-permutable variety",
                                            name=f"{fam} holds [generated:2]", heavy=True,
                                            min_bindings=500)))
    return out


_FACTS = {
    "impl2": _impl2_facts, "f2": _f2_facts, "inu2": _inu2_facts, "median2": _median2_facts,
    "unary3": _unary3_facts, "mitschke_B": _mitschke_facts, "example51": _example51_facts,
}


def facts_for(name: str) -> list[Fact]:
    fx = build(name)
    if not fx.facts:
        fx.facts = _FACTS[name]() + [f for owner, f in _identity_suite() if owner == name]
    return fx.facts


# --------------------------------------------------------------------------- oracles used by facts

def count_below_any(tops: list[tuple[int, ...]]) -> int:
    """Number of bit vectors below at least one of ``tops``, by inclusion-exclusion."""
    total = 0
    for r in range(1, len(tops) + 1):
        for group in itertools.combinations(tops, r):
            meet = [min(bits) for bits in zip(*group)]
            total += (-1) ** (r + 1) * 2 ** sum(meet)
    return total


def count_below_some_variable(k: int) -> int:
    """Number of k-ary Boolean functions f with f <= x_i for some i."""
    count = 0
    for table in range(2 ** (2 ** k)):
        rows = [(table >> (2 ** k - 1 - j)) & 1 for j in range(2 ** k)]
        points = list(itertools.product((0, 1), repeat=k))
        if any(all(v <= p[i] for v, p in zip(rows, points)) for i in range(k)):
            count += 1
    return count


# --------------------------------------------------------------------------- suite

@dataclass
class FactResult:
    fixture: str
    name: str
    anchor: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class SuiteReport:
    results: list[FactResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[FactResult]:
        return [r for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        return [f"{'PASS' if r.passed else 'FAIL'} {r.fixture}: {r.name} -- {r.anchor} "
                f"({r.detail}; {r.seconds:.2f}s)" for r in self.results]


def verify_paper_suite(only: list[str] | str | None = None, *, quick: bool = False) -> SuiteReport:
    """Run the expected facts of every fixture (or those named in ``only``).

    ``quick`` skips the facts marked heavy.
    """
    if isinstance(only, str):
        only = [only]
    names = list(NAMES) if not only else list(only)
    for name in names:
        if name not in _BUILDERS:
            raise KeyError(f"unknown fixture {name!r}")
    results = []
    for name in names:
        for fact in facts_for(name):
            if quick and fact.heavy:
                continue
            start = time.perf_counter()
            try:
                ok, detail = fact.check()
            except Exception as exc:  # a crashing fact is a failed fact
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(FactResult(name, fact.name, fact.anchor, bool(ok), detail,
                                      time.perf_counter() - start))
    return SuiteReport(results)
