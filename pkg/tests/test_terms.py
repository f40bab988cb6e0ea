import random

import pytest
from hypothesis import given, settings, strategies as st

from relkit.algebra import FiniteAlgebra, format_term, parse_term
from relkit.errors import AlgebraError, BudgetExceeded, PreconditionError
from relkit.fixtures import build, generator_of
from relkit.relations import BinaryRelation, enumerate_relations, generate
from relkit.terms import (PRESETS, check_system, directed_from_jonsson, find_term_system,
                          majority_from_w, preset, satisfies, system, witness_chain)


def test_presets_shape():
    assert preset("majority").labels == ("M1", "M2", "M3")
    assert [u for u, _ in preset("hm4").unknowns] == ["t1", "t2", "t3"]
    assert len(preset("hm4").equations) == 4
    assert preset("nu5").unknowns == (("n", 5),) and len(preset("nu5").equations) == 5
    assert len(preset("gumm2").equations) == 4
    for name in ("hm1", "nu2", "bogus"):
        with pytest.raises(ValueError):
            preset(name)
    assert "jonsson3" in PRESETS


def test_system_validation():
    with pytest.raises(AlgebraError):
        system("bad", [("p", 3)], ["p(x,y) = x"])
    with pytest.raises(AlgebraError):
        system("bad", [("p", 3), ("q", 2)], ["p(x,y,y) = x"])


def test_given_jonsson_terms_check():
    fx = build("impl2")
    res = check_system(fx.algebra, preset("jonsson3"), {"j1": fx.terms["j1"], "j2": fx.terms["j2"]})
    assert res == [(lab, True) for lab in ("JL", "JC", "JR", "J1", "J2")]
    assert not satisfies(fx.algebra, preset("majority"), {"m": fx.terms["j1"]})


# the matrix of expected answers on the two generating algebras
MATRIX = [
    ("impl2", "jonsson3", True), ("impl2", "gumm2", True), ("impl2", "hm3", True),
    ("impl2", "majority", False), ("impl2", "maltsev", False), ("impl2", "nu4", False),
    ("impl2", "djonsson2", True),
    ("inu2", "jonsson3", True), ("inu2", "majority", False), ("inu2", "maltsev", False),
    ("inu2", "nu4", True),
    ("median2", "majority", True), ("median2", "maltsev", False),
]


@pytest.mark.parametrize("name, spec, expected", MATRIX)
def test_term_matrix(name, spec, expected):
    alg = build(name).algebra
    res = find_term_system(alg, spec)
    assert res.found == expected
    if expected:
        assert satisfies(alg, res.spec, res.solution.terms)


def test_searches_report_free_sizes():
    res = find_term_system(build("impl2").algebra, "majority")
    assert res.free_sizes == {3: 38} and res.solution is None
    res = find_term_system(build("impl2").algebra, "nu4")
    assert res.free_sizes == {4: 942}


def test_search_finds_least_solution():
    res = find_term_system(build("impl2").algebra, "jonsson3")
    assert res.solution.describe() == {"j1": "i(x,i(i(x,y),z))", "j2": "i(z,i(y,x))"}
    res = find_term_system(build("inu2").algebra, "nu4")
    assert res.solution.describe() == {"n": "u(x,y,z,u)"}


def test_maltsev_on_minority():
    xor = FiniteAlgebra.from_function("xor2", 2, [("d", 3, lambda a, b, c: a ^ b ^ c)])
    res = find_term_system(xor, "maltsev")
    assert res.found and res.solution.describe() == {"p": "d(x,y,z)"}
    assert not find_term_system(xor, "majority").found


def test_search_budget():
    z3 = FiniteAlgebra.from_function("z3", 3, [("d", 3, lambda a, b, c: (a - b + c) % 3)])
    with pytest.raises(BudgetExceeded):
        find_term_system(z3, "maltsev")
    with pytest.raises(BudgetExceeded):
        find_term_system(z3, "maltsev", budget=3 ** 27)


def test_searching_the_generator_transfers():
    fx = build("mitschke_B")
    res = find_term_system(generator_of(fx), "jonsson3")
    assert satisfies(fx.algebra, res.spec, res.solution.terms)


def test_majority_from_w_shape():
    w = parse_term("w(x,y,z,u,v)")
    m = majority_from_w(w)
    assert format_term(m) == "w(w(x,y,z,y,z),w(x,y,z,z,y),y,z,w(x,z,y,y,z))"


@pytest.mark.parametrize("name", ["impl2", "inu2", "f2"])
def test_directed_from_jonsson(name):
    alg = build(name).algebra
    sol = find_term_system(alg, "jonsson3").solution
    d1, d2 = directed_from_jonsson(sol.terms["j1"], sol.terms["j2"])
    assert satisfies(alg, preset("djonsson2"), {"d1": d1, "d2": d2})


def test_witness_chain_examples():
    fx = build("example51")
    r, e = fx.relations, fx.elements
    wc = witness_chain(fx.algebra, e["x"], e["y"], e["z"], r["alpha"], r["beta"], r["Theta"],
                       fx.terms["j1"], fx.terms["j2"])
    assert wc.holds and len(wc.steps) == 12 and wc.failures() == []


def test_witness_chain_preconditions():
    fx = build("example51")
    r, e = fx.relations, fx.elements
    j1, j2 = fx.terms["j1"], fx.terms["j2"]
    with pytest.raises(PreconditionError):  # (x, y) is not in Theta
        witness_chain(fx.algebra, e["x"], e["z"], e["y"], r["alpha"], r["beta"], r["Theta"], j1, j2)
    with pytest.raises(PreconditionError):
        witness_chain(fx.algebra, e["x"], e["y"], e["z"], r["alpha"], r["beta"], r["Theta"], j2, j1)
    bad = BinaryRelation.from_pairs(fx.algebra.size, [(e["x"], e["z"])])
    with pytest.raises(PreconditionError):
        witness_chain(fx.algebra, e["x"], e["y"], e["z"], bad, r["beta"], r["Theta"], j1, j2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_witness_chain_always_holds(seed):
    # the chain is forced by the Jonsson equations for any admissible R, S, T
    fx = build("mitschke_B")
    alg = fx.algebra
    rng = random.Random(seed)
    a, b, c = (rng.randrange(7) for _ in range(3))
    R = generate(alg, [(a, c)] + [(rng.randrange(7), rng.randrange(7))], "admissible")
    S = generate(alg, [(a, b)], "admissible")
    T = generate(alg, [(b, c)], "admissible")
    sol = find_term_system(generator_of(fx), "jonsson3").solution
    wc = witness_chain(alg, a, b, c, R, S, T, sol.terms["j1"], sol.terms["j2"])
    assert wc.holds, wc.failures()
