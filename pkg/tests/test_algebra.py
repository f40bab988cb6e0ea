import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relkit.algebra import (App, FiniteAlgebra, Operation, Var, compose, equation_holds,
                            eval_term, format_algebra, format_term, free_algebra, max_var,
                            parse_algebra, parse_term, subuniverse_closure, substitute,
                            term_size, term_table)
from relkit.errors import AlgebraError, BudgetExceeded, ParseError
from relkit.fixtures import build, implication

import oracles


@pytest.fixture
def impl2():
    return FiniteAlgebra.from_function("impl2", 2, [("i", 2, implication)])


def test_tables_last_argument_fastest(impl2):
    # i(x, y) = x y': only i(1, 0) = 1
    assert impl2.op("i").table == (0, 0, 1, 0)
    assert impl2.apply("i", 1, 0) == 1


def test_bad_tables_rejected():
    with pytest.raises(AlgebraError):
        FiniteAlgebra("bad", 2, (Operation("f", 2, (0, 1, 1)),))
    with pytest.raises(AlgebraError):
        FiniteAlgebra("bad", 2, (Operation("f", 1, (0, 2)),))
    with pytest.raises(AlgebraError):
        FiniteAlgebra("bad", 2, (Operation("f", 1, (0, 1)), Operation("f", 1, (1, 0))))


def test_parse_and_format_terms():
    t = parse_term("i(x,i(y,z))")
    assert t == App("i", (Var(0), App("i", (Var(1), Var(2)))))
    assert format_term(t) == "i(x,i(y,z))"
    assert parse_term("f(x3, x0)") == App("f", (Var(3), Var(0)))
    assert term_size(t) == 5 and max_var(t) == 2
    with pytest.raises(ParseError):
        parse_term("i(x,")
    with pytest.raises(ParseError):
        parse_term("i(x,y))")


def test_substitute_and_compose():
    t = parse_term("i(x,y)")
    assert substitute(t, (Var(1), Var(0))) == parse_term("i(y,x)")
    assert compose(t, parse_term("i(x,y)"), Var(2)) == parse_term("i(i(x,y),z)")


def test_eval_matches_table(impl2):
    t = parse_term("i(x,i(y,z))")
    table = term_table(impl2, t, 3)
    for idx, (a, b, c) in enumerate(itertools.product(range(2), repeat=3)):
        assert table[idx] == eval_term(impl2, t, (a, b, c)) == a & (1 - (b & (1 - c)))


def test_equation_holds(impl2):
    # x(y'+z) written two ways
    assert equation_holds(impl2, parse_term("i(x,i(y,z))"), parse_term("i(x,i(y,z))"))
    # both sides are x y
    assert equation_holds(impl2, parse_term("i(x,i(x,y))"), parse_term("i(y,i(y,x))"))
    assert not equation_holds(impl2, parse_term("i(x,y)"), parse_term("i(y,x)"))
    with pytest.raises(AlgebraError):
        term_table(impl2, parse_term("q(x)"), 1)


def test_subuniverse_closure():
    fx = build("mitschke_B")
    e = fx.elements
    sub = subuniverse_closure(fx.algebra, [e["a"], e["b"]])
    for s, w in zip(sub.elements, sub.witnesses):
        assert eval_term(fx.algebra, w, (e["a"], e["b"])) == s
    assert set(sub.elements) >= {e["a"], e["b"]}


@pytest.mark.parametrize("k, expected", [(1, 2), (2, 6), (3, 38)])
def test_free_implication_sizes(impl2, k, expected):
    F = free_algebra(impl2, k)
    assert F.size == expected == oracles.free_algebra_size(impl2, k)


def test_free_witnesses_realise_elements(impl2):
    F = free_algebra(impl2, 3)
    for row, term in zip(F.elements, F.witnesses):
        assert np.array_equal(row, term_table(impl2, term, 3))
    assert [F.witnesses[g] for g in F.generator_indices] == [Var(0), Var(1), Var(2)]


def test_free_as_algebra_is_consistent(impl2):
    F = free_algebra(impl2, 2)
    FA = F.as_algebra()
    for a in range(FA.size):
        for b in range(FA.size):
            expected = [impl2.apply("i", p, q) for p, q in zip(F.elements[a], F.elements[b])]
            assert F.index_of(expected) == FA.apply("i", a, b)


def test_free_budget():
    three = FiniteAlgebra.from_function("m3", 3, [("m", 2, max)])
    with pytest.raises(BudgetExceeded):
        free_algebra(three, 3)
    with pytest.raises(BudgetExceeded):
        free_algebra(three, 2, budget=1000)
    assert free_algebra(three, 2).size == oracles.free_algebra_size(three, 2) == 3


def test_free_budget_from_environment(monkeypatch):
    monkeypatch.setenv("RELKIT_BUDGET", "4")
    alg = FiniteAlgebra.from_function("j2", 2, [("j", 2, max)])
    with pytest.raises(BudgetExceeded):
        free_algebra(alg, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 1), (2, 2), (3, 1)]))
def test_free_sizes_match_oracle(seed, shape):
    n, k = shape
    alg = oracles.random_algebra(random.Random(seed), n=n)
    assert free_algebra(alg, k).size == oracles.free_algebra_size(alg, k)


def test_algebra_text_round_trip():
    fx = build("unary3")
    text = format_algebra(fx.algebra)
    back = parse_algebra(text)
    assert back.size == 3 and back.ops == fx.algebra.ops
    with pytest.raises(ParseError):
        parse_algebra("algebra a\nsize 2\nop f 1\n0")
    with pytest.raises(ParseError):
        parse_algebra("size 2")
