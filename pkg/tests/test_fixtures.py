import pytest

from relkit.algebra import format_algebra, parse_algebra
from relkit.fixtures import (NAMES, X51, Y51, Z51, build, count_below_any,
                             count_below_some_variable, example51_universe, facts_for,
                             generator_of, verify_paper_suite)
from relkit.relations import classify, enumerate_relations, intersect


def test_every_fixture_builds_and_exports():
    for name in NAMES:
        fx = build(name)
        back = parse_algebra(format_algebra(fx.algebra))
        assert back.ops == fx.algebra.ops
        for r in fx.relations.values():
            assert classify(fx.algebra, r).reflexive
        assert facts_for(name)


def test_example51_universe():
    members = example51_universe()
    assert len(members) == count_below_any([X51, Y51, Z51]) == 15
    assert members == sorted(members)  # integer order of 5-bit codes
    brute = sum(1 for c in range(32) if any(
        all(b <= t for b, t in zip(((c >> (4 - j)) & 1 for j in range(5)), top))
        for top in (X51, Y51, Z51)))
    assert brute == 15


def test_example51_relations():
    fx = build("example51")
    e, r = fx.elements, fx.relations
    ab = intersect(r["alpha"], r["beta"])
    assert set(ab.image(e["x"])) == {e["x"], e["x1"]}
    assert set(ab.image(e["z"])) == {e["z"], e["z1"]}
    assert classify(fx.algebra, r["Psi"]).tolerance and not r["Psi"].is_transitive()
    # gamma separates x from x1 and z from z1, so Theta has no nontrivial pair among them
    pts = [e["x"], e["x1"], e["z"], e["z1"]]
    assert not [(p, q) for p in pts for q in pts if p != q and (p, q) in r["Theta"]]


def test_mitschke_and_unary3():
    fx = build("mitschke_B")
    assert fx.algebra.size == 7 and generator_of(fx).name == "inu2"
    assert len(enumerate_relations(build("unary3").algebra, "congruence")) == 3


def test_boolean_oracle():
    assert count_below_some_variable(2) == 6
    assert count_below_some_variable(3) == 38


@pytest.mark.parametrize("name", ["impl2", "f2", "median2", "unary3"])
def test_quick_suite_per_fixture(name):
    report = verify_paper_suite(name, quick=True)
    assert report.passed, report.lines()


def test_suite_filters_and_unknown():
    report = verify_paper_suite(["unary3"])
    names = [r.name for r in report.results]
    assert "three congruences" in names and "R o R differs from R" in names
    with pytest.raises(KeyError):
        verify_paper_suite("nope")


def test_example51_suite_contains_identity_failure():
    report = verify_paper_suite("example51", quick=True)
    assert report.passed, report.lines()
    assert any("tolerance identity fails" in r.name for r in report.results)
