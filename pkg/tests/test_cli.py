import json

import pytest

from relkit.cli import main

TWO_DIST = "cong a,b,c; a&(b o c) <= (a&b) o (a&c)"
ID = "cong a,b; tol T; a & (b o T) <= (a&b) o (a&T) o (a&b)"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_exhaustive_counterexample(capsys):
    code, out, _ = run(capsys, "check", "--algebra", "fixtures:mitschke_B", "--stmt", TWO_DIST,
                       "--mode", "exhaustive")
    assert code == 1
    assert "verdict: fails" in out and f"statement: {TWO_DIST}" in out
    assert out.count("binding: rel") == 3


def test_check_fixed_kernels(capsys):
    code, out, _ = run(capsys, "check", "--algebra", "fixtures:mitschke_B", "--stmt", TWO_DIST,
                       "--mode", "fixed:a=alpha,b=beta,c=gamma")
    assert code == 1 and "pair: ((1,1,0), (0,1,1))" in out


def test_check_holds_default_mode_with_caveat(capsys):
    code, out, _ = run(capsys, "check", "--algebra", "fixtures:mitschke_B", "--family", "dist3(3c)")
    assert code == 0
    assert "caveat:" in out and "holds on tested algebras" in out and "mode: generated:2" in out


def test_check_json_lines_and_pair(capsys):
    code, out, _ = run(capsys, "check", "--algebra", "fixtures:example51", "--stmt", ID,
                       "--mode", "fixed:a=alpha,b=beta,T=Theta", "--pair", "x,z",
                       "--format", "json-lines")
    records = [json.loads(line) for line in out.splitlines()]
    by_key = {r["key"]: r for r in records}
    assert code == 1
    assert by_key["pair"]["value"] == "((1,1,1,0,0), (0,1,0,1,1))"
    assert by_key["midpoint"]["value"] == "(1,0,0,1,0)"


def test_check_from_files(capsys, tmp_path):
    alg = tmp_path / "u3.alg"
    alg.write_text("algebra u3\nsize 3\nop g 1\n1 2 2\n")
    stmt = tmp_path / "s.rid"
    stmt.write_text("# square\nrel R; R o R <= R\n")
    rels = tmp_path / "r.rel"
    rels.write_text("rel R { (0,1) (1,2) }\n")
    code, out, _ = run(capsys, "check", "--algebra", str(alg), "--stmt-file", str(stmt),
                       "--mode", "fixed:R=R", "--relations", str(rels))
    assert code == 1 and "pair: (0, 2)" in out


def test_find_terms(capsys):
    code, out, _ = run(capsys, "find-terms", "--algebra", "fixtures:impl2", "--preset", "majority")
    assert code == 1 and "result: none" in out
    code, out, _ = run(capsys, "find-terms", "--algebra", "fixtures:impl2", "--preset", "jonsson3")
    assert code == 0 and "term: j1 = i(x,i(i(x,y),z))" in out
    code, out, _ = run(capsys, "find-terms", "--algebra", "fixtures:mitschke_B", "--preset", "nu4")
    assert code == 0 and "search: inu2" in out and "verified: True" in out


def test_free_relations_export_gen(capsys):
    code, out, _ = run(capsys, "free", "--algebra", "fixtures:impl2", "--k", "3")
    assert code == 0 and "free: 38" in out
    code, out, _ = run(capsys, "relations", "--algebra", "fixtures:unary3", "--sort", "congruence")
    assert code == 0 and "relations: 3" in out
    code, out, _ = run(capsys, "relations", "--algebra", "fixtures:mitschke_B", "--lattice")
    assert "distributive=True" in out
    code, out, _ = run(capsys, "export", "--algebra", "fixtures:unary3")
    assert code == 0 and out.startswith("algebra unary3") and "rel R { (0,1) (1,2) }" in out
    code, out, _ = run(capsys, "gen-identity", "--family", "nperm-nra(3)")
    assert code == 0 and out.strip() == "rel R; R o R o R <= R o R"


def test_verify_paper_quick(capsys):
    code, out, _ = run(capsys, "verify-paper", "--quick", "--only", "unary3", "example51")
    assert code == 0 and "FAIL" not in out and "summary:" in out


@pytest.mark.parametrize("argv", [
    ["check", "--algebra", "fixtures:nope", "--stmt", "rel R; R <= R"],
    ["check", "--algebra", "/no/such/file", "--stmt", "rel R; R <= R"],
    ["check", "--algebra", "fixtures:impl2", "--stmt", "rel R; R <= S"],
    ["check", "--algebra", "fixtures:impl2"],
    ["check", "--algebra", "fixtures:mitschke_B", "--stmt", TWO_DIST, "--mode", "exhaustive",
     "--budget", "10"],
    ["check", "--algebra", "fixtures:impl2", "--stmt", "rel R; R <= R", "--mode", "bogus"],
    ["find-terms", "--algebra", "fixtures:impl2", "--preset", "bogus"],
    ["gen-identity", "--family", "nperm-nra(1)"],
    ["verify-paper", "--only", "nope"],
    ["bogus"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2
