"""Free-algebra probe for the tolerance identity ``a&(b o T) <= (a&b) o (a&T) o (a&b)``.

On ``F(3)`` with generators x, y, z take ``a = Cg(x,z)``, ``b = Cg(x,y)`` and
``T`` the tolerance generated by ``(y,z)``.  The pair ``(x,z)`` is always in
the left side (through ``y``).  If it is also in the right side, the chain
``x (a&b) j1 (a&T) j2 (a&b) z`` yields ternary terms ``j1, j2``, and the
derivation of ``(j1, j2)`` in ``T`` yields a 5-ary ``w`` with
``j1 = w(x,y,z,y,z)`` and ``j2 = w(x,y,z,z,y)``.  From ``w`` a majority term
is composed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import App, FiniteAlgebra, Term, Var, equation_holds, free_algebra, substitute
from .lang import Counterexample, Verdict, parse_statement
from .relations import DerivationLog, compose, generate, generated_relation, intersect
from .terms import check_system, majority_from_w, preset

ID_STATEMENT = "cong a,b; tol T; a & (b o T) <= (a&b) o (a&T) o (a&b)"


@dataclass
class ProbeResult:
    success: bool
    free_size: int
    j1: Term | None = None
    j2: Term | None = None
    w: Term | None = None
    m: Term | None = None
    checks: dict[str, bool] = field(default_factory=dict)  # equation label -> holds
    verdict: Verdict | None = None  # on failure: the binding on F(3) and the pair (x, z)


def w_from_log(log: DerivationLog, pair: tuple[int, int], witnesses, seed: tuple[int, int]) -> Term:
    """5-ary term ``w`` with ``w(x,y,z,y,z) = pair[0]`` and ``w(x,y,z,z,y) = pair[1]``.

    ``log`` records the tolerance generated by ``seed = (y, z)`` on ``F(3)``;
    ``witnesses[e]`` is the ternary term of element ``e``.
    """
    memo: dict[tuple[int, int], Term] = {}
    swap = (Var(0), Var(1), Var(2), Var(4), Var(3))

    def go(p):
        if p in memo:
            return memo[p]
        d = log[p]
        if d.kind == "diag":
            out = witnesses[p[0]]
        elif d.kind == "seed":
            if p != seed:
                raise ValueError(f"unexpected seed {p}")
            out = Var(3)
        elif d.kind == "converse":
            out = substitute(go(d.premises[0]), swap)
        elif d.kind == "op":
            out = App(d.symbol, tuple(go(q) for q in d.premises))
        else:
            raise ValueError(f"a tolerance derivation has no {d.kind} steps")
        memo[p] = out
        return out

    return go(pair)


def probe_free_identity(alg: FiniteAlgebra, budget: int | None = None) -> ProbeResult:
    F = free_algebra(alg, 3, budget)
    FA = F.as_algebra()
    x, y, z = F.generator_indices
    alpha = generate(FA, [(x, z)], "congruence")
    beta = generate(FA, [(x, y)], "congruence")
    theta = generate(FA, [(y, z)], "tolerance")
    ab, at = intersect(alpha, beta), intersect(alpha, theta)
    # least j1 with x ab j1 and (j1, z) in at o ab, then least j2
    tail = compose(at, ab)
    j1 = next((e for e in ab.image(x) if (e, z) in tail), None)
    if j1 is None:
        binding = {"a": alpha, "b": beta, "T": theta}
        cx = Counterexample(binding, (x, z), (y,))
        verdict = Verdict(False, cx, mode="free-algebra probe", checked=1, distinct=1)
        return ProbeResult(False, F.size, verdict=verdict)
    j2 = next(e for e in at.image(j1) if (e, z) in ab)
    _, log = generated_relation(FA, [(y, z)], "tolerance")
    w = w_from_log(log, (j1, j2), F.witnesses, (y, z))
    t1, t2 = F.witnesses[j1], F.witnesses[j2]
    checks = {
        "ww-left": equation_holds(alg, substitute(w, (Var(0), Var(1), Var(2), Var(1), Var(2))), t1),
        "ww-right": equation_holds(alg, substitute(w, (Var(0), Var(1), Var(2), Var(2), Var(1))), t2),
    }
    checks.update(check_system(alg, preset("eqw"), {"w": w}))
    m = majority_from_w(w)
    checks.update(check_system(alg, preset("majority"), {"m": m}))
    return ProbeResult(all(checks.values()), F.size, t1, t2, w, m, checks)


def id_statement():
    return parse_statement(ID_STATEMENT)


__all__ = ["ProbeResult", "probe_free_identity", "w_from_log", "ID_STATEMENT", "id_statement"]
