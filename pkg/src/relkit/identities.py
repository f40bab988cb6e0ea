"""Fully expanded statements for the parameterized identity families.

Variable naming: congruences a, b, c; tolerance Th; reflexive admissible
relations R, S, T, V, W and R1..Rn.  A run written "with m factors" counts
compound factors as one, so it has m-1 occurrences of ``o``.
"""

from __future__ import annotations

import re

from .lang import parse_statement


def run(pattern: list[str], m: int) -> str:
    """``m`` factors cycling through ``pattern``, joined by ``o``."""
    return " o ".join(pattern[i % len(pattern)] for i in range(m))


def _decls(*groups: tuple[str, list[str]]) -> str:
    return " ".join(f"{sort} {','.join(names)};" for sort, names in groups if names)


def _paren(x: str) -> str:
    return x if re.fullmatch(r"[A-Za-z0-9_]+", x) else f"({x})"


def meet(a: str, b: str) -> str:
    return f"({a}&{_paren(b)})"


ZIGZAG = ["S", "T", "T", "S"]  # S o T o T o S o S o T ...
ZAGZIG = ["T", "S", "S", "T"]


def jonsson(n: int) -> str:
    return f"{_decls(('cong', ['a', 'b', 'c']))} a&(b o c) <= {run(['(a&b)', '(a&c)'], n)}"


def distrib_jr(k: int) -> str:
    return (f"{_decls(('cong', ['a']), ('rel', ['S', 'T']))} "
            f"a&(S o T) <= {run(['(a&S)', '(a&T)'], k)}")


def _nperm(kind: str, n: int) -> str:
    rel_st = _decls(("rel", ["S", "T"]))
    if kind == "ne":
        names = [f"R{i}" for i in range(1, n + 1)]
        rhs = " o ".join(f"gen({names[i]}|{names[i + 1]})" for i in range(n - 1))
        return f"{_decls(('rel', names))} {' o '.join(names)} <= {rhs}"
    if kind == "nra":
        return f"{_decls(('rel', ['R']))} {run(['R'], n)} <= {run(['R'], n - 1)}"
    if kind == "nr":
        return f"{_decls(('rel', ['R']))} R* = {run(['R'], n - 1)}"
    if kind == "nrr":
        return f"{rel_st} (S o T)* = {run(['S', 'T'], 2 * n - 2)}"
    if kind == "nrrr":
        return f"{rel_st} (S o T)* = {run(ZIGZAG, 2 * n - 2)}"
    if kind == "nrrrr":
        return f"{rel_st} {run(ZIGZAG, 2 * n - 2)} = {run(ZAGZIG, 2 * n - 2)}"
    if kind == "nrup":
        return f"{rel_st} {run(['S', 'T'], 2 * n - 1)} <= {run(['T', 'S'], 2 * n - 2)}"
    if kind == "nrupp":
        return f"{rel_st} {run(['S', 'T'], 2 * n - 1)} = {run(['T', 'S'], 2 * n - 1)}"
    raise ValueError(f"unknown nperm identity {kind!r}")


def _cd_np(kind: str, n: int) -> str:
    m = 2 * n - 2
    tol = _decls(("tol", ["Th"]), ("rel", ["S", "T"]))
    cong = _decls(("cong", ["a"]), ("rel", ["S", "T"]))
    if kind == "anrr":
        return f"{tol} (Th&(S o T)*)* = {run(['(Th&S)', '(Th&T)'], m)}"
    if kind == "anrrr":
        return f"{tol} (Th&(S o T)*)* = {run([meet('Th', x) for x in ZIGZAG], m)}"
    if kind == "anrrrrtol":
        return (f"{tol} Th&({run(ZIGZAG, m)}) <= "
                f"{run([meet('Th', x) for x in ZAGZIG], m)}")
    if kind == "anrrrrcon":
        return (f"{cong} a&({run(ZIGZAG, m)}) = "
                f"{run([meet('a', x) for x in ZAGZIG], m)}")
    if kind == "anrupp":
        return (f"{cong} a&({run(['S', 'T'], 2 * n - 1)}) = "
                f"{run(['(a&T)', '(a&S)'], 2 * n - 1)}")
    raise ValueError(f"unknown cd-np identity {kind!r}")


def _cm_np(kind: str, n: int) -> str:
    m = 2 * n - 2
    cong_st = _decls(("cong", ["a"]), ("rel", ["S", "T"]))
    if kind == "nram":
        return (f"{_decls(('tol', ['Th']), ('rel', ['R']))} "
                f"Th&({run(['R'], n)}) <= {run(['(Th&R)'], n - 1)}")
    if kind == "nrm":
        return f"{_decls(('cong', ['a']), ('rel', ['R']))} a&R* = {run(['(a&R)'], n - 1)}"
    if kind == "nrrm":
        return f"{cong_st} a&(S o (a&T))* = {run(['(a&S)', '(a&T)'], m)}"
    if kind == "nrrrm":
        return f"{cong_st} a&(S o (a&T))* = {run([meet('a', x) for x in ZIGZAG], m)}"
    if kind == "nruppm":
        return (f"{cong_st} a&({run(['S', '(a&T)'], 2 * n - 1)}) = "
                f"{run(['(a&T)', '(a&S)'], 2 * n - 1)}")
    raise ValueError(f"unknown cm-np identity {kind!r}")


_GUMM = {
    "3ga": "rel R,S,T,W; (R&(S o T)) o (R&W) <= (R&S) o (R&T) o (R&gen(S|T|W))",
    "3gb": "rel R,S,T,W; (R&(S o (R&T))) o (R&W) <= (R&S) o (R&T) o (R&T) o (R&gen(S|W))",
    "3gc": "rel R,S,T,W; (R&((R&S) o T)) o (R&W) <= (R&S) o (R&T) o (R&S) o (R&gen(T|W))",
}

_DIST3 = {
    "3b": "rel R,S,T; R&(S o T) <= (R&S) o (R&T) o (R&T) o (R&S)",
    "3a": "rel R,S,T; R&(S o T) <= (R&S) o (R&T) o (R&S) o (R&T)",
    "3c": "rel R,S; cong c; R&(S o c) <= (R&S) o (R&c) o (R&S)",
}

_COR3 = {
    "3aa": "rel R,S,T; R*&(S o T)* = ((R&S) o (R&T))*",
    "3bb": "rel R,V,S,T; (R o V)*&(S o T)* = ((R&S) o (R&T) o (V&S) o (V&T))*",
    "3cc": "rel R,S,T; R*&(S o T)* = ((R&S) o (R&T))* o (R&gen(S|T))",
    "3ccb": "rel R,S,T; R*&((R&S) o T)* = ((R&S) o (R&T))*",
    "3dd": "rel R,S; R*&S* = (R&S)*",
}

NPERM = ("ne", "nra", "nr", "nrr", "nrrr", "nrrrr", "nrup", "nrupp")
CD_NP = ("anrr", "anrrr", "anrrrrtol", "anrrrrcon", "anrupp")
CM_NP = ("nram", "nrm", "nrrm", "nrrrm", "nruppm")

FAMILIES = (["jonsson", "distrib-jr"] + [f"nperm-{x}" for x in NPERM]
            + [f"cd-np-{x}" for x in CD_NP] + [f"cm-np-{x}" for x in CM_NP]
            + [f"gumm-{x}" for x in _GUMM] + [f"dist3-{x}" for x in _DIST3]
            + [f"cor3-{x}" for x in _COR3])


def _parse_family(family: str) -> tuple[str, str | None, int | None]:
    """Split ``name(arg)``/``name(arg; n)``/``name-arg(n)`` into name, member and number."""
    family = family.strip()
    member, num = None, None
    m = re.fullmatch(r"(.+?)\s*\(\s*([A-Za-z0-9]+)\s*(?:[;,]\s*(\d+)\s*)?\)", family)
    if m:
        family, arg = m.group(1), m.group(2)
        if arg.isdigit() and m.group(3) is None:
            num = int(arg)
        else:
            member, num = arg, int(m.group(3)) if m.group(3) else None
    if member is None:
        for head in ("nperm", "cd-np", "cm-np", "gumm", "dist3", "cor3"):
            if family.startswith(head + "-"):
                return head, family[len(head) + 1:], num
    return family, member, num


def gen_identity(family: str, n: int | None = None, k: int | None = None) -> str:
    """Expanded statement text for ``family``.

    Accepted spellings: ``jonsson(3)``, ``jonsson`` with ``n=3``,
    ``distrib-jr`` with ``k``, ``nperm-nra(3)``, ``cd-np(anrr; 3)``,
    ``cd-np-anrr`` with ``n``, ``dist3(3c)``, ``gumm-3ga`` and so on.
    """
    head, member, num = _parse_family(family)
    if num is not None:
        if head == "distrib-jr":
            k = num
        else:
            n = num

    def need(value, name, low=2):
        if value is None:
            raise ValueError(f"{family} needs {name}")
        if value < low:
            raise ValueError(f"{family} needs {name} >= {low}, got {value}")
        return value

    if head == "jonsson":
        return jonsson(need(n, "n"))
    if head == "distrib-jr":
        return distrib_jr(need(k, "k"))
    if head == "nperm" and member in NPERM:
        return _nperm(member, need(n, "n"))
    if head == "cd-np" and member in CD_NP:
        return _cd_np(member, need(n, "n"))
    if head == "cm-np" and member in CM_NP:
        return _cm_np(member, need(n, "n"))
    for name, table in (("gumm", _GUMM), ("dist3", _DIST3), ("cor3", _COR3)):
        if head == name and member in table:
            return table[member]
    raise ValueError(f"unknown identity family {family!r}; known: {', '.join(FAMILIES)}")


def gen_statement(family: str, n: int | None = None, k: int | None = None):
    return parse_statement(gen_identity(family, n, k))


def factor_count(side) -> int:
    """Number of top-level factors of a composition (compound factors count once)."""
    from .lang import Compose
    return len(side.parts) if isinstance(side, Compose) else 1


__all__ = ["gen_identity", "gen_statement", "FAMILIES", "factor_count", "NPERM", "CD_NP", "CM_NP"]
