"""Deterministic rendering of :class:`SymExpr` values as LaTeX, text or JSON."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from math import gcd, lcm
from typing import Any

from .exactalg import Polynomial, RationalFunction, VarContext
from .symexpr import Base, Monomial, PolygammaFactor, SymExpr

SCHEMA_VERSION = 1

_LATEX_VAR = {"m": "m", "n": "n", "alpha": r"\alpha"}
_LATEX_BASE = {
    Base.M_PLUS_ALPHA: r"m+\alpha",
    Base.ALPHA: r"\alpha",
    Base.MN: "mn",
    Base.N: "n",
    Base.N_MINUS_M: "n-m",
}
_BASE_BY_NAME = {b.value: b for b in Base}


def term_order_key(mono: Monomial):
    top = max((f.order for f in mono), default=-1)
    return (-top, [(f.order, f.base.rank, f.power, f.shift) for f in mono])


def ordered_terms(e: SymExpr) -> list[tuple[Monomial, RationalFunction]]:
    return sorted(e.items(), key=lambda kv: term_order_key(kv[0]))


def _ordered_monomials(p: Polynomial) -> list[tuple[tuple[int, ...], Fraction]]:
    return sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)


def _primitive(p: Polynomial) -> tuple[Fraction, dict[tuple[int, ...], int]]:
    """Split p = content * P with P integral, primitive, positive leading coefficient."""
    items = _ordered_monomials(p)
    den = 1
    for _, c in items:
        den = lcm(den, c.denominator)
    ints = [(e, int(c * den)) for e, c in items]
    g = 0
    for _, c in ints:
        g = gcd(g, c)
    if ints and ints[0][1] < 0:
        g = -g
    return Fraction(g, den), {e: c // g for e, c in ints}


def _mono_str(exps, variables, latex: bool) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 0:
            continue
        name = _LATEX_VAR[v] if latex else v
        if e == 1:
            parts.append(name)
        else:
            parts.append(f"{name}^{{{e}}}" if latex else f"{name}^{e}")
    if latex:
        out = ""
        for p in parts:
            # keep \alpha from running into a following letter
            out += " " + p if out.endswith("\\alpha") else p
        return out
    return "*".join(parts)


def _int_poly_str(coeffs: dict, variables, latex: bool) -> str:
    out = []
    for exps, c in sorted(coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True):
        mono = _mono_str(exps, variables, latex)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else (f"{mag}{mono}" if latex else f"{mag}*{mono}")
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


def coefficient_str(c: RationalFunction, latex: bool) -> tuple[int, str, bool]:
    """Return (sign, magnitude, atomic) for a coefficient; atomic means no parentheses needed."""
    variables = c.context.variables
    cn, N = _primitive(c.numerator)
    cd, D = _primitive(c.denominator)
    r = cn / cd
    sign = -1 if r < 0 else 1
    r = abs(r)
    unit = {(0,) * len(variables): 1}
    times = "" if latex else "*"

    def part(k: int, P: dict) -> tuple[str, bool]:
        if P == unit:
            return str(k), True
        s = _int_poly_str(P, variables, latex)
        single = len(P) == 1
        if k == 1:
            return s, single
        return f"{k}{times}{s if single else '(' + s + ')'}", True

    num, num_atomic = part(r.numerator, N)
    if D == unit and r.denominator == 1:
        return sign, num, num_atomic
    den, den_atomic = part(r.denominator, D)
    if latex:
        return sign, rf"\frac{{{num}}}{{{den}}}", True
    if not num_atomic:
        num = f"({num})"
    if not den_atomic or "*" in den:
        den = f"({den})"
    return sign, f"{num}/{den}", True


def factor_str(f: PolygammaFactor, latex: bool) -> str:
    if latex:
        arg = _LATEX_BASE[f.base]
    else:
        arg = f.base.value
    if f.shift:
        arg = f"{arg}{f.shift:+d}"
    if latex:
        pw = f"^{{{f.power}}}" if f.power > 1 else ""
        return rf"\psi_{{{f.order}}}{pw}({arg})" if f.order > 9 else rf"\psi_{f.order}{pw}({arg})"
    pw = f"^{f.power}" if f.power > 1 else ""
    return f"psi_{f.order}({arg}){pw}"


def emit(e: SymExpr, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json(e), separators=(",", ":"))
    if fmt not in ("latex", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    latex = fmt == "latex"
    pieces = []
    for mono, c in ordered_terms(e):
        sign, mag, atomic = coefficient_str(c, latex)
        psis = [factor_str(f, latex) for f in mono]
        if not psis:
            body = mag
        elif mag == "1":
            body = (" " if latex else "*").join(psis)
        else:
            if not atomic:
                mag = rf"\left({mag}\right)" if latex else f"({mag})"
            body = (" " if latex else "*").join([mag] + psis)
        if not pieces:
            pieces.append(body if sign > 0 else f"-{body}")
        else:
            pieces.append((" + " if sign > 0 else " - ") + body)
    return "".join(pieces) if pieces else "0"


# ---------------------------------------------------------------------------
# JSON


def _poly_json(p: Polynomial) -> list:
    return [[f"{c.numerator}/{c.denominator}", [int(x) for x in e]] for e, c in _ordered_monomials(p)]


def _poly_from_json(ctx: VarContext, data: list) -> Polynomial:
    terms = {}
    for c, exps in data:
        terms[tuple(int(x) for x in exps)] = Fraction(c)
    return Polynomial(ctx, terms)


def to_json(e: SymExpr) -> dict[str, Any]:
    terms = []
    for mono, c in ordered_terms(e):
        psis = []
        for f in mono:
            d = {"k": f.order, "base": f.base.value, "pow": f.power}
            if f.shift:
                d["shift"] = f.shift
            psis.append(d)
        terms.append({"coeff": {"num": _poly_json(c.numerator), "den": _poly_json(c.denominator)}, "psis": psis})
    return {"schema": SCHEMA_VERSION, "context": list(e.context.variables), "terms": terms}


def from_json(data: dict[str, Any] | str) -> SymExpr:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported expression schema {data.get('schema')!r}")
    ctx = VarContext(tuple(data["context"]))
    rows = []
    for t in data["terms"]:
        num = _poly_from_json(ctx, t["coeff"]["num"])
        den = _poly_from_json(ctx, t["coeff"]["den"])
        factors = [PolygammaFactor(int(p["k"]), _BASE_BY_NAME[p["base"]], int(p.get("pow", 1)), int(p.get("shift", 0)))
                   for p in t["psis"]]
        rows.append((RationalFunction(num, den), factors))
    return SymExpr.from_terms(ctx, rows)


def canonical_json(e: SymExpr) -> str:
    return json.dumps(to_json(e), separators=(",", ":"), sort_keys=True)


def content_hash(e: SymExpr) -> str:
    return hashlib.sha256(canonical_json(e).encode()).hexdigest()
