"""From cumulants of the induced entropy T to cumulants of the von Neumann entropy S."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

from .combinat import bell_complete, cumulants_from_moments, moments_from_cumulants
from .engine import CumulantEngine
from .exactalg import S_CONTEXT, Polynomial, RationalFunction
from .symexpr import Base, InvariantError, SymExpr, canonicalize, substitute_alpha


def pochhammer_mn(l: int) -> Polynomial:
    """(mn)_l = mn (mn + 1) ... (mn + l - 1) as an explicit polynomial."""
    mn = S_CONTEXT.gen("m") * S_CONTEXT.gen("n")
    out = Polynomial.constant(S_CONTEXT, 1)
    for i in range(l):
        out = out * (mn + i)
    return out


@lru_cache(maxsize=None)
def conversion_coefficient(j: int, l: int) -> SymExpr:
    """Weight of E[S^j] in the expression of E[S^l]."""
    if not 0 <= j < l:
        raise ValueError(f"need 0 <= j < l, got j={j}, l={l}")
    args = [SymExpr.psi(k, Base.MN, shift=l) for k in range(l - j)]
    sign = -1 if (j + l) % 2 == 0 else 1
    return canonicalize(bell_complete(args)).scale(sign * comb(l, j))


@dataclass
class ConversionState:
    """Index-aligned lists (entry i holds order i + 1) of the conversion stage."""

    moments_T: list[SymExpr] = field(default_factory=list)
    moments_S: list[SymExpr] = field(default_factory=list)
    cumulants_S: list[SymExpr] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.cumulants_S)


def moments_S(l: int, kappa_T: Sequence[SymExpr]) -> list[SymExpr]:
    """E[S], ..., E[S^l] from kappa_1(T), ..., kappa_l(T) (given in the {m, alpha} context)."""
    if len(kappa_T) < l:
        raise ValueError(f"need {l} cumulants of T, got {len(kappa_T)}")
    kS = [substitute_alpha(k) for k in kappa_T[:l]]
    return _moments_S_from(l, moments_from_cumulants(kS))


def _moments_S_from(l: int, mu_T: Sequence[SymExpr]) -> list[SymExpr]:
    one = SymExpr.rational(1, S_CONTEXT)
    mu_S = [one]
    for order in range(1, l + 1):
        scale = RationalFunction(Polynomial.constant(S_CONTEXT, (-1) ** order), pochhammer_mn(order))
        acc = mu_T[order - 1].scale(scale)
        for j in range(order):
            acc = acc + conversion_coefficient(j, order) * mu_S[j]
        mu_S.append(canonicalize(acc))
    return mu_S[1:]


class Converter:
    """Caches the conversion stage for successive orders."""

    def __init__(self, engine: CumulantEngine | None = None):
        self.engine = engine or CumulantEngine()
        self.state = ConversionState()

    def extend(self, l: int) -> ConversionState:
        st = self.state
        if st.order >= l:
            return st
        kT = [substitute_alpha(self.engine.cumulant_T(i)) for i in range(1, l + 1)]
        mu_T = moments_from_cumulants(kT)
        st.moments_T = mu_T
        st.moments_S = _moments_S_from(l, mu_T)
        st.cumulants_S = [canonicalize(c) for c in cumulants_from_moments(st.moments_S)]
        for i, c in enumerate(st.cumulants_S, start=1):
            if Base.N_MINUS_M in c.bases():
                raise InvariantError(f"kappa_{i}(S) retains a psi(n - m) factor")
        return st

    def cumulant_S(self, l: int) -> SymExpr:
        if l < 1:
            raise ValueError("order must be positive")
        return self.extend(l).cumulants_S[l - 1]


def cumulant_S(l: int, engine: CumulantEngine | None = None) -> SymExpr:
    return Converter(engine).cumulant_S(l)


def leading_term(l: int, engine: CumulantEngine | None = None) -> SymExpr:
    """Terms carrying the highest-order polygamma psi_{l-1} in kappa_l(S)."""
    if l < 2:
        raise ValueError("leading_term needs l >= 2")
    engine = engine or CumulantEngine()
    kR = substitute_alpha(engine.mean_R(l)).rational_part()
    ratio = kR / RationalFunction(pochhammer_mn(l))
    out = SymExpr.psi(l - 1, Base.MN) - SymExpr.psi(l - 1, Base.N).scale(ratio)
    return out.scale((-1) ** (l - 1))


def highest_order_part(e: SymExpr) -> SymExpr:
    top = e.max_order()
    return e.filter(lambda mono: any(f.order == top for f in mono))
