"""Polynomial expressions in polygamma functions with rational-function coefficients.

A :class:`SymExpr` is a finite sum ``sum_i c_i * prod_j psi_{k_j}(base_j + shift_j)^{p_j}``.
Arguments are restricted to integer shifts of a handful of fixed bases so that
the shift recurrence ``psi_k(z+1) = psi_k(z) + (-1)^k k!/z^(k+1)`` always brings
an expression back to a unique normal form.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, NamedTuple, Union

from .exactalg import (
    S_CONTEXT,
    T_CONTEXT,
    ContextMismatch,
    Polynomial,
    RationalFunction,
    Scalar,
    VarContext,
)


class InvariantError(RuntimeError):
    """An internal structural invariant of the symbolic pipeline was violated."""


class Base(enum.Enum):
    M_PLUS_ALPHA = "m+alpha"
    ALPHA = "alpha"
    MN = "mn"
    N = "n"
    N_MINUS_M = "n-m"

    @property
    def context(self) -> VarContext:
        return T_CONTEXT if self in (Base.M_PLUS_ALPHA, Base.ALPHA) else S_CONTEXT

    def polynomial(self) -> Polynomial:
        ctx = self.context
        if self is Base.M_PLUS_ALPHA:
            return ctx.gen("m") + ctx.gen("alpha")
        if self is Base.ALPHA:
            return ctx.gen("alpha")
        if self is Base.MN:
            return ctx.gen("m") * ctx.gen("n")
        if self is Base.N:
            return ctx.gen("n")
        return ctx.gen("n") - ctx.gen("m")

    @property
    def rank(self) -> int:
        return _BASE_RANK[self]


_BASE_RANK = {b: i for i, b in enumerate(Base)}

# alpha := n - m maps the T-side bases onto S-side ones
SUBSTITUTED_BASE = {Base.M_PLUS_ALPHA: Base.N, Base.ALPHA: Base.N_MINUS_M}


class PolygammaFactor(NamedTuple):
    """``psi_order(base + shift) ** power``."""

    order: int
    base: Base
    power: int = 1
    shift: int = 0

    @property
    def slot(self) -> tuple[int, int, int]:
        return (self.order, self.base.rank, self.shift)


Monomial = tuple[PolygammaFactor, ...]
ONE: Monomial = ()


def _monomial(factors: Iterable[PolygammaFactor]) -> Monomial:
    merged: dict[tuple[int, int, int], list] = {}
    for f in factors:
        if f.order < 0 or f.power < 1:
            raise ValueError(f"invalid polygamma factor {f}")
        key = f.slot
        if key in merged:
            merged[key][2] += f.power
        else:
            merged[key] = [f.order, f.base, f.power, f.shift]
    return tuple(PolygammaFactor(o, b, p, s) for _, (o, b, p, s) in sorted(merged.items()))


def _mul_monomials(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return _monomial(a + b)


Coefficient = Union[RationalFunction, Polynomial, Scalar]


class SymExpr:
    """Immutable sum of (rational coefficient) x (polygamma monomial) terms."""

    __slots__ = ("context", "_terms")

    def __init__(self, context: VarContext, terms: dict[Monomial, RationalFunction] | None = None):
        self.context = context
        self._terms: dict[Monomial, RationalFunction] = terms if terms is not None else {}

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls, context: VarContext) -> "SymExpr":
        return cls(context, {})

    @classmethod
    def from_terms(cls, context: VarContext,
                   terms: Iterable[tuple[Coefficient, Iterable[PolygammaFactor]]]) -> "SymExpr":
        acc: dict[Monomial, RationalFunction] = {}
        for coeff, factors in terms:
            mono = _monomial(factors)
            for f in mono:
                if f.base.context != context:
                    raise ContextMismatch(f"base {f.base.value} does not belong to context {context}")
            _accumulate(acc, mono, _as_rf(context, coeff))
        return cls(context, acc)

    @classmethod
    def rational(cls, coeff: Coefficient, context: VarContext | None = None) -> "SymExpr":
        if context is None:
            context = coeff.context
        return cls.from_terms(context, [(coeff, ())])

    @classmethod
    def psi(cls, order: int, base: Base, power: int = 1, shift: int = 0) -> "SymExpr":
        ctx = base.context
        return cls(ctx, {(PolygammaFactor(order, base, power, shift),): RationalFunction.constant(ctx, 1)})

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, RationalFunction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, RationalFunction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_canonical(self) -> bool:
        return all(f.shift == 0 for mono in self._terms for f in mono)

    def bases(self) -> set[Base]:
        return {f.base for mono in self._terms for f in mono}

    def max_order(self) -> int:
        return max((f.order for mono in self._terms for f in mono), default=-1)

    def rational_part(self) -> RationalFunction:
        return self._terms.get(ONE, RationalFunction.constant(self.context, 0))

    def coefficient(self, factors: Iterable[PolygammaFactor]) -> RationalFunction:
        return self._terms.get(_monomial(factors), RationalFunction.constant(self.context, 0))

    def filter(self, predicate) -> "SymExpr":
        return SymExpr(self.context, {k: v for k, v in self._terms.items() if predicate(k)})

    # -- arithmetic -----------------------------------------------------
    def _other(self, other) -> "SymExpr":
        if isinstance(other, SymExpr):
            if other.context != self.context:
                raise ContextMismatch(f"context {self.context} vs {other.context}")
            return other
        return SymExpr.rational(other, self.context)

    def __add__(self, other):
        other = self._other(other)
        if not other._terms:
            return self
        acc = dict(self._terms)
        for mono, c in other._terms.items():
            _accumulate(acc, mono, c)
        return SymExpr(self.context, acc)

    __radd__ = __add__

    def __neg__(self):
        return SymExpr(self.context, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        acc = dict(self._terms)
        for mono, c in other._terms.items():
            _accumulate(acc, mono, -c)
        return SymExpr(self.context, acc)

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, SymExpr):
            return self.scale(other)
        other = self._other(other)
        if not self._terms or not other._terms:
            return SymExpr.zero(self.context)
        acc: dict[Monomial, RationalFunction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                _accumulate(acc, _mul_monomials(m1, m2), c1 * c2)
        return SymExpr(self.context, acc)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "SymExpr":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = SymExpr.rational(1, self.context)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scale(self, factor: Coefficient) -> "SymExpr":
        rf = _as_rf(self.context, factor)
        if rf.is_zero():
            return SymExpr.zero(self.context)
        return SymExpr(self.context, {k: v * rf for k, v in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, SymExpr):
            return expr_equal(self, other)
        if isinstance(other, (int, Fraction)):
            return expr_equal(self, SymExpr.rational(other, self.context))
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        from .emit import emit

        return f"SymExpr[{','.join(self.context.variables)}]({emit(self, 'text')})"

    # -- coefficient maps -------------------------------------------------
    def map_coefficients(self, fn) -> "SymExpr":
        acc: dict[Monomial, RationalFunction] = {}
        for mono, c in self._terms.items():
            _accumulate(acc, mono, fn(c))
        return SymExpr(self.context, acc)

    def substitute_var(self, var: str, value: Scalar) -> "SymExpr":
        """Specialise one variable to a constant, keeping the context."""
        image = {var: Polynomial.constant(self.context, value)}
        return self.map_coefficients(lambda c: c.compose(image))


def _as_rf(context: VarContext, c: Coefficient) -> RationalFunction:
    if isinstance(c, RationalFunction):
        if c.context != context:
            raise ContextMismatch(f"context {context} vs {c.context}")
        return c
    if isinstance(c, Polynomial):
        return RationalFunction(c)
    return RationalFunction.constant(context, c)


def _accumulate(acc: dict, mono: Monomial, c: RationalFunction) -> None:
    if c.is_zero():
        return
    prev = acc.get(mono)
    if prev is None:
        acc[mono] = c
        return
    s = prev + c
    if s.is_zero():
        del acc[mono]
    else:
        acc[mono] = s


# ---------------------------------------------------------------------------
# operations


def expr_arith(op: str, a: SymExpr, b) -> SymExpr:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown expression op {op!r}")


def shift_correction(order: int, base: Base, offset: int) -> RationalFunction:
    """``psi_order(z + offset) - psi_order(z)`` as a rational function of the base z."""
    ctx = base.context
    z = base.polynomial()
    sign = -1 if order % 2 else 1
    scale = sign * factorial(order)
    total = RationalFunction.constant(ctx, 0)
    if offset > 0:
        for i in range(offset):
            total = total + RationalFunction(Polynomial.constant(ctx, scale), (z + i) ** (order + 1))
    elif offset < 0:
        for i in range(offset, 0):
            total = total - RationalFunction(Polynomial.constant(ctx, scale), (z + i) ** (order + 1))
    return total


_EXPANSION_CACHE: dict[tuple, SymExpr] = {}


def _expand_factor(f: PolygammaFactor) -> SymExpr:
    """Canonical expansion of one (possibly shifted) factor."""
    key = tuple(f)
    hit = _EXPANSION_CACHE.get(key)
    if hit is not None:
        return hit
    ctx = f.base.context
    canon = PolygammaFactor(f.order, f.base, 1, 0)
    if f.shift == 0:
        out = SymExpr(ctx, {(PolygammaFactor(f.order, f.base, f.power, 0),): RationalFunction.constant(ctx, 1)})
    else:
        corr = shift_correction(f.order, f.base, f.shift)
        single = SymExpr(ctx, {(canon,): RationalFunction.constant(ctx, 1)}) + SymExpr.rational(corr)
        out = single ** f.power
    _EXPANSION_CACHE[key] = out
    return out


def canonicalize(e: SymExpr) -> SymExpr:
    """Eliminate all argument shifts using the polygamma shift recurrence."""
    if e.is_canonical():
        return e
    acc: dict[Monomial, RationalFunction] = {}
    for mono, c in e.items():
        if all(f.shift == 0 for f in mono):
            _accumulate(acc, mono, c)
            continue
        fixed = tuple(f for f in mono if f.shift == 0)
        piece = SymExpr(e.context, {fixed: c})
        for f in mono:
            if f.shift != 0:
                piece = piece * _expand_factor(f)
        for m2, c2 in piece.items():
            _accumulate(acc, m2, c2)
    return SymExpr(e.context, acc)


_SHIFT_CACHE: dict[tuple, SymExpr] = {}


def _shifted_factor(f: PolygammaFactor, direction: int) -> SymExpr:
    key = (f, direction)
    hit = _SHIFT_CACHE.get(key)
    if hit is None:
        hit = _expand_factor(PolygammaFactor(f.order, f.base, f.power, f.shift + direction))
        _SHIFT_CACHE[key] = hit
    return hit


def shift_m(e: SymExpr, direction: int) -> SymExpr:
    """The same expression with m replaced by m + direction (direction = +-1)."""
    if e.context != T_CONTEXT:
        raise ContextMismatch("dimension shifts are defined on the {m, alpha} context only")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    ctx = e.context
    image = {"m": ctx.gen("m") + direction}
    acc: dict[Monomial, RationalFunction] = {}
    for mono, c in e.items():
        if any(f.shift for f in mono):
            raise InvariantError("shift_m expects a canonical expression")
        cs = c.compose(image)
        moving = [f for f in mono if f.base is Base.M_PLUS_ALPHA]
        if not moving:
            _accumulate(acc, mono, cs)
            continue
        fixed = tuple(f for f in mono if f.base is not Base.M_PLUS_ALPHA)
        piece = SymExpr(ctx, {fixed: cs})
        for f in moving:
            piece = piece * _shifted_factor(f, direction)
        for m2, c2 in piece.items():
            _accumulate(acc, m2, c2)
    return SymExpr(ctx, acc)


def ddalpha(e: SymExpr) -> SymExpr:
    """Derivative with respect to alpha (both T-side bases have unit alpha-slope)."""
    if e.context != T_CONTEXT:
        raise ContextMismatch("d/dalpha is defined on the {m, alpha} context only")
    if not e.is_canonical():
        raise InvariantError("ddalpha expects a canonical expression")
    ctx = e.context
    acc: dict[Monomial, RationalFunction] = {}
    for mono, c in e.items():
        dc = c.derivative("alpha")
        if not dc.is_zero():
            _accumulate(acc, mono, dc)
        for i, f in enumerate(mono):
            rest = list(mono[:i]) + list(mono[i + 1:])
            if f.power > 1:
                rest.append(PolygammaFactor(f.order, f.base, f.power - 1, 0))
            rest.append(PolygammaFactor(f.order + 1, f.base, 1, 0))
            _accumulate(acc, _monomial(rest), c * f.power if f.power > 1 else c)
    return SymExpr(ctx, acc)


def substitute_alpha(e: SymExpr) -> SymExpr:
    """Move a T-side expression to the {m, n} context through alpha = n - m."""
    from .exactalg import ratfun_substitute

    if e.context != T_CONTEXT:
        raise ContextMismatch("alpha substitution expects the {m, alpha} context")
    acc: dict[Monomial, RationalFunction] = {}
    for mono, c in e.items():
        new_mono = _monomial(PolygammaFactor(f.order, SUBSTITUTED_BASE[f.base], f.power, f.shift) for f in mono)
        _accumulate(acc, new_mono, ratfun_substitute(c))
    return SymExpr(S_CONTEXT, acc)


def expr_equal(a: SymExpr, b: SymExpr) -> bool:
    if a.context != b.context:
        raise ContextMismatch(f"context {a.context} vs {b.context}")
    if a.is_canonical() and b.is_canonical():
        if a._terms.keys() != b._terms.keys():
            return False
        return all(c == b._terms[k] for k, c in a._terms.items())
    return (canonicalize(a) - canonicalize(b)).is_zero()


def substitute_m_one(e: SymExpr) -> SymExpr:
    """Specialise m := 1; on the {m, n} side psi(mn) then coincides with psi(n)."""
    image = {"m": Polynomial.constant(e.context, 1)}
    acc: dict[Monomial, RationalFunction] = {}
    for mono, c in e.items():
        if e.context == S_CONTEXT:
            if any(f.base is Base.N_MINUS_M for f in mono):
                raise InvariantError("psi(n - m) has no canonical image at m = 1")
            mono = _monomial(PolygammaFactor(f.order, Base.N if f.base is Base.MN else f.base, f.power, f.shift)
                             for f in mono)
        _accumulate(acc, mono, c.compose(image))
    return SymExpr(e.context, acc)
