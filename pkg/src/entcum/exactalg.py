"""Exact multivariate polynomials and rational functions over Q.

Polynomials are thin immutable wrappers around ``flint.fmpq_mpoly`` with a
graded-lexicographic term order.  Rational functions are kept fully reduced
(multivariate GCD) with a monic denominator, so structural equality is exact
equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Union

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx

Scalar = Union[int, Fraction, fmpq]


class ContextMismatch(ValueError):
    """Operands live in different variable contexts."""


class PoleError(ZeroDivisionError):
    """A denominator vanishes at the requested point."""


@dataclass(frozen=True)
class VarContext:
    """Ordered tuple of indeterminate names; the ring is created lazily."""

    variables: tuple[str, ...]

    @cached_property
    def ring(self) -> fmpq_mpoly_ctx:
        return fmpq_mpoly_ctx.get(self.variables, "deglex")

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def gen(self, name: str) -> "Polynomial":
        return Polynomial._wrap(self, self.ring.gens()[self.index(name)])

    def __str__(self) -> str:
        return "{" + ", ".join(self.variables) + "}"


T_CONTEXT = VarContext(("m", "alpha"))
S_CONTEXT = VarContext(("m", "n"))


def to_fmpq(x: Scalar) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return fmpq(x)
    raise TypeError(f"not an exact rational: {x!r}")


def to_fraction(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _check(a: VarContext, b: VarContext) -> None:
    if a != b:
        raise ContextMismatch(f"context {a} vs {b}")


class Polynomial:
    """Sparse polynomial with rational coefficients in a fixed context."""

    __slots__ = ("context", "_p")

    def __init__(self, context: VarContext, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        nvars = len(context.variables)
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for context {context}")
            c = to_fmpq(c)
            if c != 0:
                clean[tuple(exps)] = c
        self.context = context
        self._p = context.ring.from_dict(clean)

    @classmethod
    def _wrap(cls, context: VarContext, p: fmpq_mpoly) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.context = context
        obj._p = p
        return obj

    @classmethod
    def constant(cls, context: VarContext, c: Scalar) -> "Polynomial":
        return cls._wrap(context, context.ring.constant(to_fmpq(c)))

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {tuple(k): to_fraction(v) for k, v in self._p.to_dict().items()}

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def total_degree(self) -> int:
        return -1 if self._p.is_zero() else int(self._p.total_degree())

    def _coerce(self, other) -> fmpq_mpoly:
        if isinstance(other, Polynomial):
            _check(self.context, other.context)
            return other._p
        return self.context.ring.constant(to_fmpq(other))

    def __add__(self, other):
        return Polynomial._wrap(self.context, self._p + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial._wrap(self.context, self._p - self._coerce(other))

    def __rsub__(self, other):
        return Polynomial._wrap(self.context, self._coerce(other) - self._p)

    def __mul__(self, other):
        return Polynomial._wrap(self.context, self._p * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial._wrap(self.context, -self._p)

    def __pow__(self, k: int):
        return Polynomial._wrap(self.context, self._p**k)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.context == other.context and self._p == other._p
        if isinstance(other, (int, Fraction, fmpq)):
            return self._p == self.context.ring.constant(to_fmpq(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.context, tuple(sorted(self._p.to_dict().items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return f"Polynomial({self._p})"

    def __str__(self):
        return str(self._p)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        missing = set(self.context.variables) - set(point)
        if missing:
            raise ValueError(f"unassigned variables: {sorted(missing)}")
        vals = {v: to_fmpq(point[v]) for v in self.context.variables}
        r = self._p.subs(vals)
        return to_fraction(r.leading_coefficient()) if not r.is_zero() else Fraction(0)

    def derivative(self, var: str) -> "Polynomial":
        return Polynomial._wrap(self.context, self._p.derivative(self.context.index(var)))


def poly_arith(op: str, a: Polynomial, b: Polynomial) -> Polynomial:
    _check(a.context, b.context)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial op {op!r}")


def _normalize(n: fmpq_mpoly, d: fmpq_mpoly) -> tuple[fmpq_mpoly, fmpq_mpoly]:
    if d.is_zero():
        raise ZeroDivisionError("zero denominator")
    if n.is_zero():
        return n, d.context().constant(1)
    if not d.is_constant():
        g = n.gcd(d)
        if not g.is_one():
            n = n / g
            d = d / g
    lc = d.leading_coefficient()
    if lc != 1:
        n = n / lc
        d = d / lc
    return n, d


class RationalFunction:
    """Reduced quotient of polynomials; denominator monic under deglex."""

    __slots__ = ("context", "_n", "_d")

    def __init__(self, numerator: Polynomial | Scalar, denominator: Polynomial | Scalar = 1,
                 context: VarContext | None = None):
        if isinstance(numerator, Polynomial):
            context = numerator.context
        elif isinstance(denominator, Polynomial):
            context = denominator.context
        if context is None:
            raise ValueError("context required for scalar rational functions")
        ring = context.ring
        n = numerator._p if isinstance(numerator, Polynomial) else ring.constant(to_fmpq(numerator))
        d = denominator._p if isinstance(denominator, Polynomial) else ring.constant(to_fmpq(denominator))
        if isinstance(numerator, Polynomial):
            _check(context, numerator.context)
        if isinstance(denominator, Polynomial):
            _check(context, denominator.context)
        if d.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.context = context
        self._n, self._d = _normalize(n, d)

    @classmethod
    def _raw(cls, context: VarContext, n: fmpq_mpoly, d: fmpq_mpoly) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.context = context
        obj._n = n
        obj._d = d
        return obj

    @classmethod
    def _make(cls, context: VarContext, n: fmpq_mpoly, d: fmpq_mpoly) -> "RationalFunction":
        n, d = _normalize(n, d)
        return cls._raw(context, n, d)

    @classmethod
    def constant(cls, context: VarContext, c: Scalar) -> "RationalFunction":
        ring = context.ring
        return cls._raw(context, ring.constant(to_fmpq(c)), ring.constant(1))

    @property
    def numerator(self) -> Polynomial:
        return Polynomial._wrap(self.context, self._n)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial._wrap(self.context, self._d)

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_polynomial(self) -> bool:
        return self._d.is_one()

    def is_constant(self) -> bool:
        return self._d.is_one() and self._n.is_constant()

    def _coerce(self, other) -> tuple[fmpq_mpoly, fmpq_mpoly]:
        if isinstance(other, RationalFunction):
            _check(self.context, other.context)
            return other._n, other._d
        if isinstance(other, Polynomial):
            _check(self.context, other.context)
            return other._p, self.context.ring.constant(1)
        ring = self.context.ring
        return ring.constant(to_fmpq(other)), ring.constant(1)

    def __add__(self, other):
        n2, d2 = self._coerce(other)
        return RationalFunction._sum(self.context, self._n, self._d, n2, d2)

    __radd__ = __add__

    def __sub__(self, other):
        n2, d2 = self._coerce(other)
        return RationalFunction._sum(self.context, self._n, self._d, -n2, d2)

    def __rsub__(self, other):
        n2, d2 = self._coerce(other)
        return RationalFunction._sum(self.context, n2, d2, -self._n, self._d)

    @staticmethod
    def _sum(ctx, n1, d1, n2, d2) -> "RationalFunction":
        if n1.is_zero():
            return RationalFunction._raw(ctx, n2, d2)
        if n2.is_zero():
            return RationalFunction._raw(ctx, n1, d1)
        if d1 == d2:
            n = n1 + n2
            if n.is_zero():
                return RationalFunction._raw(ctx, n, ctx.ring.constant(1))
            if d1.is_one():
                return RationalFunction._raw(ctx, n, d1)
            g = n.gcd(d1)
            if g.is_one():
                return RationalFunction._raw(ctx, n, d1)
            return RationalFunction._make(ctx, n / g, d1 / g)
        if d1.is_one():
            return RationalFunction._raw(ctx, n1 * d2 + n2, d2)
        if d2.is_one():
            return RationalFunction._raw(ctx, n1 + n2 * d1, d1)
        g = d1.gcd(d2)
        if g.is_one():
            return RationalFunction._make(ctx, n1 * d2 + n2 * d1, d1 * d2)
        d1g = d1 / g
        d2g = d2 / g
        return RationalFunction._make(ctx, n1 * d2g + n2 * d1g, d1g * d2)

    def __mul__(self, other):
        n2, d2 = self._coerce(other)
        ctx = self.context
        n1, d1 = self._n, self._d
        if n1.is_zero() or n2.is_zero():
            return RationalFunction._raw(ctx, ctx.ring.constant(0), ctx.ring.constant(1))
        if n2.is_constant() and d2.is_one():
            return RationalFunction._raw(ctx, n1 * n2.leading_coefficient(), d1)
        # cross-cancel before multiplying
        g1 = n1.gcd(d2) if not d2.is_one() else None
        g2 = n2.gcd(d1) if not d1.is_one() else None
        if g1 is not None and not g1.is_one():
            n1 = n1 / g1
            d2 = d2 / g1
        if g2 is not None and not g2.is_one():
            n2 = n2 / g2
            d1 = d1 / g2
        d = d1 * d2
        n = n1 * n2
        lc = d.leading_coefficient()
        if lc != 1:
            n = n / lc
            d = d / lc
        return RationalFunction._raw(ctx, n, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        n2, d2 = self._coerce(other)
        if n2.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self * RationalFunction._make(self.context, d2, n2)

    def __rtruediv__(self, other):
        if self._n.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        n2, d2 = self._coerce(other)
        return RationalFunction._make(self.context, n2 * self._d, d2 * self._n)

    def __neg__(self):
        return RationalFunction._raw(self.context, -self._n, self._d)

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction._make(self.context, self._d**(-k), self._n**(-k))
        return RationalFunction._raw(self.context, self._n**k, self._d**k)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            if self.context != other.context:
                return False
            # cross-multiplication keeps equality independent of reduction
            return self._n * other._d == other._n * self._d
        if isinstance(other, (int, Fraction, fmpq, Polynomial)):
            n2, d2 = self._coerce(other)
            return self._n * d2 == n2 * self._d
        return NotImplemented

    def __hash__(self):
        return hash((self.context, str(self._n), str(self._d)))

    def __repr__(self):
        return f"RationalFunction(({self._n})/({self._d}))"

    def __str__(self):
        if self._d.is_one():
            return str(self._n)
        return f"({self._n})/({self._d})"

    def canonical(self) -> "RationalFunction":
        return RationalFunction._make(self.context, self._n, self._d)

    def compose(self, images: Mapping[str, Polynomial], target: VarContext | None = None) -> "RationalFunction":
        """Substitute every variable by a polynomial (in ``target`` if given)."""
        target = target or self.context
        gens = [images[v]._p if v in images else None for v in self.context.variables]
        for v, g in zip(self.context.variables, gens):
            if g is None:
                if target != self.context:
                    raise ValueError(f"variable {v} needs an image in {target}")
        polys = [g if g is not None else self.context.ring.gens()[i] for i, g in enumerate(gens)]
        if target == self.context:
            n = self._n.compose(*polys)
            d = self._d.compose(*polys)
        else:
            n = self._n.compose(*polys, ctx=target.ring)
            d = self._d.compose(*polys, ctx=target.ring)
        return RationalFunction._make(target, n, d)

    def derivative(self, var: str) -> "RationalFunction":
        i = self.context.index(var)
        dn = self._n.derivative(i)
        if self._d.is_one():
            return RationalFunction._raw(self.context, dn, self._d)
        dd = self._d.derivative(i)
        return RationalFunction._make(self.context, dn * self._d - self._n * dd, self._d * self._d)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise PoleError(f"pole of {self} at {dict(point)}")
        return self.numerator.evaluate(point) / den


def ratfun_arith(op: str, a: RationalFunction, b: RationalFunction) -> RationalFunction:
    _check(a.context, b.context)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown rational-function op {op!r}")


def ratfun_substitute(f: RationalFunction) -> RationalFunction:
    """Rewrite a {m, alpha} rational function in {m, n} via alpha = n - m."""
    if f.context != T_CONTEXT:
        raise ContextMismatch(f"substitution expects context {T_CONTEXT}, got {f.context}")
    m = S_CONTEXT.gen("m")
    n = S_CONTEXT.gen("n")
    return f.compose({"m": m, "alpha": n - m}, target=S_CONTEXT)


def ratfun_eval(f: RationalFunction, point: Mapping[str, Scalar]) -> Fraction:
    return f.evaluate(point)
