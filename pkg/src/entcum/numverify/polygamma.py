"""Arbitrary-precision polygamma functions and numeric evaluation of expressions."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath

from ..exactalg import PoleError, S_CONTEXT, T_CONTEXT
from ..symexpr import Base, SymExpr

BigFloat = mpmath.mpf

DEFAULT_DIGITS = 50
GUARD_DIGITS = 12


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2 count} as exact fractions (Akiyama-Tanigawa)."""
    top = 2 * count
    out = []
    a = [Fraction(0)] * (top + 1)
    for i in range(top + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if i >= 2 and i % 2 == 0:
            out.append(a[0])
    return tuple(out)


def _asymptotic(k: int, x: mpmath.mpf, eps: mpmath.mpf) -> mpmath.mpf:
    if k == 0:
        total = mpmath.log(x) - 1 / (2 * x)
    else:
        total = mpmath.mpf(factorial(k - 1)) / x**k + mpmath.mpf(factorial(k)) / (2 * x ** (k + 1))
    x2 = x * x
    power = x2 if k == 0 else x ** (k + 2)
    count = 8
    j = 1
    while True:
        bern = _bernoulli_even(count)
        while j <= count:
            b = bern[j - 1]
            if k == 0:
                term = _mpf(b) / (2 * j * power)
            else:
                term = _mpf(b) * factorial(2 * j + k - 1) / factorial(2 * j) / power
            total = total - term if k == 0 else total + term
            if abs(term) < eps * abs(total):
                return total if k == 0 or k % 2 == 1 else -total
            power *= x2
            j += 1
        count *= 2
        if count > 4096:
            raise ArithmeticError("asymptotic series failed to converge")


def polygamma_num(k: int, z, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """psi_k(z) for real z > 0, to about ``digits`` significant digits."""
    if k < 0:
        raise ValueError("polygamma order must be non-negative")
    z = Fraction(z) if not isinstance(z, (mpmath.mpf, float)) else z
    if z <= 0:
        raise ValueError(f"polygamma needs a positive argument, got {z}")
    with mpmath.workdps(digits + GUARD_DIGITS):
        x = _mpf(z)
        threshold = digits + 2 * k + 10
        shift = max(0, int(mpmath.ceil(threshold - x)))
        head = mpmath.mpf(0)
        for i in range(shift):
            head += 1 / (x + i) ** (k + 1)
        eps = mpmath.mpf(10) ** (-(digits + GUARD_DIGITS - 2))
        tail = _asymptotic(k, x + shift, eps)
        sign = -1 if k % 2 else 1
        # psi_k(x) = psi_k(x + N) - (-1)^k k! sum 1/(x+i)^{k+1}
        value = tail - sign * factorial(k) * head
    return +value


def base_value(base: Base, m, n) -> Fraction:
    m, n = Fraction(m), Fraction(n)
    return {
        Base.M_PLUS_ALPHA: n,
        Base.ALPHA: n - m,
        Base.MN: m * n,
        Base.N: n,
        Base.N_MINUS_M: n - m,
    }[base]


def eval_expr(e: SymExpr, m, n, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """Value of ``e`` at the point (m, n); on the {m, alpha} side alpha = n - m."""
    if e.context == S_CONTEXT:
        point = {"m": Fraction(m), "n": Fraction(n)}
    elif e.context == T_CONTEXT:
        point = {"m": Fraction(m), "alpha": Fraction(n) - Fraction(m)}
    else:
        raise ValueError(f"cannot evaluate in context {e.context}")
    psi_cache: dict[tuple[int, Fraction], mpmath.mpf] = {}
    with mpmath.workdps(digits + GUARD_DIGITS):
        total = mpmath.mpf(0)
        for mono, coeff in e.items():
            c = coeff.evaluate(point)
            if c == 0:
                continue
            term = _mpf(c)
            for f in mono:
                z = base_value(f.base, m, n) + f.shift
                if z <= 0:
                    raise PoleError(f"psi_{f.order} evaluated at non-positive argument {z}")
                key = (f.order, z)
                if key not in psi_cache:
                    psi_cache[key] = polygamma_num(f.order, z, digits + GUARD_DIGITS)
                term *= psi_cache[key] ** f.power
            total += term
    with mpmath.workdps(digits):
        return +total


def to_decimal_string(x: mpmath.mpf, digits: int) -> str:
    """Fixed-point rendering with ``digits`` digits after the point, rounded to nearest."""
    with mpmath.workdps(digits + GUARD_DIGITS + 20):
        scaled = int(mpmath.nint(x * mpmath.mpf(10) ** digits))
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + body
    return f"{sign}{body[:-digits]}.{body[-digits:]}"
