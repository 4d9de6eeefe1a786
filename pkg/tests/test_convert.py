from fractions import Fraction

import pytest

from entcum.convert import (
    Converter,
    conversion_coefficient,
    cumulant_S,
    highest_order_part,
    leading_term,
    moments_S,
    pochhammer_mn,
)
from entcum.numverify import eval_expr, to_decimal_string
from entcum.symexpr import Base, SymExpr, canonicalize, expr_equal, substitute_m_one


def test_pochhammer():
    assert pochhammer_mn(3).evaluate({"m": 2, "n": 3}) == 6 * 7 * 8
    assert pochhammer_mn(0).evaluate({"m": 2, "n": 3}) == 1


def test_conversion_coefficient_first_order():
    # E[S] = -E[T]/(mn) + psi_0(mn + 1)
    c = conversion_coefficient(0, 1)
    assert expr_equal(c, canonicalize(SymExpr.psi(0, Base.MN, shift=1)))
    with pytest.raises(ValueError):
        conversion_coefficient(2, 2)


def test_moments_need_enough_cumulants(engine):
    with pytest.raises(ValueError):
        moments_S(3, [engine.cumulant_T(1)])


@pytest.mark.parametrize("l", range(1, 7))
def test_no_n_minus_m_left(converter, l):
    assert Base.N_MINUS_M not in converter.cumulant_S(l).bases()


@pytest.mark.parametrize("l", range(1, 7))
def test_m_equal_one_vanishes(converter, l):
    assert substitute_m_one(converter.cumulant_S(l)).is_zero()


@pytest.mark.parametrize("l", range(2, 7))
def test_highest_order_terms(engine, converter, l):
    e = converter.cumulant_S(l)
    assert e.max_order() == l - 1
    top = canonicalize(leading_term(l, engine))
    assert expr_equal(highest_order_part(e), highest_order_part(top))


def test_mean_at_small_point(converter):
    # canonical form psi_0(mn) - psi_0(n) + r(m, n); at m = n = 2, psi_0(4) - psi_0(2) = 1/2 + 1/3
    e = converter.cumulant_S(1)
    assert e.rational_part().evaluate({"m": 2, "n": 2}) + Fraction(5, 6) == Fraction(1, 3)
    assert to_decimal_string(eval_expr(e, 2, 2, 30), 30) == "0." + "3" * 30


def test_module_level_helper(engine):
    assert expr_equal(cumulant_S(2, engine), Converter(engine).cumulant_S(2))
    with pytest.raises(ValueError):
        Converter(engine).cumulant_S(0)
    with pytest.raises(ValueError):
        leading_term(1)
