import json
import random
from fractions import Fraction
from math import factorial, log

import mpmath
import numpy as np
import pytest

from entcum.exactalg import PoleError, S_CONTEXT
from entcum.numverify import (
    EigensolverError,
    InsufficientSamples,
    entropy_S,
    estimate_cumulants,
    eval_expr,
    jacobi_eigvalsh,
    polygamma_num,
    sample_entropy,
    sample_spectrum,
    to_decimal_string,
    verify,
    wishart_spectra,
)
from entcum.numverify.sampling import _rng
from entcum.symexpr import Base, SymExpr


def close(x, y, digits):
    return abs(x - y) <= mpmath.mpf(10) ** (-digits) * max(1, abs(y))


def test_psi0_at_five():
    with mpmath.workdps(60):
        oracle = mpmath.mpf(25) / 12 - mpmath.euler
        assert close(polygamma_num(0, 5, 50), oracle, 45)
    assert to_decimal_string(polygamma_num(0, 5, 20), 12).startswith("1.50611766")


def test_psi1_at_one_is_zeta2():
    with mpmath.workdps(60):
        assert close(polygamma_num(1, 1, 50), mpmath.pi**2 / 6, 45)


@pytest.mark.parametrize("k", range(6))
def test_against_hurwitz_zeta(k):
    rng = random.Random(k)
    for _ in range(5):
        z = Fraction(rng.randint(1, 400), rng.randint(1, 20))
        with mpmath.workdps(120):
            zm = mpmath.mpf(z.numerator) / z.denominator
            if k == 0:
                oracle = mpmath.digamma(zm)
            else:
                oracle = (-1) ** (k + 1) * mpmath.factorial(k) * mpmath.zeta(k + 1, zm)
            assert close(polygamma_num(k, z, 100), oracle, 95)


@pytest.mark.parametrize("k", range(6))
def test_recurrence(k):
    rng = random.Random(100 + k)
    for _ in range(5):
        z = Fraction(rng.randint(10, 500), 10)
        shift = rng.randint(1, 10)
        with mpmath.workdps(70):
            lhs = polygamma_num(k, z + shift, 60) - polygamma_num(k, z, 60)
            rhs = sum((-1) ** k * factorial(k) / (mpmath.mpf(z.numerator) / z.denominator + i) ** (k + 1)
                      for i in range(shift))
            assert close(lhs, rhs, 50)


def test_bad_arguments():
    with pytest.raises(ValueError):
        polygamma_num(0, 0)
    with pytest.raises(ValueError):
        polygamma_num(-1, 3)
    with pytest.raises(PoleError):
        eval_expr(SymExpr.psi(0, Base.N_MINUS_M), 2, 2)


def test_decimal_string_rounding():
    assert to_decimal_string(mpmath.mpf(2) / 3, 5) == "0.66667"
    assert to_decimal_string(mpmath.mpf(-1) / 3, 2) == "-0.33"
    assert to_decimal_string(mpmath.mpf(7), 0) == "7"


def test_kappa2_at_two_two(converter):
    with mpmath.workdps(50):
        oracle = mpmath.mpf(13) / 36 - mpmath.pi**2 / 30
    assert close(eval_expr(converter.cumulant_S(2), 2, 2, 40), oracle, 38)


@pytest.mark.parametrize("l", range(1, 7))
def test_m_equal_one_numeric_zero(converter, l):
    for n in (1, 3, 7):
        assert abs(eval_expr(converter.cumulant_S(l), 1, n, 40)) < mpmath.mpf(10) ** -35


# ---- sampling ---------------------------------------------------------------


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(3)
    for m in (2, 3, 6, 12):
        z = rng.standard_normal((50, m, m)) + 1j * rng.standard_normal((50, m, m))
        h = z + np.conj(np.swapaxes(z, 1, 2))
        assert np.allclose(jacobi_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-11)


def test_jacobi_iteration_cap():
    rng = np.random.default_rng(4)
    z = rng.standard_normal((3, 5, 5)) + 1j * rng.standard_normal((3, 5, 5))
    with pytest.raises(EigensolverError):
        jacobi_eigvalsh(z + np.conj(np.swapaxes(z, 1, 2)), max_sweeps=1)


def test_spectrum_properties():
    rng = _rng(11, 0)
    z_rng = _rng(11, 0)
    eig = wishart_spectra(3, 5, 200, rng)
    z = (z_rng.standard_normal((200, 3, 5)) + 1j * z_rng.standard_normal((200, 3, 5))) / np.sqrt(2.0)
    trace = np.sum(np.abs(z) ** 2, axis=(1, 2))
    assert np.all(eig >= 0)
    assert np.all(np.diff(eig, axis=1) >= 0)
    assert np.allclose(eig.sum(axis=1), trace, rtol=1e-10)
    lam = eig / eig.sum(axis=1, keepdims=True)
    assert np.allclose(lam.sum(axis=1), 1.0, atol=1e-12)
    assert sample_spectrum(2, 2, _rng(1, 0)).shape == (2,)


def test_single_row_is_gamma():
    n = 5
    x = wishart_spectra(1, n, 100_000, _rng(5, 0))[:, 0]
    # Gamma(n, 1): mean n, variance n
    assert abs(x.mean() - n) <= 4 * np.sqrt(n / x.size)


def test_entropy_support():
    s = sample_entropy(4, 6, 5000, seed=2).values
    assert np.all(s >= 0) and np.all(s <= log(4) + 1e-12)
    assert np.all(sample_entropy(1, 3, 100, seed=2).values == 0)
    assert np.all(sample_entropy(2, 3, 100, seed=2, statistic="T").values > -1e300)


def test_zero_eigenvalue_contributes_nothing():
    assert entropy_S(np.array([[0.0, 1.0]]))[0] == 0.0


def test_sampling_dimension_checks():
    with pytest.raises(ValueError):
        sample_entropy(3, 2, 10, 0)
    with pytest.raises(ValueError):
        sample_entropy(2, 65, 10, 0)
    with pytest.raises(ValueError):
        sample_entropy(2, 2, 10, 0, statistic="X")


def test_sampling_reproducible_across_workers():
    a = sample_entropy(2, 3, 40_000, seed=9, workers=1).values
    b = sample_entropy(2, 3, 40_000, seed=9, workers=3).values
    assert np.array_equal(a, b)
    c = sample_entropy(2, 3, 40_000, seed=10).values
    assert not np.array_equal(a, c)


# ---- estimation -------------------------------------------------------------


def test_constant_samples():
    est = estimate_cumulants(np.zeros(2000), 6)
    assert est.values == (0.0,) * 6
    assert est.stderr == (0.0,) * 6


def test_normal_samples():
    x = np.random.default_rng(0).standard_normal(200_000)
    est = estimate_cumulants(x, 4)
    for l, target in zip(range(1, 5), (0.0, 1.0, 0.0, 0.0)):
        assert abs(est.estimate(l) - target) <= 4 * est.error(l)


def test_exponential_samples():
    # Exp(1): kappa_l = (l - 1)!
    x = np.random.default_rng(1).exponential(size=400_000)
    est = estimate_cumulants(x, 3)
    for l in (1, 2, 3):
        assert abs(est.estimate(l) - factorial(l - 1)) <= 4 * est.error(l)


def test_estimation_preconditions():
    with pytest.raises(InsufficientSamples):
        estimate_cumulants(np.zeros(999), 2)
    with pytest.raises(ValueError):
        estimate_cumulants(np.zeros(2000), 7)
    with pytest.raises(ValueError):
        estimate_cumulants(np.zeros(2000), 2, batches=10)


def test_entropy_mean_at_two_two():
    est = estimate_cumulants(sample_entropy(2, 2, 100_000, seed=4), 1)
    assert abs(est.estimate(1) - 1 / 3) <= 4 * est.error(1)


# ---- reports ----------------------------------------------------------------


def test_verify_trivial_point():
    r = verify(1, 5, [1, 2], N=1000, seed=7)
    assert r.passed
    for res in r.results:
        assert res.exact == "0." + "0" * 30
        assert res.estimate == 0.0 and res.stderr == 0.0 and res.z == 0.0


def test_verify_report_json_and_determinism():
    r1 = verify(2, 2, [1, 2], N=20_000, seed=5, workers=1)
    r2 = verify(2, 2, [1, 2], N=20_000, seed=5, workers=2)
    assert r1.to_json() == r2.to_json()
    d = json.loads(r1.to_json())
    assert set(d) >= {"m", "n", "N", "seed", "orders"}
    assert set(d["orders"]["1"]) >= {"exact", "estimate", "stderr", "z", "pass"}
    assert "wall_time" in r1.to_dict(include_timing=True)
    for res in r1.results:
        assert res.passed == (abs(res.z) <= r1.threshold)


def test_verify_flags_a_wrong_value():
    # an absurd threshold of zero fails any non-degenerate comparison
    r = verify(2, 3, [1], N=5000, seed=1, threshold=0.0)
    assert not r.passed


def test_verify_orders_checked():
    with pytest.raises(ValueError):
        verify(2, 2, [7], N=1000)
    with pytest.raises(ValueError):
        verify(2, 2, [], N=1000)
