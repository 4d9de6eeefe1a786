import json
from fractions import Fraction

import mpmath
import pytest

from entcum.engine import RK, TK, CumulantEngine, CumulantKey, DiskCache, StatKind, check_final_form
from entcum.exactalg import T_CONTEXT
from entcum.numverify import eval_expr
from entcum.symexpr import Base, InvariantError, SymExpr, expr_equal


def rising(x, k):
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


@pytest.mark.parametrize("k", range(0, 11))
def test_mean_R_recurrences_agree(engine, k):
    assert expr_equal(engine.mean_R(k), engine.mean_R_alt(k))


@pytest.mark.parametrize("k", range(0, 7))
def test_mean_R_single_row_is_gamma_moment(engine, k):
    # m = 1: the single eigenvalue is Gamma(n) distributed, E[x^k] = (n)_k
    for n in (1, 2, 5):
        assert engine.mean_R(k).rational_part().evaluate({"m": 1, "alpha": n - 1}) == rising(n, k)


@pytest.mark.parametrize("k", range(0, 6))
def test_mean_T_single_row(engine, k):
    # m = 1: E[x^k ln x] = (n)_k psi_0(n + k)
    for n in (2, 4):
        exact = eval_expr(engine.mean_T(k), 1, n, 40)
        with mpmath.workdps(40):
            oracle = mpmath.mpf(rising(n, k).numerator) * mpmath.psi(0, n + k)
            assert abs(exact - oracle) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("l", range(1, 7))
def test_final_form_checked(engine, l):
    e = engine.cumulant_T(l)
    check_final_form(e)
    assert e.bases() <= {Base.M_PLUS_ALPHA}


def test_final_form_rejects_alpha_base():
    with pytest.raises(InvariantError):
        check_final_form(SymExpr.psi(0, Base.ALPHA))


def test_key_validation():
    with pytest.raises(ValueError):
        CumulantKey(TK, -1, 2).validate()
    with pytest.raises(ValueError):
        CumulantKey(RK, 1, 0).validate()
    assert CumulantKey(TK, 2, 3).filename == "T_2_3.json"
    assert str(CumulantKey(RK, 2, 3)) == "kappa_3(R_2, T, T)"


def test_R0_joint_cumulants_vanish(engine):
    # R_0 = m is deterministic
    for l in range(2, 5):
        assert engine.kappa(RK, 0, l).is_zero()


def test_cycle_detection():
    eng = CumulantEngine()
    original = eng._resolve

    def looping(key):
        if key == CumulantKey(TK, 1, 2):
            return eng.joint_cumulant(key)
        return original(key)

    eng._resolve = looping
    with pytest.raises(InvariantError, match="cyclic"):
        eng.kappa(TK, 1, 2)


def test_disk_cache_round_trip(tmp_path):
    cold = CumulantEngine(tmp_path)
    k3 = cold.cumulant_T(3)
    names = DiskCache(tmp_path).entries()
    assert "T_1_3.json" in names
    warm = CumulantEngine(tmp_path)
    loaded = warm.disk.load(CumulantKey(TK, 1, 3))
    assert loaded == k3
    assert warm.cumulant_T(3) == k3


def test_disk_cache_rejects_tampering(tmp_path, caplog):
    eng = CumulantEngine(tmp_path)
    truth = eng.cumulant_T(2)
    path = tmp_path / "T_1_2.json"
    payload = json.loads(path.read_text())
    payload["expr"]["terms"][0]["coeff"]["num"][0][0] = "12345/1"
    path.write_text(json.dumps(payload))
    fresh = CumulantEngine(tmp_path)
    assert fresh.disk.load(CumulantKey(TK, 1, 2)) is None
    assert fresh.cumulant_T(2) == truth
    # the recomputed value is written back
    assert CumulantEngine(tmp_path).disk.load(CumulantKey(TK, 1, 2)) == truth


def test_disk_cache_schema_and_garbage(tmp_path):
    eng = CumulantEngine(tmp_path)
    eng.mean_T(1)
    path = tmp_path / "T_1_1.json"
    payload = json.loads(path.read_text())
    payload["cache_schema"] = 99
    path.write_text(json.dumps(payload))
    assert DiskCache(tmp_path).load(CumulantKey(TK, 1, 1)) is None
    path.write_text("{not json")
    assert DiskCache(tmp_path).load(CumulantKey(TK, 1, 1)) is None


def test_cache_clear(tmp_path):
    eng = CumulantEngine(tmp_path)
    eng.cumulant_T(2)
    cache = DiskCache(tmp_path)
    count = len(cache.entries())
    assert count > 0
    assert cache.clear() == count
    assert cache.entries() == []


def test_delta_argument_checks(engine):
    with pytest.raises(ValueError):
        engine.delta_T(1, 1)
    with pytest.raises(ValueError):
        engine.cumulant_T(0)
