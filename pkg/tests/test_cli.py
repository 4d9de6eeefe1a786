import io
import json
import subprocess
import sys

import pytest

from entcum import cli
from entcum.convert import Converter
from entcum.emit import from_json
from entcum.symexpr import expr_equal


def run(args, tmp_path):
    out = io.StringIO()
    code = cli.run(list(args) + ["--cache", str(tmp_path / "cache")], out=out)
    return code, out.getvalue()


def test_eval_mean_at_two_two(tmp_path):
    code, out = run(["eval", "--of", "S", "--order", "1", "--m", "2", "--n", "2", "--digits", "30"], tmp_path)
    assert code == 0
    assert out.strip() == "0.333333333333333333333333333333"


def test_cumulant_latex(tmp_path):
    code, out = run(["cumulant", "--of", "S", "--order", "2", "--format", "latex"], tmp_path)
    assert code == 0
    assert r"\psi_1(mn)" in out and r"\psi_1(n)" in out


def test_json_round_trip(tmp_path, engine):
    code, out = run(["cumulant", "--of", "S", "--order", "3", "--format", "json"], tmp_path)
    assert code == 0
    assert expr_equal(from_json(out), Converter(engine).cumulant_S(3))


def test_cold_and_warm_cache_identical(tmp_path):
    args = ["cumulant", "--of", "T", "--order", "4"]
    cold = run(args, tmp_path)
    warm = run(args, tmp_path)
    assert cold == warm and cold[0] == 0


def test_joint_and_mean(tmp_path):
    code, out = run(["cumulant", "--of", "T", "--order", "2", "--joint", "R:2"], tmp_path)
    assert code == 0 and "psi_0(m+alpha)" in out
    code, out = run(["mean", "--of", "R", "--order", "2"], tmp_path)
    assert code == 0 and out.strip() == "2*m^3 + 3*m^2*alpha + m*alpha^2"
    code, _ = run(["cumulant", "--of", "S", "--order", "2", "--joint", "T:1"], tmp_path)
    assert code == 1


def test_verify_trivial(tmp_path):
    code, out = run(["verify", "--m", "1", "--n", "5", "--orders", "1,2", "--samples", "1000", "--seed", "7"], tmp_path)
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    assert all(float(o["exact"]) == 0 and o["estimate"] == 0 for o in report["orders"].values())


def test_verify_failure_exit_code(tmp_path):
    code, _ = run(["verify", "--m", "2", "--n", "3", "--orders", "1", "--samples", "2000", "--threshold", "0"],
                  tmp_path)
    assert code == 2


@pytest.mark.parametrize("args", [
    ["bogus"],
    ["cumulant"],
    ["cumulant", "--order", "0"],
    ["eval", "--order", "1", "--m", "3", "--n", "2"],
    ["verify", "--m", "2", "--n", "2", "--orders", "9"],
    ["verify", "--m", "2", "--n", "2", "--samples", "10"],
    ["cumulant", "--order", "2", "--joint", "X:1"],
])
def test_usage_errors(tmp_path, args, capsys):
    code, out = run(args, tmp_path)
    assert code == 1
    assert out == ""
    assert "error" in capsys.readouterr().err


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    from entcum.symexpr import InvariantError

    def broken(self, l):
        raise InvariantError("synthetic")

    monkeypatch.setattr(cli.CumulantEngine, "cumulant_T", broken)
    code, _ = run(["cumulant", "--of", "T", "--order", "2"], tmp_path)
    assert code == 3


def test_cache_list_and_clear(tmp_path):
    run(["cumulant", "--of", "T", "--order", "2"], tmp_path)
    code, out = run(["cache", "list"], tmp_path)
    assert code == 0 and "T_1_2.json" in out.split()
    code, _ = run(["cache", "clear"], tmp_path)
    assert code == 0
    assert run(["cache", "list"], tmp_path)[1] == ""


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "entcum.cli", "eval", "--order", "1", "--m", "2", "--n", "3", "--digits", "5",
         "--cache", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.45000"
