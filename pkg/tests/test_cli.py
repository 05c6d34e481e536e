import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ellipticore import dynsys
from ellipticore.cli import complex_literal, main, real_range
from ellipticore.qkernel import g2, jtheta
from ellipticore.reduced import evaluate


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out)


def cx(d):
    return complex(d["re"], d["im"])


@pytest.mark.parametrize("text,value", [("0+50i", 50j), ("-0.4-1e-3i", -0.4 - 0.001j), ("2i", 2j),
                                        ("1.5", 1.5), ("-i", -1j), ("+.5+i", 0.5 + 1j)])
def test_complex_literals(text, value):
    assert complex_literal(text) == value


@pytest.mark.parametrize("text", ["1 + 2i", "i2", "1+2j", "abc", ""])
def test_bad_complex_literal_exits_64(text):
    code, _, _ = run("eval", "theta3", "--tau", text)
    assert code == 64


def test_real_range():
    xs = real_range("0:1:0.1")
    assert len(xs) == 11
    assert xs[0] == 0 and xs[-1] == 1 and xs[3] == 0.3


def test_eval_theta3_at_cusp():
    d = run_json("eval", "theta3", "--x", "0", "--tau", "0+50i")
    assert d["schema"] == "ellipticore/1"
    assert abs(cx(d["value"]) - 1) < 1e-15
    for key in ("function", "x", "tau", "value", "method", "terms_used", "tail_estimate"):
        assert key in d
    assert d["method"] == "q"


def test_eval_g3_lemniscatic():
    d = run_json("eval", "g3", "--tau", "0+1i")
    assert abs(cx(d["value"])) <= 1e-12 * abs(g2(1j))


def test_eval_dual_route():
    q = run_json("eval", "theta1", "--x", "0.2", "--tau", "0+1.3i")
    s = run_json("eval", "theta1", "--method", "series", "--order", "16", "--x", "0.2", "--tau", "0+1.3i")
    assert abs(cx(q["value"]) - cx(s["value"])) <= 1e-11 * abs(cx(q["value"]))
    assert s["order"] == 16
    assert abs(cx(q["value"]) - jtheta(1, 0.2, 1.3j)) <= 1e-13


def test_eval_reports_reduction():
    d = run_json("eval", "wp", "--x", "0.2+0.1i", "--tau", "2.3+0.4i")
    assert d["map"] != {"a": 1, "b": 0, "c": 0, "d": 1}
    assert d["reduction_drift"] <= 1e-11
    raw = run_json("eval", "wp", "--x", "0.2+0.1i", "--tau", "2.3+0.4i", "--no-reduce")
    assert raw["reduction_drift"] is None
    assert abs(cx(d["value"]) - cx(raw["value"])) <= 1e-11 * abs(cx(raw["value"]))


def test_eval_csv():
    code, out, _ = run("eval", "sigma", "--x", "0.3", "--tau", "1i", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert abs(float(rows[0]["value_re"]) - evaluate("sigma", 0.3, 1j).value.real) < 1e-15


@pytest.mark.parametrize("function", ["theta[2,-1]", "theta1_prime", "sigma2", "zeta", "wp_prime", "eta",
                                      "etahat", "e1", "vartheta4"])
def test_eval_accepts_every_kind_of_name(function):
    d = run_json("eval", function, "--x", "0.15", "--tau", "0.1+1.1i")
    assert math.isfinite(d["value"]["re"])


def test_exit_codes():
    assert run("eval", "theta3", "--tau", "0.3-0.1i")[0] == 2
    assert run("eval", "theta3", "--tau", "0.3")[0] == 2
    code, _, err = run("eval", "wp", "--x", "0", "--tau", "1i")
    assert code == 3 and err.startswith("error:")
    code, _, err = run("eval", "theta3", "--tau", "0.5+0.001i", "--no-reduce", "--max-terms", "5")
    assert code == 4
    assert run("eval", "nosuch", "--tau", "1i")[0] == 2
    assert run("frobnicate")[0] == 64
    assert run("eval", "theta3")[0] == 64
    assert run("eval", "theta3", "--tau", "1i", "--rel-tol", "0")[0] == 2


def test_reduce_examples():
    d = run_json("reduce", "--tau", "0.25+2i")
    assert cx(d["reduced_tau"]) == 0.25 + 2j
    assert d["map"] == {"a": 1, "b": 0, "c": 0, "d": 1}
    for text, tau in (("5.3+0.9i", 5.3 + 0.9j), ("0.5+0.01i", 0.5 + 0.01j)):
        d = run_json("reduce", "--tau", text)
        t = cx(d["reduced_tau"])
        m = d["map"]
        assert t.imag >= math.sqrt(3) / 2 - 1e-12
        back = (m["d"] * t - m["b"]) / (-m["c"] * t + m["a"])
        assert abs(back - tau) < 1e-13 * max(1, abs(tau))


def test_expand_sigma():
    d = run_json("expand", "sigma", "--order", "3", "--representation", "g")
    got = {(r["k"], r["monomial"]): r["coefficient"] for r in d["rows"]}
    assert got == {(0, "1"): "1", (1, "1"): "0", (2, "g2"): "-1/2", (3, "g3"): "-6"}


def test_expand_table_a_is_integral():
    d = run_json("expand", "table-A", "--order", "8")
    assert len(d["rows"]) == 45
    for r in d["rows"]:
        assert str(int(r["value"])) == r["value"]
    first = {(r["m"], r["n"]): int(r["value"]) for r in d["rows"]}
    assert first[(1, 0)] == -1 and first[(0, 1)] == -3


def test_expand_theta1():
    d = run_json("expand", "theta1", "--order", "2", "--representation", "theta")
    rows = [r for r in d["rows"] if r["power"] == 3]
    assert rows == [{"power": 3, "monomial": "eta", "coefficient": "-2", "basis": "x^p",
                     "prefactor": "2*pi*etahat^3; U=vartheta2^4, V=vartheta4^4"}]


def test_expand_other_shapes():
    assert run_json("expand", "table-C", "--order", "3")["rows"][3]["value"] == "-6*g3"
    assert run_json("expand", "sigma2", "--order", "2")["rows"][0]["coefficient"] == "1"
    d = run_json("expand", "theta3", "--order", "1")
    assert d["rows"][0]["prefactor"].startswith("vartheta[0,0]")
    assert run("expand", "wp", "--order", "2")[0] == 2
    assert run("expand", "sigma", "--order", "-1")[0] == 2
    code, out, _ = run("expand", "table-G", "--order", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "family,m,n,value"


def test_verify_identities():
    d = run_json("verify", "identities", "--grid", "default")
    assert d["passed"]
    assert d["counts"]["fail"] == 0
    assert all(r["residual"] <= 1e-11 for r in d["rows"] if r["status"] == "pass")


def test_verify_modular():
    d = run_json("verify", "modular")
    assert d["passed"]
    maps = {r["point"].split(")")[0] for r in d["rows"] if r["check"] == "modular_law"}
    assert len(maps) >= 14


def test_verify_custom_grid():
    d = run_json("verify", "xsystem", "--x-points", "0.2,0.1+0.1i", "--tau-points", "1.1i")
    assert d["passed"]
    assert [cx(t) for t in d["grid"]["tau"]] == [1.1j]


def test_negative_control(monkeypatch):
    monkeypatch.setitem(dynsys.VAR_FLOW[2], 3, -1)
    code, out, err = run("verify", "all")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "dvartheta2/dtau" in err
    assert "vartheta_flow:dvartheta2/dtau" in err


def test_table_theta3():
    code, out, _ = run("table", "theta3", "--x", "0:1:0.1", "--tau", "0+1.2i")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x_re,x_im,re,im"
    assert len(lines) == 12
    for row in csv.DictReader(io.StringIO(out)):
        x = float(row["x_re"])
        d = run_json("eval", "theta3", "--x", repr(x), "--tau", "0+1.2i")
        assert float(row["re"]) == d["value"]["re"]
        assert float(row["im"]) == d["value"]["im"]


def test_table_marks_poles():
    code, out, _ = run("table", "wp", "--x", "0:0.2:0.1", "--tau", "0+1i")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["pole"] == "1" and rows[0]["re"] == "" and rows[0]["im"] == ""
    assert rows[1]["pole"] == "0" and float(rows[1]["re"]) > 0


def test_table_json():
    d = run_json("table", "sigma1", "--x", "0:0.2:0.1", "--tau", "1i", "--format", "json")
    assert len(d["rows"]) == 3


@pytest.mark.parametrize("argv", [
    ("eval", "wp_prime", "--x", "0.3-0.1i", "--tau", "2.4+0.7i"),
    ("verify", "recurrences"),
    ("expand", "table-B0", "--order", "6"),
    ("table", "zeta", "--x", "0:0.5:0.25", "--tau", "0.2+0.9i"),
])
def test_byte_identical_output(argv):
    assert run(*argv) == run(*argv)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "ellipticore", "eval", "theta3", "--tau", "0+50i"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0
    assert abs(cx(json.loads(p.stdout)["value"]) - 1) < 1e-15
