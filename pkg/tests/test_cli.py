import json
import math
import random
from fractions import Fraction

import pytest
import gmpy2
from gmpy2 import mpfr

from lame_accessory.cli import InputError, RunReport, literal_digits, main, parse_value, parse_values
from lame_accessory.precision import PrecisionContext


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def squares(report):
    return sorted(float(s.split(",")[0].split("@")[0]) for s in report["result"]["monodromy"]["trace_squares"])


def strip_timings(report):
    report = dict(report)
    report.pop("timings")
    return report


def test_monodromy_1_15(capsys, curve_file):
    code, rep, err = run(capsys, "monodromy", "--curve", curve_file("1/15"), "--e", "3", "--C", "-55/54",
                         "--digits", "40")
    assert code == 0 and rep["result"]["invariants_pass"]
    assert squares(rep) == pytest.approx([5, 16, 20], abs=1e-25)
    assert "trace squares" in err


def test_monodromy_81_1(capsys, curve_file):
    code, rep, _ = run(capsys, "monodromy", "--curve", curve_file("81/1"), "--e", "3", "--C", "0")
    rho = -1 / (2 * math.cos(5 * math.pi / 9))
    assert code == 0
    assert squares(rep) == pytest.approx([rho ** 2] * 3, rel=1e-13)


def test_digits_minimum(capsys, curve_file, monkeypatch):
    code, rep, _ = run(capsys, "monodromy", "--curve", curve_file("1/15"), "--e", "3", "--C", "0", "--digits", "19")
    assert code == 2 and rep["result"]["error"]["type"] == "InputError"
    monkeypatch.setenv("LAME_DEFAULT_DIGITS", "19")
    assert run(capsys, "identify", "--value", "0.5")[0] == 2
    monkeypatch.setenv("LAME_DEFAULT_DIGITS", "abc")
    assert run(capsys, "identify", "--value", "0.5")[0] == 2
    monkeypatch.setenv("LAME_DEFAULT_DIGITS", "64")
    assert run(capsys, "identify", "--value", "0.5")[1]["context"]["digits"] == 64


def test_input_errors(capsys, tmp_path, curve_file):
    assert run(capsys, "monodromy", "--curve", str(tmp_path / "missing.json"), "--e", "3", "--C", "0")[0] == 2
    cusp = tmp_path / "cusp.json"
    cusp.write_text('{"a6": "0"}')
    assert run(capsys, "monodromy", "--curve", str(cusp), "--e", "3", "--C", "0")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"a4": "x"}')
    assert run(capsys, "monodromy", "--curve", str(bad), "--e", "3", "--C", "0")[0] == 2
    assert run(capsys, "monodromy", "--curve", curve_file("1/15"), "--e", "3", "--C", "open('x')")[0] == 2
    assert run(capsys, "solve", "--curve", curve_file("1/15"), "--e", "3", "--target", "5,16")[0] == 2
    assert run(capsys, "solve", "--curve", curve_file("1/15"), "--e", "3", "--target", "5,-16,20")[0] == 2


@pytest.mark.slow
def test_solve_1_10(capsys, curve_file):
    code, rep, err = run(capsys, "solve", "--curve", curve_file("1/10"), "--e", "3", "--target", "10,6,15")
    assert code == 0
    assert rep["result"]["minpoly"] == [-95, 432]
    got = Fraction(*mpfr(rep["result"]["C"].split("@")[0], 200).as_integer_ratio())
    assert abs(got - Fraction(95, 432)) < Fraction(1, 10 ** 25)
    assert "432x-95" in err


@pytest.mark.slow
def test_solve_unreachable_target(capsys, curve_file):
    code, rep, _ = run(capsys, "solve", "--curve", curve_file("1/15"), "--e", "3", "--target", "2,2,2")
    assert code == 4 and rep["result"]["error"]["type"] == "NoBracket"


@pytest.mark.slow
def test_solve_stalled(capsys, curve_file):
    code, rep, _ = run(capsys, "solve", "--curve", curve_file("1/15"), "--e", "3", "--target", "5,16,20",
                       "--complex", "--digits", "20", "--ex", "1e-60")
    assert code == 5 and rep["result"]["error"]["type"] == "Stalled"


def test_verify_labels(capsys):
    code, rep, _ = run(capsys, "verify", "--label", "1/15")
    assert code == 0 and rep["result"]["entries"][0]["status"] == "pass"
    code, rep, _ = run(capsys, "verify", "--label", "2304/2")
    rho = 3 + math.sqrt(6) + math.sqrt(2) + math.sqrt(3)
    got = [float(s.split(",")[0].split("@")[0]) for s in rep["result"]["entries"][0]["trace_squares"]]
    assert code == 0 and got == pytest.approx([rho] * 3, rel=1e-15)
    code, rep, _ = run(capsys, "verify", "--label", "5/9@e5")
    assert code == 0 and rep["result"]["total"] == 1
    assert run(capsys, "verify", "--label", "5/9")[1]["result"]["total"] == 2
    assert run(capsys, "verify", "--label", "nope")[0] == 2


def test_verify_full_catalog(capsys):
    code, rep, err = run(capsys, "verify", "--digits", "40")
    assert code == 0 and rep["result"]["failures"] == []
    labels = [(r["label"], r["e"]) for r in rep["result"]["entries"]]
    assert labels == sorted(labels)
    assert "pass" in err


def test_verify_reports_failures(capsys, tmp_path, catalog):
    rows = [x.to_json() for x in catalog if x.label in ("1/15", "1/10")]
    rows[0]["expected_C"] = "1/2"
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(rows))
    code, rep, err = run(capsys, "verify", "--catalog", str(path))
    assert code == 6 and len(rep["result"]["failures"]) == 1
    assert rep["result"]["failures"][0] in err


def test_identify(capsys):
    code, rep, err = run(capsys, "identify", "--value", "-1.018518518518518518518518518518518518519")
    assert code == 0 and rep["result"]["minpoly"] == [55, 54] and err.strip() == "54x+55"
    assert run(capsys, "identify", "--value", "0.5")[1]["result"]["minpoly_text"] == "2x-1"
    rng = random.Random(11)
    digits = "0." + "".join(rng.choice("0123456789") for _ in range(40))
    code, rep, err = run(capsys, "identify", "--value", digits, "--max-degree", "6")
    assert code == 0 and not rep["result"]["found"] and err.strip() == "not found"
    assert run(capsys, "identify", "--value", "1+")[0] == 2
    assert run(capsys, "identify", "--value", "0.5", "--max-degree", "0")[0] == 2


def test_reports_are_deterministic(capsys, curve_file):
    args = ("monodromy", "--curve", curve_file("1/6ii"), "--e", "3", "--C", "1/27")
    first, second = run(capsys, *args)[1], run(capsys, *args)[1]
    assert json.dumps(strip_timings(first), sort_keys=True) == json.dumps(strip_timings(second), sort_keys=True)
    assert RunReport.from_json(json.loads(RunReport.from_json(first).dumps())).to_json() == first


def test_value_parser():
    ctx = PrecisionContext(digits=60)
    with ctx.scope():
        v = parse_values("5+2*sqrt(5), (7+3*sqrt(5))/2, 2*cos(pi/9)", ctx)
        assert abs(v[0] - (5 + 2 * mpfr(5).__pow__(mpfr(0.5)))) < mpfr(10) ** -55
        assert abs(v[2] - 2 * gmpy2.cos(gmpy2.const_pi() / 9)) < mpfr(10) ** -55
        long = "0.12345678901234567890123456789012345678901234567890"
        assert abs(parse_value(long, ctx) - mpfr(long)) < mpfr(10) ** -55
        z = parse_value("(-78*sqrt(-2) - 123)/128", ctx)
        assert abs(parse_value("log(-1)", ctx).imag - gmpy2.const_pi()) < mpfr(10) ** -55
        assert abs(z.imag + 78 * mpfr(2).__pow__(mpfr(0.5)) / 128) < mpfr(10) ** -55
        assert parse_value("2**-1", ctx) == 0.5
        assert parse_value("1.5,-2@30", ctx).imag == -2
        assert [complex(v) for v in parse_values("8.5e0@50, 1,2@30,3@20", ctx)] == [8.5, 1 + 2j, 3]
    for bad in ("1@30 junk", "__import__('os')", "x", "1/0", "", "a.b", "sqrt(1, 2)", "[1]"):
        with pytest.raises(InputError):
            parse_values(bad, ctx)
    assert literal_digits("-1.01851851851851851851") == 21
    assert literal_digits("0.5") == 1
