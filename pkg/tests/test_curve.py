import json
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpfr

from lame_accessory.algebraic import AlgebraicNumber
from lame_accessory.curve import (WeierstrassCurve, b_invariants, depress, from_invariants, load_curve,
                                  parse_coefficient, real_points)
from lame_accessory.errors import DegenerateCubic, SchemaError
from lame_accessory.precision import PrecisionContext


def symbolic_short_form(a1, a2, a3, a4, a6):
    """g2, g3 by substituting y -> (Y - a1 x - a3)/2, x -> X - shift and reading off coefficients."""
    x, y, X, Y = sympy.symbols("x y X Y")
    eq = y ** 2 + a1 * x * y + a3 * y - (x ** 3 + a2 * x ** 2 + a4 * x + a6)
    eq = sympy.expand(4 * eq.subs(y, (Y - a1 * x - a3) / 2))
    rhs = sympy.Poly(sympy.expand(Y ** 2 - eq), x)            # cubic in x with leading 4
    c3, c2, c1, c0 = rhs.all_coeffs()
    shift = c2 / (3 * c3)
    short = sympy.Poly(sympy.expand(rhs.as_expr().subs(x, X - shift)), X)
    _, zero, m_g2, m_g3 = short.all_coeffs()
    assert sympy.simplify(zero) == 0
    return sympy.nsimplify(-m_g2), sympy.nsimplify(-m_g3), shift


def test_b_invariants_1_15(entry, ctx40):
    b2, b4, b6 = b_invariants(entry("1/15").curve, ctx40)
    assert (b2, b4, b6) == (5, -269, -2639)


@pytest.mark.parametrize("coeffs", [(1, 1, 1, -135, -660), (0, 0, 1, 0, -7), (0, 0, 0, 0, -1), (1, 0, 1, -19, 26)])
def test_depress_matches_symbolic_oracle(coeffs):
    ctx = PrecisionContext(digits=40)
    curve = WeierstrassCurve(*map(Fraction, coeffs))
    cubic = depress(curve, ctx)
    g2, g3, _ = symbolic_short_form(*coeffs)
    with ctx.scope():
        for got, want in ((cubic.g2, sympy.Rational(g2)), (cubic.g3, sympy.Rational(g3))):
            assert abs(got - mpfr(want.p) / want.q) < 1e-35 * max(1, abs(float(want)))


def test_short_form_x3_minus_1():
    cubic = depress(WeierstrassCurve(a6=Fraction(-1)), PrecisionContext(digits=30))
    assert cubic.g2 == 0 and cubic.g3 == 4


def test_points_are_transported(entry):
    ctx = PrecisionContext(digits=50)
    for label in ("81/1", "1/15", "5/5"):
        curve = entry(label, 3).curve
        cubic = depress(curve, ctx)
        for x, y in real_points(curve, ["0.5", "2", "-3.25"], ctx):
            with ctx.scope():
                assert abs(curve.equation_residual(x, y, ctx)) < mpfr(10) ** -40
                X, Y = cubic.transport(x, y)
                assert abs(Y * Y - cubic(X)) < mpfr(10) ** -38 * max(1, abs(X) ** 3)


def test_algebraic_coefficients(entry):
    ctx = PrecisionContext(digits=40)
    cubic = depress(entry("8/2ii").curve, ctx)   # complex coefficients
    assert not entry("8/2ii").curve.is_real
    with ctx.scope():
        assert abs(sum(cubic.roots)) < ctx.tolerance()
        assert cubic.min_separation() > 0


def test_singular_curve():
    # y^2 = x^3 has a cusp
    with pytest.raises(DegenerateCubic):
        depress(WeierstrassCurve(), PrecisionContext(digits=30))
    with pytest.raises(DegenerateCubic):
        from_invariants(3, 1, PrecisionContext(digits=30))      # g2^3 = 27 g3^2


def test_parse_coefficient_forms():
    assert parse_coefficient("-55/54") == Fraction(-55, 54)
    assert parse_coefficient(7) == 7
    assert parse_coefficient({"minpoly": [-1, 2], "approx": "0.5"}) == Fraction(1, 2)
    a = parse_coefficient({"minpoly": [-5, 0, 1], "approx": "2.236", "digits": 4})
    assert isinstance(a, AlgebraicNumber) and a.degree == 2
    for bad in ("abc", True, {"minpoly": [1.5, 1], "approx": "1"}, {"minpoly": [1, 1]},
                {"minpoly": [-2, 0, 1], "approx": "1.4", "extra": 1}, [1, 2]):
        with pytest.raises(SchemaError):
            parse_coefficient(bad, "row-x")


def test_curve_json_round_trip(tmp_path, entry):
    for label in ("1/15", "8/2ii", "725/25ii"):
        curve = entry(label).curve
        path = tmp_path / "c.json"
        path.write_text(json.dumps(curve.to_json()))
        assert load_curve(path) == curve
    path.write_text(json.dumps({"curve": {"a6": "-7", "a3": "1"}}))
    assert load_curve(path) == WeierstrassCurve(a3=Fraction(1), a6=Fraction(-7))
    with pytest.raises(SchemaError, match="unknown curve keys"):
        WeierstrassCurve.from_json({"a5": "1"})
