import cmath
import math
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from lame_accessory.catalog import verify_entry
from lame_accessory.curve import depress
from lame_accessory.lame import LameOperator, evaluate, series_at
from lame_accessory.monodromy import (TransitionCache, continue_along, det, fricke_residual, match_squares,
                                      match_triple, trace)
from lame_accessory.paths import build_loops
from lame_accessory.precision import PrecisionContext


@pytest.fixture
def op_1_15(entry, ctx40):
    return LameOperator(depress(entry("1/15").curve, ctx40), 3, Fraction(-55, 54))


def close(A, B, tol):
    return all(abs(A[i][j] - B[i][j]) < tol for i in range(2) for j in range(2))


def test_constant_loop_is_identity(op_1_15, ctx40):
    M = continue_along(op_1_15, [1j, 1j, 1j], ctx40)
    assert M == [[1, 0], [0, 1]]


def test_contractible_loop(op_1_15, ctx40):
    # small circle around i, far from the roots
    loop = [1j + 0.3 * cmath.exp(2j * math.pi * k / 12) for k in range(13)]
    loop[-1] = loop[0]
    M = continue_along(op_1_15, loop, ctx40)
    with ctx40.scope():
        assert close(M, [[1, 0], [0, 1]], mpfr(10) ** -35)


def test_single_loop_is_reflection(op_1_15, ctx40):
    plan = build_loops(op_1_15.cubic, ctx=ctx40)
    for loop in plan.loops:
        M = continue_along(op_1_15, loop, ctx40)
        with ctx40.scope():
            assert abs(trace(M)) < mpfr(10) ** -30
            assert abs(det(M) + 1) < mpfr(10) ** -30


def test_cache_inverse_step(op_1_15, ctx40):
    cache = TransitionCache(op_1_15, ctx40)
    a, b = 1j, 1j + 0.5
    cache.step(a, b)
    back = cache.step(b, a)
    direct = evaluate(series_at(op_1_15, b, ctx40), a)
    with ctx40.scope():
        assert close(back, direct, mpfr(10) ** -35)


@pytest.mark.parametrize("label", ["12/3", "1/10"])
def test_table_triples(entry, label):
    ms, rep = verify_entry(entry(label), PrecisionContext(digits=40))
    assert rep.matched and ms.digits_est >= 25
    assert rep.max_error < 1e-25


def test_trace_at_infinity(entry, ctx40):
    ms, _ = verify_entry(entry("1/15"), ctx40)
    t = ms.trace_inf
    with ctx40.scope():
        assert abs(t.real) < mpfr(10) ** -30
        assert abs(abs(t) - 2 * gmpy2.cos(gmpy2.const_pi() / 6)) < mpfr(10) ** -30
        assert abs(det(ms.A_inf) + 1) < mpfr(10) ** -30


def test_match_squares_permutation():
    rep = match_squares([16.0, 5.0, 20.0], [5, 16, 20], 1e-10)
    assert rep.matched and rep.permutation == (2, 1, 3) and not rep.exact_order
    assert not match_squares([16.0, 5.0, 20.0], [5, 16, 21], 1e-10).matched
    assert match_squares([5, 16, 20], [5, 16, 20], 1e-10).exact_order


def test_match_triple_rejects_nonpositive(entry, ctx40):
    ms, _ = verify_entry(entry("1/15"), ctx40)
    with pytest.raises(ValueError):
        match_triple(ms, [5, -16, 20], 1e-10)


def test_fricke_residual_values(ctx40):
    with ctx40.scope():
        assert fricke_residual([5, 16, 20], 3) < mpfr(10) ** -38
    # squares enter linearly: 5 + 16 + 21 - sqrt(5 * 16 * 21) - 1
    assert abs(float(fricke_residual([5, 16, 21], 3)) - (41 - 1680 ** 0.5)) < 1e-12


def test_json_has_all_fields(entry, ctx40):
    ms, _ = verify_entry(entry("1/15"), ctx40)
    data = ms.to_json()
    assert set(data) >= {"A1", "A2", "A3", "A_inf", "pair_traces", "trace_squares", "digits_est", "residuals"}
    assert data["trace_squares"][0].endswith("@40")
