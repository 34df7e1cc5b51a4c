from fractions import Fraction
from types import SimpleNamespace

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from lame_accessory.catalog import verify_entry
from lame_accessory.errors import NoBracket, Stalled
from lame_accessory.precision import PrecisionContext, to_big
from lame_accessory.solver import (LameFamily, SolverConfig, objective_f, objective_g, solve_complex,
                                   solve_real)


def fake_ms(im12, im31, im32):
    # pair_traces are stored as (tr A3A2, tr A1A2, tr A3A1)
    return SimpleNamespace(pair_traces=(mpc(3, im32), mpc(1, im12), mpc(2, im31)))


def test_objectives_definition():
    assert objective_f(fake_ms(0, 0, 0)) == 0 and objective_g(fake_ms(0, 0, 0)) == 0
    ms = fake_ms(0.1, -0.2, 0.05)
    assert objective_f(ms) == pytest.approx(0.1)
    assert objective_g(ms) == pytest.approx(0.35)


def test_objectives_at_table_values(entry, ctx40):
    ms, _ = verify_entry(entry("1/15"), ctx40)
    assert abs(objective_f(ms)) < 1e-25
    ms, _ = verify_entry(entry("8/2ii"), ctx40)
    assert objective_g(ms) < 1e-25


def test_config_validation():
    for bad in (dict(ex=0), dict(initial_step=-1), dict(digits_schedule=(19,)), dict(digits_schedule=(40, 40)),
                dict(bracket_limit=0)):
        with pytest.raises(ValueError):
            SolverConfig(**bad)
    assert SolverConfig(digits_schedule=[40, 80]).digits_schedule == (40, 80)


@pytest.mark.slow
def test_real_bisection_1_10(entry):
    e = entry("1/10")
    ctx = PrecisionContext(digits=40)
    res = solve_real(LameFamily(e.curve, e.e), SolverConfig(), ctx, list(e.target_squares))
    with ctx.scope():
        assert abs(res.C - to_big(Fraction(95, 432), ctx)) < 1e-25
    assert res.match.matched and res.alternates == []


def test_zero_is_returned_without_iteration(entry):
    e = entry("81/1")
    res = solve_real(LameFamily(e.curve, e.e), SolverConfig(digits_schedule=(40,)), PrecisionContext(digits=40),
                     list(e.target_squares))
    assert res.C == 0 and res.iterations == 0


@pytest.mark.slow
def test_no_bracket_for_unreachable_triple(entry):
    e = entry("1/15")
    with pytest.raises(NoBracket):
        solve_real(LameFamily(e.curve, 3), SolverConfig(digits_schedule=(30,), bracket_limit=8),
                   PrecisionContext(digits=30), [2, 2, 2])


def known_8_2ii(ctx):
    with ctx.scope():
        return (mpc(-123) - 78 * mpc(0, gmpy2.sqrt(mpfr(2)))) / 128


def test_complex_search_starts_at_answer(entry):
    e = entry("8/2ii")
    ctx = PrecisionContext(digits=40)
    res = solve_complex(LameFamily(e.curve, e.e), SolverConfig(digits_schedule=(40,)), ctx,
                        list(e.target_squares), start_C=known_8_2ii(ctx))
    assert res.iterations == 0


@pytest.mark.slow
def test_complex_search_basin(entry):
    e = entry("8/2ii")
    ctx = PrecisionContext(digits=40)
    C = known_8_2ii(ctx)
    with ctx.scope():
        seed = C + mpfr("1e-3")
    res = solve_complex(LameFamily(e.curve, e.e), SolverConfig(digits_schedule=(40,), initial_step=1e-3), ctx,
                        list(e.target_squares), start_C=seed)
    assert abs(res.C - C) < 1e-20
    assert res.match.matched


@pytest.mark.slow
def test_stalled_when_ex_is_unreachable(entry):
    e = entry("1/15")
    ctx = PrecisionContext(digits=20)
    cfg = SolverConfig(digits_schedule=(20,), ex=1e-60, initial_step=1e-6)
    with pytest.raises(Stalled):
        solve_complex(LameFamily(e.curve, 3), cfg, ctx, start_C=to_big(Fraction(-55, 54), ctx))
    with pytest.raises(Stalled):
        solve_complex(LameFamily(e.curve, 3), SolverConfig(digits_schedule=(20,), max_iters=2), ctx, start_C=3 + 2j)
