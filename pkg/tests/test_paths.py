import cmath
import math

import pytest
from hypothesis import assume, given, strategies as st

from lame_accessory.curve import depress
from lame_accessory.errors import PathCollision
from lame_accessory.paths import (build_loops, choose_basepoint, max_spacing_ratio, order_singulars,
                                  winding_number)
from lame_accessory.precision import PrecisionContext


def test_basepoint_rule(entry):
    assert choose_basepoint([1, -1 + 1j, -2]) == (1j, True)
    p, standard = choose_basepoint([0, 2j, -2j])
    assert p == 1 and not standard
    cubic = depress(entry("1/15").curve, PrecisionContext(digits=40))
    assert all(abs(complex(t).real) > 0 for t in cubic.roots)
    assert choose_basepoint(cubic)[0] == 1j


def test_order_by_argument():
    assert order_singulars([1, 2j, -1], -1j) == [1, 2j, -1]
    assert order_singulars([-1, 2j, 1], -1j) == [1, 2j, -1]


@given(st.lists(st.complex_numbers(min_magnitude=0.2, max_magnitude=2), min_size=3, max_size=3),
       st.floats(0, 2 * math.pi))
def test_rotation_permutes_cyclically(roots, phi):
    args = sorted(cmath.phase(t) for t in roots)
    gaps = [b - a for a, b in zip(args, args[1:])] + [args[0] + 2 * math.pi - args[-1]]
    assume(min(gaps) > 1e-6)
    assume(all(abs(abs(cmath.phase(t * cmath.exp(1j * phi))) - math.pi) > 1e-6 for t in roots))
    base = order_singulars(roots, 0)
    rot = order_singulars([t * cmath.exp(1j * phi) for t in roots], 0)
    idx = [base.index(t * cmath.exp(-1j * phi)) if t * cmath.exp(-1j * phi) in base
           else min(range(3), key=lambda k: abs(base[k] - t * cmath.exp(-1j * phi))) for t in rot]
    assert idx in ([0, 1, 2], [1, 2, 0], [2, 0, 1])


def test_frozen_order_1_6ii(entry):
    cubic = depress(entry("1/6ii").curve, PrecisionContext(digits=40))
    plan = build_loops(cubic)
    assert plan.basepoint == 1j
    got = [complex(t) for t in plan.ordered_singulars]
    expected = [-7 / 3 - 4 * 2 ** 0.5 * 1j, 14 / 3, -7 / 3 + 4 * 2 ** 0.5 * 1j]
    assert all(abs(a - b) < 1e-12 for a, b in zip(got, expected))


def _check_plan(plan, roots, step_ratio):
    for i, loop in enumerate(plan.loops):
        assert loop[0] == plan.basepoint == loop[-1]
        assert max_spacing_ratio(loop, roots) <= step_ratio * (1 + 1e-9)
        for j, t in enumerate(plan.ordered_singulars):
            assert winding_number(loop, t) == (1 if i == j else 0)
    whole = [z for loop in plan.loops for z in loop]
    for t in plan.ordered_singulars:
        assert winding_number(whole, t) == 1


def test_symmetric_roots():
    roots = [cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    plan = build_loops(roots, basepoint=1j)
    _check_plan(plan, roots, 0.5)


def test_halving_step_doubles_waypoints(entry):
    cubic = depress(entry("1/15").curve, PrecisionContext(digits=40))
    a = build_loops(cubic, step_ratio=0.5).waypoint_count()
    b = build_loops(cubic, step_ratio=0.25).waypoint_count()
    assert 1.5 < b / a < 2.6


@given(st.lists(st.complex_numbers(max_magnitude=1), min_size=3, max_size=3),
       st.sampled_from([0.2, 0.5, 0.6]))
def test_random_plans_wind_correctly(roots, step_ratio):
    assume(min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i)) > 0.05)
    assume(min(abs(t - 1j) for t in roots) > 0.05 and min(abs(t) for t in roots) > 0.05)
    try:
        plan = build_loops(roots, step_ratio=step_ratio)
    except PathCollision:
        pytest.fail("planner rejected well-separated roots")
    _check_plan(plan, roots, step_ratio)


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_loops([1, -1, 2j], step_ratio=0.9)
    with pytest.raises(PathCollision):
        build_loops([1, -1, 2j], basepoint=1)
