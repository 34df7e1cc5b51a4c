"""Analytic continuation along loops and the resulting monodromy data.

Matrices use the row convention of :func:`lame.evaluate`: row ``j`` holds
``(y_j, y_j')``.  Then ``F_p(t) = F_p(q) F_q(t)`` and continuation along
``p_0, p_1, ..., p_m = p_0`` gives::

    M = F_(p_0)(p_1) F_(p_1)(p_2) ... F_(p_(m-1))(p_m)

which is the transpose of the column-convention product ``F_(p_(m-1))(p_m)
... F_(p_0)(p_1)``.  Traces of single matrices and of pairwise products are
the same in either convention.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from .algebraic import AlgebraicNumber, evaluate as evaluate_algebraic
from .lame import LameOperator, evaluate, series_at
from .paths import PathPlan
from .precision import PrecisionContext, to_big, to_string

Matrix = list


def identity():
    return [[mpc(1), mpc(0)], [mpc(0), mpc(1)]]


def matmul(A, B):
    return [
        [A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
        [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]],
    ]


def det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def trace(A):
    return A[0][0] + A[1][1]


def inverse(A):
    d = det(A)
    return [[A[1][1] / d, -A[0][1] / d], [-A[1][0] / d, A[0][0] / d]]


class TransitionCache:
    """Memo of transition matrices ``F_a(b)`` for one operator and context.

    A reversed step ``F_b(a)`` is served as the inverse of ``F_a(b)``,
    so the back half of every lasso costs no new series.
    """

    def __init__(self, op, ctx, order=None):
        self.op = op
        self.ctx = ctx
        self.order = order
        self.series = {}
        self.steps = {}

    def step(self, a, b):
        key = (a, b)
        if key in self.steps:
            return self.steps[key]
        back = self.steps.get((b, a))
        if back is not None:
            with self.ctx.scope():
                M = inverse(back)
        else:
            F = self.series.get(a)
            if F is None:
                F = series_at(self.op, a, self.ctx, self.order)
                self.series[a] = F
            M = evaluate(F, b)
        self.steps[key] = M
        return M


def continue_along(op: LameOperator, waypoints, ctx: PrecisionContext, cache=None, order=None):
    """Monodromy matrix of the closed polygon ``waypoints``.

    Raises
    ------
    OutsideDisk, NearSingular
        Propagated from series evaluation when the spacing is too coarse.
    """
    pts = [complex(z) for z in waypoints]
    if cache is None:
        cache = TransitionCache(op, ctx, order)
    M = identity()
    with ctx.scope():
        for a, b in zip(pts, pts[1:]):
            if a == b:
                continue
            M = matmul(M, cache.step(a, b))
    return M


@dataclass(frozen=True)
class MonodromySet:
    A1: Matrix
    A2: Matrix
    A3: Matrix
    A_inf: Matrix
    trace_squares: tuple
    digits_est: int
    pair_traces: tuple = ()
    trace_inf: object = None
    residuals: dict = field(default_factory=dict)
    ctx: PrecisionContext = field(default=None, compare=False)

    @property
    def matrices(self):
        return (self.A1, self.A2, self.A3)

    def to_json(self, digits=None):
        digits = digits or (self.ctx.digits if self.ctx else 40)
        enc = lambda z: to_string(z, digits)
        mat = lambda A: [[enc(x) for x in row] for row in A]
        return {
            "A1": mat(self.A1), "A2": mat(self.A2), "A3": mat(self.A3), "A_inf": mat(self.A_inf),
            "pair_traces": [enc(x) for x in self.pair_traces],
            "trace_squares": [enc(x) for x in self.trace_squares],
            "trace_inf": enc(self.trace_inf),
            "digits_est": self.digits_est,
            "residuals": {k: f"{v:.3e}" for k, v in self.residuals.items()},
        }


def _log_digits(x, cap):
    if x <= 0:
        return cap
    return max(0, min(cap, int(math.floor(-math.log10(x)))))


def assemble(A1, A2, A3, e, ctx) -> MonodromySet:
    with ctx.scope():
        pairs = (trace(matmul(A3, A2)), trace(matmul(A1, A2)), trace(matmul(A3, A1)))
        squares = tuple(t * t for t in pairs)
        prod = matmul(matmul(A1, A2), A3)
        A_inf = inverse(prod)
        t_inf = trace(prod)
        expected = 2 * gmpy2.cos(gmpy2.const_pi() / (2 * e))
        res = {}
        for i, A in enumerate((A1, A2, A3), 1):
            res[f"trace_A{i}"] = float(abs(trace(A)))
            res[f"det_A{i}+1"] = float(abs(det(A) + 1))
        res["det_A_inf+1"] = float(abs(det(A_inf) + 1))
        res["re_trace_inf"] = float(abs(t_inf.real))
        res["abs_trace_inf"] = float(abs(abs(t_inf) - expected))
    worst = max(res.values())
    return MonodromySet(A1, A2, A3, A_inf, squares, _log_digits(worst, ctx.digits), pairs, t_inf, res, ctx)


def monodromy_set(op: LameOperator, plan: PathPlan, ctx: PrecisionContext, order=None) -> MonodromySet:
    """``A_1, A_2, A_3`` along the plan's loops and ``A_inf = (A_1 A_2 A_3)^-1``."""
    cache = TransitionCache(op, ctx, order)
    A = [continue_along(op, loop, ctx, cache) for loop in plan.loops]
    return assemble(*A, op.e, ctx)


@dataclass(frozen=True)
class MatchReport:
    matched: bool
    permutation: tuple        # computed[permutation[i] - 1] ~ target[i]
    exact_order: bool
    max_error: float

    def to_json(self):
        return {"matched": self.matched, "permutation": list(self.permutation),
                "exact_order": self.exact_order, "max_error": self.max_error}


def match_squares(computed, target, tol, ctx=None) -> MatchReport:
    """Best permutation aligning ``computed`` with ``target`` (positive reals).

    Errors are relative for targets above 1 and absolute below.  Ties go
    to the lexicographically first permutation, so the identity wins when
    it is as good as any other.
    """
    ctx = ctx or PrecisionContext(digits=60)
    with ctx.scope():
        comp = [to_big(z, ctx) for z in computed]
        targ = [evaluate_algebraic(z, ctx) if isinstance(z, AlgebraicNumber) else to_big(z, ctx)
                for z in target]
        scale = [max(mpfr(1), abs(t)) for t in targ]

        def error(perm):
            return max(abs(comp[perm[i]] - targ[i]) / scale[i] for i in range(3))

        best_err, best = None, None
        for perm in itertools.permutations(range(3)):
            err = error(perm)
            if best_err is None or err < best_err:
                best_err, best = err, perm
        ok = best_err <= tol
        exact = bool(ok and error((0, 1, 2)) <= tol)
    return MatchReport(bool(ok), tuple(i + 1 for i in best), exact, float(best_err))


def match_triple(ms: MonodromySet, target_squares, tol) -> MatchReport:
    """Compare the trace squares with ``target_squares`` up to permutation."""
    if any(complex(t).real <= 0 for t in target_squares):
        raise ValueError("target squares must be positive")
    return match_squares(ms.trace_squares, target_squares, tol, ms.ctx)


def fricke_residual(squares, e):
    """``|x^2+y^2+z^2 - xyz - (2 - 2cos(pi/e))|`` with ``x, y, z`` positive roots."""
    xs = [gmpy2.sqrt(mpfr(s)) for s in squares]
    lhs = sum(mpfr(s) for s in squares) - xs[0] * xs[1] * xs[2]
    return abs(lhs - (2 - 2 * gmpy2.cos(gmpy2.const_pi() / e)))
