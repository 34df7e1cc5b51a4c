"""The algebraic Lamé operator and truncated power-series solutions.

The operator is::

    P(t) y'' + 1/2 P'(t) y' - (n(n+1) t + C) y = 0,   P = 4t^3 - g2 t - g3,

with ``n = 1/(2e) - 1/2``.  With this sign the exponents at infinity are
``-n/2`` and ``(n+1)/2`` and the monodromy around infinity has trace
``+-2i cos(pi/(2e))``.

At an ordinary point ``p`` put ``u = t - p`` and
``P = c0 + c1 u + c2 u^2 + 4u^3`` (``c2 = 12p``).  Writing the potential
as ``q0 + q1 u`` with ``q0 = -(n(n+1)p + C)`` and ``q1 = -n(n+1)``, the
coefficients of ``y = sum a_k u^k`` obey::

    c0 (k+2)(k+1) a[k+2] = -( c1 (k+1)(k+1/2) a[k+1]
                            + (c2 k^2 + q0) a[k]
                            + (2(k-1)(2k-1) + q1) a[k-1] )
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .curve import DepressedCubic
from .errors import NearSingular, OutsideDisk
from .precision import BigComplex, PrecisionContext, default_series_order, to_big

EVAL_MARGIN = 0.75
ORDER_CAP = 10 ** 6


class LowConfidenceOrder(UserWarning):
    """Emitted when :func:`truncation_order_for` hits its cap."""


def exponent_parameter(e) -> Fraction:
    """``n = 1/(2e) - 1/2``."""
    return Fraction(1, 2 * e) - Fraction(1, 2)


@dataclass(frozen=True)
class LameOperator:
    cubic: DepressedCubic
    e: int
    C: BigComplex

    def __post_init__(self):
        if int(self.e) != self.e or self.e < 2:
            raise ValueError(f"ramification index must be an integer >= 2, got {self.e!r}")
        object.__setattr__(self, "C", to_big(self.C, self.cubic.ctx))

    @property
    def n(self) -> Fraction:
        return exponent_parameter(self.e)

    @property
    def nn(self) -> Fraction:
        """``n(n+1)``, e.g. ``-2/9`` for ``e = 3``."""
        n = self.n
        return n * (n + 1)

    @property
    def singular_points(self):
        return self.cubic.roots

    @property
    def ctx(self):
        return self.cubic.ctx

    def with_C(self, C) -> "LameOperator":
        return LameOperator(self.cubic, self.e, C)

    def exponents(self):
        """Local exponents: ``{0, 1/2}`` at finite points, ``{-n/2, (n+1)/2}`` at infinity."""
        n = self.n
        return {"finite": (Fraction(0), Fraction(1, 2)), "infinity": (-n / 2, (n + 1) / 2)}

    def distance_to_singular(self, p):
        with self.ctx.scope():
            return min(abs(p - t) for t in self.cubic.roots)


@dataclass(frozen=True)
class FundamentalMatrix:
    """Two power series at ``expansion_point``.

    ``series[0]`` is the solution with value 1 and slope 0, ``series[1]``
    the one with value 0 and slope 1, so :func:`evaluate` returns the
    identity at the expansion point.
    """

    expansion_point: BigComplex
    series: tuple
    radius: BigReal = None
    ctx: PrecisionContext = field(default=None, compare=False)

    @property
    def order(self):
        return len(self.series[0]) - 1


BigReal = type(mpfr(0))


def _local_data(op: LameOperator, p, ctx):
    g2, g3 = to_big(op.cubic.g2, ctx), to_big(op.cubic.g3, ctx)
    nn = mpfr(op.nn.numerator) / op.nn.denominator
    C = to_big(op.C, ctx)
    c0 = (4 * p * p - g2) * p - g3
    c1 = 12 * p * p - g2
    c2 = 12 * p
    q0 = -(nn * p + C)
    q1 = -nn
    return c0, c1, c2, q0, q1


def series_at(op: LameOperator, p, ctx: PrecisionContext, order=None) -> FundamentalMatrix:
    """Power-series basis at the ordinary point ``p`` up to ``u^order``.

    Raises
    ------
    NearSingular
        If ``p`` is within ``10^(-digits/2)`` of a singular point.
    """
    N = ctx.series_order if order is None else int(order)
    with ctx.scope():
        p = to_big(p, ctx)
        radius = min(abs(p - to_big(t, ctx)) for t in op.cubic.roots)
        if radius <= mpfr(10) ** (-ctx.digits / 2):
            raise NearSingular(f"expansion point {complex(p)} is too close to a singular point")
        c0, c1, c2, q0, q1 = _local_data(op, p, ctx)
        inv = 1 / c0
        half_c1 = c1 / 2
        zero = mpc(0)
        a = [mpc(1), zero]
        b = [zero, mpc(1)]
        for k in range(N - 1):
            s1 = half_c1 * ((k + 1) * (2 * k + 1))
            s0 = c2 * (k * k) + q0
            sm = q1 + 2 * (k - 1) * (2 * k - 1)
            den = inv / ((k + 2) * (k + 1))
            if k:
                a.append(-(s1 * a[k + 1] + s0 * a[k] + sm * a[k - 1]) * den)
                b.append(-(s1 * b[k + 1] + s0 * b[k] + sm * b[k - 1]) * den)
            else:
                a.append(-(s1 * a[1] + s0 * a[0]) * den)
                b.append(-(s1 * b[1] + s0 * b[0]) * den)
    return FundamentalMatrix(p, (tuple(a[: N + 1]), tuple(b[: N + 1])), radius, ctx)


def _horner(coeffs, u):
    v = mpc(0)
    d = mpc(0)
    for k in range(len(coeffs) - 1, 0, -1):
        v = v * u + coeffs[k]
        d = d * u + k * coeffs[k]
    return v * u + coeffs[0], d


def evaluate(F: FundamentalMatrix, t, order=None):
    """``[[y0(t), y0'(t)], [y1(t), y1'(t)]]`` from the truncated sums.

    Raises
    ------
    OutsideDisk
        If ``|t - p| > 0.75 * radius``.
    """
    ctx = F.ctx
    with ctx.scope():
        t = to_big(t, ctx)
        u = t - F.expansion_point
        if abs(u) > EVAL_MARGIN * F.radius:
            raise OutsideDisk(f"|t - p| = {float(abs(u)):.3g} exceeds {EVAL_MARGIN} * radius {float(F.radius):.3g}")
        rows = []
        for s in F.series:
            if order is not None:
                s = s[: order + 1]
            rows.append(list(_horner(s, u)))
    return rows


def residual_coefficients(op: LameOperator, F: FundamentalMatrix, which=0):
    """Coefficients of ``L y`` for the truncated series, in powers of ``t - p``.

    Exact arithmetic would give zeros up to index ``N - 2``; the tail is
    the truncation footprint.
    """
    ctx = F.ctx
    a = list(F.series[which])
    N = len(a) - 1
    with ctx.scope():
        c0, c1, c2, q0, q1 = _local_data(op, F.expansion_point, ctx)
        P = [c0, c1, c2, mpc(4)]
        dP = [c1 / 2, c2, mpc(6)]                      # (1/2) P'
        d1 = [(k + 1) * a[k + 1] for k in range(N)]
        d2 = [(k + 2) * (k + 1) * a[k + 2] for k in range(N - 1)]
        out = [mpc(0)] * (N + 3)
        for i, pc in enumerate(P):
            for k, v in enumerate(d2):
                out[i + k] += pc * v
        for i, pc in enumerate(dP):
            for k, v in enumerate(d1):
                out[i + k] += pc * v
        for k, v in enumerate(a):
            out[k] += q0 * v
            out[k + 1] += q1 * v
    return out


def truncation_order_for(op: LameOperator, step_ratio, ctx: PrecisionContext, points=None) -> int:
    """Smallest N whose estimated geometric tail is below ``10^-(digits+guard)``.

    The tail ``max(|b_N|, |b_(N-1)|) * step_ratio^N / (1 - step_ratio)`` is
    measured on the scaled coefficients ``b_k = a_k R^k`` of trial series at
    ``points`` (default: one point on each small circle around a singular
    point, where decay is slowest).  If the trial order is too short the
    decay rate is extrapolated log-linearly.  The result is capped at
    ``10^6``, in which case a :class:`LowConfidenceOrder` warning is issued.
    """
    if not 0 < step_ratio <= EVAL_MARGIN:
        raise ValueError(f"step_ratio must lie in (0, {EVAL_MARGIN}], got {step_ratio}")
    target = -(ctx.digits + ctx.guard) * math.log(10)
    lr = math.log(step_ratio)
    tail_const = -math.log(1 - step_ratio)
    trial = max(default_series_order(ctx.digits, ctx.guard, step_ratio), 16)
    if points is None:
        points = _trial_points(op, ctx)
    worst = 8
    for p in points:
        F = series_at(op, p, ctx, order=trial)
        logR = float(gmpy2.log(abs(F.radius)))
        logs = []
        with ctx.scope():
            for k in range(trial + 1):
                # a_k can overflow a double when R is small, so take logs first
                m = max(abs(F.series[0][k]), abs(F.series[1][k]))
                logs.append(float(gmpy2.log(m)) + k * logR if m > 0 else -math.inf)

        def tail(N):
            return max(logs[N], logs[N - 1]) + N * lr + tail_const

        N = None
        for cand in range(trial, 1, -1):
            if tail(cand) >= target:
                N = cand + 1
                break
        else:
            N = 2
        if N > trial:
            # extrapolate: fit log|b_k| ~ alpha + beta k on the second half
            ks = list(range(trial // 2, trial + 1))
            ys = [logs[k] for k in ks if logs[k] > -math.inf]
            if len(ys) < 2:
                N = trial
            else:
                ks = [k for k in ks if logs[k] > -math.inf]
                km = sum(ks) / len(ks)
                ym = sum(ys) / len(ys)
                beta = sum((k - km) * (y - ym) for k, y in zip(ks, ys)) / sum((k - km) ** 2 for k in ks)
                alpha = ym - beta * km
                slope = beta + lr
                if slope >= 0:
                    N = ORDER_CAP
                else:
                    N = math.ceil((target - alpha - tail_const) / slope)
        worst = max(worst, N)
    if worst >= ORDER_CAP:
        warnings.warn("series order reached its cap; truncation estimate is unreliable", LowConfidenceOrder)
        return ORDER_CAP
    return int(worst)


def _trial_points(op, ctx):
    roots = op.cubic.roots
    out = []
    with ctx.scope():
        for i, t in enumerate(roots):
            others = [s for j, s in enumerate(roots) if j != i]
            r = min(abs(t - s) for s in others) / 3
            centroid = sum(others) / 2
            d = t - centroid
            d = d / abs(d) if abs(d) > 0 else mpc(1)
            out.append(t + r * d)
    return out


# ---------------------------------------------------------------------------
# singular points


def singular_series(op: LameOperator, index: int, ctx: PrecisionContext, order=None):
    """Frobenius series at the singular point ``t_i`` for exponents 0 and 1/2.

    Returns ``(t_i, a, b)`` with ``y_0 = sum a_k u^k`` and
    ``y_half = u^(1/2) sum b_k u^k``.
    """
    N = ctx.series_order if order is None else int(order)
    with ctx.scope():
        ti = to_big(op.cubic.roots[index], ctx)
        _, c1, c2, q0, q1 = _local_data(op, ti, ctx)
        out = []
        for s in (Fraction(0), Fraction(1, 2)):
            a = [mpc(1)]
            for k in range(N):
                ks = k + s
                val = (c2 * mpfr(ks * ks) + q0) * a[k]
                if k:
                    km = ks - 1
                    val += (q1 + mpfr(km * (4 * ks - 2))) * a[k - 1]
                a.append(-val / (c1 * mpfr((k + 1 + s) * (ks + Fraction(1, 2)))))
            out.append(tuple(a))
    return ti, out[0], out[1]


def exponent_slope(op: LameOperator, index: int, ctx: PrecisionContext, radii=(1e-3, 1e-5)):
    """Slope of ``log|y_half / y_0|`` against ``log|t - t_i|`` along a ray into ``t_i``.

    Should be close to 1/2.
    """
    ti, a, b = singular_series(op, index, ctx)
    roots = op.cubic.roots
    with ctx.scope():
        sep = min(abs(ti - s) for j, s in enumerate(roots) if j != index)
        vals = []
        for rel in radii:
            u = mpc(mpfr(rel) * sep, 0) * mpc(0.6, 0.8)
            y0 = sum(c * u ** k for k, c in enumerate(a))
            yh = gmpy2.sqrt(u) * sum(c * u ** k for k, c in enumerate(b))
            vals.append((math.log(float(abs(u))), math.log(float(abs(yh / y0)))))
    (x1, y1), (x2, y2) = vals
    return (y2 - y1) / (x2 - x1)


def wronskian_invariant(op: LameOperator, F: FundamentalMatrix, t, branch=None):
    """``det F(t) * sqrt(P(t))``, which Abel's identity makes constant.

    ``branch`` is a previous value of ``sqrt(P)`` used to pick the branch
    continuously.
    """
    ctx = F.ctx
    M = evaluate(F, t)
    with ctx.scope():
        t = to_big(t, ctx)
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        root = gmpy2.sqrt(op.cubic(t))
        if branch is not None and abs(root - branch) > abs(root + branch):
            root = -root
        return det * root, root
