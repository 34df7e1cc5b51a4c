"""Multiprecision façade: precision contexts, conversions and cubic roots.

All numbers are ``gmpy2.mpc`` values (MPFR/MPC underneath).  A
:class:`PrecisionContext` is passed explicitly to every numeric routine;
routines enter :meth:`PrecisionContext.scope` themselves, so no caller
has to touch gmpy2's thread-local context.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import DegenerateCubic

BigComplex = type(mpc(0))
BigReal = type(mpfr(0))

Number = Union[int, float, complex, str, Fraction, BigReal, BigComplex]

LOG2_10 = math.log2(10)
MIN_DIGITS = 20
MIN_GUARD = 5
MIN_ORDER = 8


def default_series_order(digits, guard, step_ratio=0.5):
    """Truncation order giving a geometric tail below 10^-(digits+guard)."""
    return max(MIN_ORDER, math.ceil((digits + guard) * math.log(10) / -math.log(step_ratio)))


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision, guard digits and power-series truncation order.

    Parameters
    ----------
    digits : int
        Decimal digits of working precision (at least 20).
    guard : int
        Extra digits carried against round-off (at least 5).
    series_order : int, optional
        Truncation order N of the local power series.  When omitted it is
        derived from ``digits + guard`` for the default step ratio 0.5.
    """

    digits: int = 40
    guard: int = 10
    series_order: int = None

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < MIN_DIGITS:
            raise ValueError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits!r}")
        if self.guard < MIN_GUARD:
            raise ValueError(f"guard must be >= {MIN_GUARD}, got {self.guard!r}")
        if self.series_order is None:
            object.__setattr__(self, "series_order", default_series_order(self.digits, self.guard))
        if self.series_order < MIN_ORDER:
            raise ValueError(f"series_order must be >= {MIN_ORDER}, got {self.series_order!r}")

    @property
    def bits(self):
        return math.ceil((self.digits + self.guard) * LOG2_10) + 8

    def scope(self):
        """Context manager that makes this precision current for gmpy2 operators."""
        return gmpy2.context(precision=self.bits, real_prec=self.bits, imag_prec=self.bits)

    def tolerance(self, extra=0):
        """``10^(-digits + guard + extra)`` as an mpfr."""
        with self.scope():
            return mpfr(10) ** (-(self.digits - self.guard - extra))

    def eps(self):
        """``10^-digits``, the nominal resolution."""
        with self.scope():
            return mpfr(10) ** (-self.digits)


def with_digits(ctx: PrecisionContext, digits: int) -> PrecisionContext:
    """Return ``ctx`` at a new working precision.

    The series order is rescaled proportionally to ``digits + guard``.
    """
    if digits < MIN_DIGITS:
        raise ValueError(f"digits must be >= {MIN_DIGITS}, got {digits}")
    if digits == ctx.digits:
        return ctx
    order = math.ceil(ctx.series_order * (digits + ctx.guard) / (ctx.digits + ctx.guard))
    return replace(ctx, digits=digits, series_order=max(MIN_ORDER, order))


# --------------------------------------------------------------------------
# conversions

_SERIAL = re.compile(r"^\s*(?P<body>[^@]+?)\s*(?:@\s*(?P<digits>\d+))?\s*$")


def _real(x, bits):
    if isinstance(x, Fraction):
        return mpfr(x.numerator, bits) / x.denominator
    if isinstance(x, str):
        s = x.strip().replace(" ", "")
        if "/" in s:
            return _real(Fraction(s), bits)
        return mpfr(s, bits)
    return mpfr(x, bits)


def to_big(x: Number, ctx: PrecisionContext) -> BigComplex:
    """Convert ``x`` to an mpc at the precision of ``ctx``.

    Strings may be plain decimals, rationals ``"p/q"``, pairs ``"re,im"``
    or serialized values ``"re[,im]@digits"``.
    """
    bits = ctx.bits
    with ctx.scope():
        if isinstance(x, BigComplex):
            return mpc(x)
        if isinstance(x, str):
            m = _SERIAL.match(x)
            if m is None:
                raise ValueError(f"cannot parse number {x!r}")
            parts = m.group("body").split(",")
            if len(parts) == 1:
                return mpc(_real(parts[0], bits), 0)
            if len(parts) == 2:
                return mpc(_real(parts[0], bits), _real(parts[1], bits))
            raise ValueError(f"cannot parse number {x!r}")
        if isinstance(x, complex):
            return mpc(x)
        if isinstance(x, (int, Fraction, float, BigReal)):
            return mpc(_real(x, bits), 0)
        if hasattr(x, "real") and hasattr(x, "imag"):
            return mpc(_real(x.real, bits), _real(x.imag, bits))
    raise TypeError(f"unsupported number type {type(x).__name__}")


def _format_real(x, digits):
    if not isinstance(x, BigReal):
        x = mpfr(x)
    if x == 0:
        return "0.0e0"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    head, tail = mant[0], mant[1:] or "0"
    return f"{sign}{head}.{tail}e{exp - 1}"


def to_string(z: Number, digits: int) -> str:
    """Serialize to ``"re@digits"`` or ``"re,im@digits"``."""
    if isinstance(z, BigComplex):
        re_, im_ = z.real, z.imag
    else:
        re_, im_ = getattr(z, "real", z), getattr(z, "imag", 0)
    body = _format_real(re_, digits)
    if im_ != 0:
        body += "," + _format_real(im_, digits)
    return f"{body}@{digits}"


def from_string(s: str, ctx: PrecisionContext = None) -> BigComplex:
    """Inverse of :func:`to_string`; the digit annotation sets the precision if no ctx is given."""
    if ctx is None:
        m = _SERIAL.match(s)
        d = int(m.group("digits")) if m and m.group("digits") else 40
        ctx = PrecisionContext(digits=max(MIN_DIGITS, d))
    return to_big(s, ctx)


def to_complex(z) -> complex:
    return complex(z)


def is_real(z: BigComplex, ctx: PrecisionContext) -> bool:
    with ctx.scope():
        return abs(z.imag) <= ctx.tolerance() * max(mpfr(1), abs(z))


# --------------------------------------------------------------------------
# cubic roots


def _cubic(t, g2, g3):
    return (4 * t * t - g2) * t - g3


def cubic_roots(g2: Number, g3: Number, ctx: PrecisionContext):
    """All three roots of ``4t^3 - g2 t - g3``.

    Seeds come from the companion-matrix eigenvalues in double precision
    and are polished by Aberth-Ehrlich simultaneous iteration, which
    cannot collapse two seeds onto the same root.

    Raises
    ------
    DegenerateCubic
        If the discriminant is indistinguishable from zero.
    """
    g2 = to_big(g2, ctx)
    g3 = to_big(g3, ctx)
    with ctx.scope():
        tol = ctx.tolerance()
        disc = g2 ** 3 - 27 * g3 ** 2
        scale = max(mpfr(1), abs(g2) ** 3, 27 * abs(g3) ** 2)
        if abs(disc) <= tol * scale:
            raise DegenerateCubic(f"discriminant {complex(disc):.3e} vanishes at working precision")

        seeds = np.roots([4.0, 0.0, -complex(g2), -complex(g3)])
        z = [mpc(complex(s)) for s in seeds]
        # nudge coincident double seeds apart; Aberth separates them again
        for i in range(3):
            for j in range(i):
                if z[i] == z[j]:
                    z[i] += mpc(1e-8, 1e-8) * max(mpfr(1), abs(z[i]))
        target = mpfr(2) ** (-(ctx.bits - 4))
        for _ in range(400):
            worst = mpfr(0)
            new = []
            for i, zi in enumerate(z):
                p = _cubic(zi, g2, g3)
                dp = 12 * zi * zi - g2
                ratio = p / dp if dp != 0 else p
                s = sum(1 / (zi - zj) for j, zj in enumerate(z) if j != i)
                w = ratio / (1 - ratio * s)
                new.append(zi - w)
                worst = max(worst, abs(w) / max(mpfr(1), abs(zi)))
            z = new
            if worst <= target:
                break

        for t in z:
            if abs(_cubic(t, g2, g3)) >= tol * max(mpfr(1), abs(t)) ** 3:
                raise DegenerateCubic("root refinement did not converge")
        for i in range(3):
            for j in range(i):
                if abs(z[i] - z[j]) <= tol * max(mpfr(1), abs(z[i])):
                    raise DegenerateCubic("roots are not distinct at working precision")
        return z
