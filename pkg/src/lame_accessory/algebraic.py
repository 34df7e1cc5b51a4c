"""Algebraic numbers as (minimal polynomial, isolating approximation) pairs.

Also provides recognition of a floating-point value as an algebraic
number by integer-relation search on ``(1, v, v^2, ..., v^d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import reduce

import numpy as np
from gmpy2 import mpc, mpfr

from .errors import InsufficientPrecision, RootLost
from .lattice import lll_reduce
from .precision import BigComplex, PrecisionContext, to_big, to_string


def _normalize(coeffs):
    coeffs = [int(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs or coeffs[-1] == 0:
        raise ValueError("minimal polynomial must be nonzero")
    g = reduce(math.gcd, coeffs)
    if coeffs[-1] < 0:
        g = -g
    return tuple(c // g for c in coeffs)


def poly_eval(coeffs, z):
    """Horner evaluation, coefficients constant term first."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def format_poly(coeffs, var="x"):
    """Human-readable form, highest degree first: ``54x+55``."""
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else str(mag)) + var + ("" if k == 1 else f"^{k}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += sign + body
    return out


@dataclass(frozen=True)
class AlgebraicNumber:
    """A root of an integer polynomial, singled out by an approximation.

    ``minpoly`` lists integer coefficients constant term first and is
    normalized to content 1 with positive leading coefficient.
    Irreducibility is not checked.  ``approx`` must lie within
    ``10^(-digits_certified/2)`` of exactly one root.
    """

    minpoly: tuple
    approx: BigComplex
    digits_certified: int = 15

    def __post_init__(self):
        object.__setattr__(self, "minpoly", _normalize(self.minpoly))
        if not isinstance(self.approx, BigComplex):
            object.__setattr__(self, "approx", mpc(complex(self.approx)) if not isinstance(self.approx, str)
                               else to_big(self.approx, PrecisionContext(digits=max(20, self.digits_certified))))

    @property
    def degree(self):
        return len(self.minpoly) - 1

    @property
    def height(self):
        return max(abs(c) for c in self.minpoly)

    @classmethod
    def rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        ctx = PrecisionContext(digits=40)
        return cls((-q.numerator, q.denominator), to_big(q, ctx), digits_certified=40)

    def as_fraction(self):
        if self.degree != 1:
            return None
        return Fraction(-self.minpoly[0], self.minpoly[1])

    def __complex__(self):
        return complex(self.approx)

    def to_json(self):
        a = self.approx
        if self.degree == 1:
            q = self.as_fraction()
            return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)
        d = self._print_digits()
        out = {"minpoly": list(self.minpoly), "approx": f"{a.real:.{d}g},{a.imag:.{d}g}"}
        if self.digits_certified != 15:
            out["digits"] = self.digits_certified
        return out

    def _print_digits(self):
        return max(6, min(self.digits_certified, 60))

    def __str__(self):
        q = self.as_fraction()
        if q is not None:
            return str(q)
        return f"root of {format_poly(self.minpoly)} near {complex(self.approx):.6g}"


def _isolating_radius(a: AlgebraicNumber):
    return 10.0 ** (-a.digits_certified / 2) * max(1.0, abs(complex(a.approx)))


def evaluate(a: AlgebraicNumber, ctx: PrecisionContext) -> BigComplex:
    """The root of ``a.minpoly`` nearest ``a.approx``, refined to ``ctx.digits``.

    Raises
    ------
    RootLost
        If Newton's method diverges, or if more than one root lies inside
        the isolation radius of the approximation.
    """
    coeffs = a.minpoly
    if a.degree == 1:
        return to_big(Fraction(-coeffs[0], coeffs[1]), ctx)

    approx = complex(a.approx)
    radius = _isolating_radius(a)
    seed = approx
    try:
        roots = np.roots([float(c) for c in reversed(coeffs)])
    except (np.linalg.LinAlgError, ValueError, OverflowError):
        roots = np.array([])
    if roots.size:
        dist = np.abs(roots - approx)
        order = np.argsort(dist)
        if dist[order[0]] <= radius:
            seed = complex(roots[order[0]])
        if roots.size > 1 and dist[order[1]] <= radius and abs(roots[order[1]] - roots[order[0]]) > 1e-12 * max(1, abs(approx)):
            raise RootLost(f"two roots of {format_poly(coeffs)} within {radius:.1e} of {approx}")

    with ctx.scope():
        dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
        z = mpc(a.approx) if a.digits_certified > 15 and abs(complex(a.approx) - seed) <= radius else mpc(seed)
        target = mpfr(2) ** (-(ctx.bits - 6))
        for _ in range(300):
            fz = poly_eval(coeffs, z)
            dfz = poly_eval(dcoeffs, z)
            if dfz == 0:
                raise RootLost("derivative vanished during Newton refinement")
            step = fz / dfz
            z = z - step
            if abs(step) <= target * max(mpfr(1), abs(z)):
                break
        else:
            raise RootLost(f"Newton refinement of {format_poly(coeffs)} did not converge")
        scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs))
        if abs(poly_eval(coeffs, z)) > ctx.tolerance() * scale:
            raise RootLost("refined root fails the residual test")
        if abs(complex(z) - approx) > max(radius, 1e-12 * max(1.0, abs(approx))):
            raise RootLost(f"Newton wandered from {approx} to {complex(z)}")
    return z


def _relation(powers, scale, with_imag):
    d = len(powers) - 1
    rows = []
    for i, p in enumerate(powers):
        row = [0] * (d + 1)
        row[i] = 1
        row.append(int(round(p.real * scale)))
        if with_imag:
            row.append(int(round(p.imag * scale)))
        rows.append(row)
    reduced = lll_reduce(rows)
    return reduced[0][: d + 1]


def identify(value, max_degree: int, max_height_digits: int, ctx: PrecisionContext):
    """Recognize ``value`` as a root of a small integer polynomial.

    Degrees ``1..max_degree`` are tried in turn; the first relation with
    coefficients bounded by ``10^max_height_digits`` whose residual is
    below ``10^(-3/4 digits)`` is returned.  Complex values use a joint
    lattice on real and imaginary parts.

    Returns
    -------
    AlgebraicNumber or None
        ``None`` when no acceptable relation exists.

    Raises
    ------
    InsufficientPrecision
        If ``ctx.digits < 2 * max_degree * max_height_digits + 20``.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    if ctx.digits < 2 * max_degree * max_height_digits + 20:
        raise InsufficientPrecision(
            f"{ctx.digits} digits cannot support degree {max_degree} with "
            f"{max_height_digits}-digit coefficients")
    v = to_big(value, ctx)
    check_ctx = replace(ctx, digits=ctx.digits + ctx.digits // 4)
    with ctx.scope():
        if abs(v) <= ctx.tolerance():
            return AlgebraicNumber((0, 1), mpc(0), digits_certified=ctx.digits)
        with_imag = abs(v.imag) > ctx.tolerance() * max(mpfr(1), abs(v))
        if not with_imag:
            v = mpc(v.real, 0)
    accept = mpfr(10) ** (-(ctx.digits - ctx.digits / 4))
    bound = 10 ** max_height_digits
    for d in range(1, max_degree + 1):
        with ctx.scope():
            powers = [mpc(1)]
            for _ in range(d):
                powers.append(powers[-1] * v)
            biggest = max(mpfr(1), max(abs(p) for p in powers))
            scale = mpfr(10) ** (ctx.digits - 2) / biggest
            coeffs = _relation(powers, scale, with_imag)
        if coeffs[d] == 0 or all(c == 0 for c in coeffs):
            continue
        coeffs = _normalize(coeffs)
        if len(coeffs) - 1 != d or max(abs(c) for c in coeffs) > bound:
            continue
        with check_ctx.scope():
            residual = abs(poly_eval(coeffs, mpc(v)))
        if residual < accept:
            return AlgebraicNumber(coeffs, v, digits_certified=ctx.digits)
    return None


def minpoly_string(a: AlgebraicNumber) -> str:
    return format_poly(a.minpoly)


def approx_string(z, digits) -> str:
    return to_string(z, digits)
