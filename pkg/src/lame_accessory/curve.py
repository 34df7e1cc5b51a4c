"""Long Weierstrass curves and their depressed cubic ``4t^3 - g2 t - g3``.

The reduction completes the square in ``y`` and then shifts ``x`` to kill
the quadratic term::

    Y = 2y + a1 x + a3,   X = x + b2/12,   Y^2 = 4X^3 - g2 X - g3

with ``b2 = a1^2 + 4a2``, ``b4 = 2a4 + a1 a3``, ``b6 = a3^2 + 4a6`` and

    g2 = (b2^2 - 24 b4) / 12
    g3 = (36 b2 b4 - b2^3 - 216 b6) / 216
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

from gmpy2 import mpfr

from .algebraic import AlgebraicNumber, evaluate
from .errors import DegenerateCubic, SchemaError
from .precision import BigComplex, PrecisionContext, cubic_roots, to_big

Coefficient = Union[Fraction, AlgebraicNumber]

NAMES = ("a1", "a2", "a3", "a4", "a6")


def parse_coefficient(obj, row=None) -> Coefficient:
    """Parse ``"p/q"``, an int, or ``{"minpoly": [...], "approx": "re,im"}``."""
    try:
        if isinstance(obj, bool):
            raise TypeError
        if isinstance(obj, int):
            return Fraction(obj)
        if isinstance(obj, str):
            return Fraction(obj.strip())
        if isinstance(obj, dict):
            minpoly = obj["minpoly"]
            if not isinstance(minpoly, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in minpoly):
                raise TypeError("minpoly must be a list of integers")
            approx = obj["approx"]
            digits = int(obj.get("digits", 15))
            if set(obj) - {"minpoly", "approx", "digits"}:
                raise KeyError(f"unexpected keys {sorted(set(obj) - {'minpoly', 'approx', 'digits'})}")
            num = AlgebraicNumber(tuple(minpoly), _parse_approx(approx), digits_certified=digits)
            if num.degree == 1:
                return num.as_fraction()
            return num
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"malformed coefficient {obj!r} ({exc})", row) from None
    raise SchemaError(f"malformed coefficient {obj!r}", row)


def _parse_approx(text):
    """Validate ``"re"`` or ``"re,im"``; the string itself is kept so no digits are lost."""
    if not isinstance(text, str):
        raise TypeError("approx must be a string 're,im'")
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ValueError(f"bad approximation {text!r}")
    for part in parts:
        float(part)
    return text.strip()


def coefficient_to_json(c: Coefficient):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return c.to_json()


def coefficient_value(c: Coefficient, ctx: PrecisionContext) -> BigComplex:
    if isinstance(c, AlgebraicNumber):
        return evaluate(c, ctx)
    return to_big(Fraction(c), ctx)


def coefficient_is_real(c: Coefficient) -> bool:
    if isinstance(c, AlgebraicNumber):
        return abs(complex(c.approx).imag) <= 1e-12 * max(1.0, abs(complex(c.approx)))
    return True


@dataclass(frozen=True)
class WeierstrassCurve:
    """``y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6``."""

    a1: Coefficient = Fraction(0)
    a2: Coefficient = Fraction(0)
    a3: Coefficient = Fraction(0)
    a4: Coefficient = Fraction(0)
    a6: Coefficient = Fraction(0)

    @classmethod
    def from_json(cls, data, row=None) -> "WeierstrassCurve":
        if not isinstance(data, dict):
            raise SchemaError("curve must be an object", row)
        unknown = set(data) - set(NAMES)
        if unknown:
            raise SchemaError(f"unknown curve keys {sorted(unknown)}", row)
        return cls(**{k: parse_coefficient(data.get(k, "0"), row) for k in NAMES})

    def to_json(self):
        return {k: coefficient_to_json(getattr(self, k)) for k in NAMES}

    @property
    def is_real(self):
        return all(coefficient_is_real(getattr(self, k)) for k in NAMES)

    def field_degree(self):
        """Largest degree among the coefficients (a cheap proxy for the field degree)."""
        return max((c.degree if isinstance(c, AlgebraicNumber) else 1) for c in (getattr(self, k) for k in NAMES))

    def values(self, ctx):
        return tuple(coefficient_value(getattr(self, k), ctx) for k in NAMES)

    def equation_residual(self, x, y, ctx):
        a1, a2, a3, a4, a6 = self.values(ctx)
        with ctx.scope():
            return y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)


@dataclass(frozen=True)
class DepressedCubic:
    """``P(t) = 4t^3 - g2 t - g3`` together with its roots."""

    g2: BigComplex
    g3: BigComplex
    roots: tuple
    ctx: PrecisionContext = field(compare=False)
    shift: BigComplex = None      # X = x + shift
    a1: BigComplex = None
    a3: BigComplex = None

    def __call__(self, t):
        with self.ctx.scope():
            return (4 * t * t - self.g2) * t - self.g3

    def derivative(self, t):
        with self.ctx.scope():
            return 12 * t * t - self.g2

    def transport(self, x, y):
        """Image of an affine point of the original curve in ``(X, Y)`` coordinates."""
        with self.ctx.scope():
            return x + self.shift, 2 * y + self.a1 * x + self.a3

    def min_separation(self):
        with self.ctx.scope():
            r = self.roots
            return min(abs(r[i] - r[j]) for i in range(3) for j in range(i))


def _sorted_roots(roots):
    return tuple(sorted(roots, key=lambda z: (round(float(z.real), 9), round(float(z.imag), 9))))


def from_invariants(g2, g3, ctx: PrecisionContext) -> DepressedCubic:
    """Depressed cubic straight from ``g2, g3`` (no Weierstrass model)."""
    g2 = to_big(g2, ctx)
    g3 = to_big(g3, ctx)
    roots = _sorted_roots(cubic_roots(g2, g3, ctx))
    zero = to_big(0, ctx)
    return DepressedCubic(g2, g3, roots, ctx, zero, zero, zero)


def depress(curve: WeierstrassCurve, ctx: PrecisionContext) -> DepressedCubic:
    """Short form ``Y^2 = 4X^3 - g2 X - g3`` of ``curve`` at working precision.

    Raises
    ------
    DegenerateCubic
        If the curve is singular at working precision.
    """
    a1, a2, a3, a4, a6 = curve.values(ctx)
    with ctx.scope():
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        g2 = (b2 * b2 - 24 * b4) / 12
        g3 = (36 * b2 * b4 - b2 ** 3 - 216 * b6) / 216
        shift = b2 / 12
    try:
        roots = cubic_roots(g2, g3, ctx)
    except DegenerateCubic as exc:
        raise DegenerateCubic(f"singular curve: {exc}") from None
    return DepressedCubic(g2, g3, _sorted_roots(roots), ctx, shift, a1, a3)


def load_curve(path) -> WeierstrassCurve:
    """Read a curve JSON file; a catalog-style object with a ``curve`` key is accepted too."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict) and "curve" in data:
        data = data["curve"]
    return WeierstrassCurve.from_json(data, row=str(path))


def b_invariants(curve: WeierstrassCurve, ctx: PrecisionContext):
    a1, a2, a3, a4, a6 = curve.values(ctx)
    with ctx.scope():
        return a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6


def real_points(curve: WeierstrassCurve, xs, ctx):
    """Points ``(x, y)`` on ``curve`` above the given x values (complex y allowed)."""
    import gmpy2

    a1, a2, a3, a4, a6 = curve.values(ctx)
    out = []
    with ctx.scope():
        for x in xs:
            x = to_big(x, ctx)
            # y^2 + (a1 x + a3) y - rhs = 0
            b = a1 * x + a3
            c = -(x ** 3 + a2 * x * x + a4 * x + a6)
            disc = b * b - 4 * c
            y = (-b + gmpy2.sqrt(disc)) / 2
            out.append((x, y))
    return out


__all__ = [
    "Coefficient", "WeierstrassCurve", "DepressedCubic", "depress", "from_invariants",
    "load_curve", "parse_coefficient", "coefficient_value", "b_invariants", "real_points", "mpfr",
]
