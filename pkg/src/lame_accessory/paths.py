"""Basepoint choice, ordering of singular points and loop construction.

Each loop is a lasso: a tail from the basepoint toward ``t_i``, a
counterclockwise polygon around ``t_i`` and the same tail backwards.  With
tails ordered by increasing ``arg(t_i - p)`` the product of the three loops
is homotopic to a large counterclockwise loop around all finite singular
points.

Waypoints are plain Python complex numbers; only the series expansion
points need to be exact, and a double is an exact binary number.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import PathCollision
from .precision import PrecisionContext

MAX_STEP_RATIO = 0.6


@dataclass(frozen=True)
class PathPlan:
    basepoint: complex
    ordered_singulars: tuple
    loops: tuple
    step_ratio: float = 0.5
    standard_basepoint: bool = True
    notes: tuple = field(default=())

    def to_json(self):
        pair = lambda z: [z.real, z.imag]
        return {
            "basepoint": pair(self.basepoint),
            "ordered_singulars": [pair(complex(t)) for t in self.ordered_singulars],
            "step_ratio": self.step_ratio,
            "standard_basepoint": self.standard_basepoint,
            "loops": [[pair(z) for z in loop] for loop in self.loops],
        }

    def waypoint_count(self):
        return sum(len(loop) for loop in self.loops)


def _roots(cubic_or_roots):
    roots = getattr(cubic_or_roots, "roots", cubic_or_roots)
    return [complex(t) for t in roots]


def _dist(z, roots):
    return min(abs(z - t) for t in roots)


def choose_basepoint(cubic, digits=None):
    """Basepoint ``i`` when no nonzero root is purely imaginary, else ``0``.

    Falls back to ``1``, ``1+i``, ``2i`` when the rule lands on (or very
    near) a singular point.  Returns ``(p, standard_basepoint)``.
    """
    if digits is None:
        digits = getattr(getattr(cubic, "ctx", None), "digits", 40)
    roots = _roots(cubic)
    sep = min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i))
    scale = max(1.0, max(abs(t) for t in roots))
    eps = 10.0 ** (-digits / 4) * scale
    # a point closer than this is treated as singular for planning purposes
    near = max(eps, 1e-3 * sep)

    nonzero = [t for t in roots if abs(t) > eps]
    p = 1j if all(abs(t.real) > eps for t in nonzero) else 0j
    if _dist(p, roots) > near:
        return p, True
    for q in (1 + 0j, 1 + 1j, 2j):
        if _dist(q, roots) > near:
            return q, False
    raise PathCollision("no admissible basepoint among i, 0, 1, 1+i, 2i")


def order_singulars(roots, basepoint):
    """Sort by ``arg(t - p)`` in ``(-pi, pi]``, ties broken by ``|t - p|``."""
    p = complex(basepoint)

    def key(t):
        z = complex(t) - p
        a = cmath.phase(z)
        if a <= -math.pi + 1e-15:
            a = math.pi
        return (round(a, 12), abs(z))

    return sorted(roots, key=key)


def _walk(z, target, roots, rho):
    """Waypoints from ``z`` to ``target`` along a straight line (excluding ``z``)."""
    out = []
    while True:
        gap = abs(target - z)
        if gap == 0:
            return out
        step = rho * _dist(z, roots) / (1 + rho)
        if step >= gap:
            out.append(target)
            return out
        z = z + (target - z) / gap * step
        out.append(z)


def _arc(center, radius, a0, a1, rho):
    """Points on a circular arc from angle ``a0`` to ``a1`` (excluding the start)."""
    sweep = a1 - a0
    # chord <= radius * dtheta and every arc point sits at distance radius from center
    m = max(1, math.ceil(abs(sweep) * (1 + rho) / rho))
    return [center + radius * cmath.exp(1j * (a0 + sweep * k / m)) for k in range(1, m + 1)]


def _tail(p, target, end, roots, radii, rho):
    """Tail from ``p`` to ``end`` (a point near ``target``), detouring around other roots."""
    d = end - p
    length = abs(d)
    if length == 0:
        return [p]
    u = d / length
    blockers = []
    for t, r in zip(roots, radii):
        if t == target:
            continue
        s = ((t - p) / u).real          # position along the line
        h = ((t - p) / u).imag          # signed offset, >0 means t is left of the line
        R = min(r, abs(t - p) / 2)
        if 0 < s < length and abs(h) < R:
            blockers.append((s, t, h, R))
    blockers.sort(key=lambda b: b[0])

    pts = [p]
    z = p
    for s, t, h, R in blockers:
        half = math.sqrt(R * R - h * h)
        entry = p + u * (s - half)
        exit_ = p + u * (s + half)
        pts += _walk(z, entry, roots, rho)
        a0 = cmath.phase(entry - t)
        a1 = cmath.phase(exit_ - t)
        # keep to the side the straight line passes on.  A blocker exactly on
        # the line counts as lying to the right, matching the modulus tie-break
        # in order_singulars (the farther root behaves as if slightly ccw).
        if h > 0:
            sweep = (a1 - a0) % (2 * math.pi)       # right of t, counterclockwise
        else:
            sweep = -((a0 - a1) % (2 * math.pi))    # left of t, clockwise
        pts += _arc(t, R, a0, a0 + sweep, rho)
        pts[-1] = exit_
        z = exit_
    pts += _walk(z, end, roots, rho)
    return pts


def _loop(p, target, roots, rho):
    others = [t for t in roots if t != target]
    radii = [min(abs(t - s) for s in roots if s != t) / 3 for t in roots]
    r = min(abs(target - s) for s in others) / 3
    r = min(r, abs(target - p) / 2)
    direction = (target - p) / abs(target - p)
    end = target - direction * r
    tail = _tail(p, target, end, roots, radii, rho)
    m = math.ceil(2 * math.pi / rho)
    a0 = cmath.phase(end - target)
    circle = [target + r * cmath.exp(1j * (a0 + 2 * math.pi * k / m)) for k in range(1, m)]
    return tail + circle + tail[::-1]


def winding_number(loop, point):
    """Winding number of a closed polygon around ``point`` by summing argument increments."""
    total = 0.0
    w = complex(point)
    for a, b in zip(loop, loop[1:]):
        total += cmath.phase((complex(b) - w) / (complex(a) - w))
    return round(total / (2 * math.pi))


def max_spacing_ratio(loop, roots):
    roots = _roots(roots)
    worst = 0.0
    for a, b in zip(loop, loop[1:]):
        worst = max(worst, abs(b - a) / _dist(a, roots), abs(b - a) / _dist(b, roots))
    return worst


def build_loops(cubic, basepoint=None, step_ratio=0.5, ctx: PrecisionContext = None) -> PathPlan:
    """Three closed loops, one per finite singular point, in argument order.

    Raises
    ------
    PathCollision
        If a loop fails its spacing or winding-number checks.
    """
    if not 0 < step_ratio <= MAX_STEP_RATIO:
        raise ValueError(f"step_ratio must lie in (0, {MAX_STEP_RATIO}], got {step_ratio}")
    digits = ctx.digits if ctx is not None else None
    standard = True
    if basepoint is None:
        basepoint, standard = choose_basepoint(cubic, digits)
    p = complex(basepoint)
    exact_roots = list(getattr(cubic, "roots", cubic))
    ordered_exact = order_singulars(exact_roots, p)
    roots = [complex(t) for t in ordered_exact]
    if _dist(p, roots) == 0:
        raise PathCollision("basepoint coincides with a singular point")

    loops = []
    for t in roots:
        loop = _loop(p, t, roots, step_ratio)
        loops.append(tuple(loop))

    for i, loop in enumerate(loops):
        if loop[0] != p or loop[-1] != p:
            raise PathCollision(f"loop {i + 1} is not closed")
        ratio = max_spacing_ratio(loop, roots)
        if ratio > step_ratio * (1 + 1e-9):
            raise PathCollision(f"loop {i + 1} violates waypoint spacing ({ratio:.3f} > {step_ratio})")
        for j, t in enumerate(roots):
            w = winding_number(loop, t)
            if w != (1 if i == j else 0):
                raise PathCollision(f"loop {i + 1} winds {w} times around singular point {j + 1}")
    return PathPlan(p, tuple(ordered_exact), tuple(loops), step_ratio, standard)
