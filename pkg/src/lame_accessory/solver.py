"""Search for the accessory parameter C.

Both searches look at the imaginary parts of the pairwise traces
``(tr(A1 A2), tr(A3 A1), tr(A3 A2))``: at the right C the monodromy group is
conjugate to a real group, so all three are real.

Real case (bisection)
    For a real curve and real C, two of the three imaginary parts vanish
    identically (up to round-off) and the third changes sign at the
    accessory parameters.  The signed maximum ``f`` therefore
    never goes meaningfully negative, so the bisection follows the sign of
    one fixed *driver* component, the one that changes sign across the
    bracket, and stops when the sum ``g`` of absolute values drops below
    ``ex``.

Complex case (compass search)
    Probe ``C + r exp(2 pi i k / 8)``, accept the first strict decrease of
    ``g``, halve ``r`` when no direction helps.

Both work through a schedule of precision levels; a level is left once
``g < 10^(-level + 15)``.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field, replace

import gmpy2
from gmpy2 import mpc, mpfr

from .algebraic import AlgebraicNumber, evaluate as evaluate_algebraic, identify
from .curve import WeierstrassCurve, depress
from .errors import InsufficientPrecision, NoBracket, Stalled
from .lame import LameOperator, truncation_order_for
from .monodromy import MatchReport, MonodromySet, match_squares, monodromy_set
from .paths import build_loops
from .precision import MIN_DIGITS, PrecisionContext, to_big, to_string

COARSE_MATCH_TOL = 1e-6
LEVEL_SLACK = 15


@dataclass(frozen=True)
class SolverConfig:
    """Search parameters.

    ``ex`` of ``None`` means ``10^(-digits + 15)`` for the working
    precision.  ``bracket_limit`` bounds ``|C|`` in the real scan.
    """

    ex: float = None
    initial_step: float = 0.5
    max_iters: int = 5000
    digits_schedule: tuple = (40, 80, 160, 320)
    bracket_limit: float = 64.0
    step_ratio: float = 0.5
    guard: int = 10
    start: complex = 0j

    def __post_init__(self):
        if self.ex is not None and not self.ex > 0:
            raise ValueError("ex must be positive")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        sched = tuple(int(d) for d in self.digits_schedule)
        if not sched or sched[0] < MIN_DIGITS or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError(f"digits_schedule must be strictly increasing and start at >= {MIN_DIGITS}")
        object.__setattr__(self, "digits_schedule", sched)
        if not self.bracket_limit > 0:
            raise ValueError("bracket_limit must be positive")


@dataclass
class SolveResult:
    C: object
    digits_est: int
    matched_permutation: tuple = None
    objective_residual: float = None
    identified: AlgebraicNumber = None
    digits: int = None
    match: MatchReport = None
    trace_squares: tuple = ()
    alternates: list = field(default_factory=list)
    escalations: list = field(default_factory=list)
    evaluations: int = 0
    iterations: int = 0
    timings: dict = field(default_factory=dict)

    def to_json(self):
        digits = self.digits or 40
        out = {
            "C": to_string(self.C, digits),
            "digits_est": self.digits_est,
            "permutation": list(self.matched_permutation) if self.matched_permutation else None,
            "residual": f"{self.objective_residual:.3e}" if self.objective_residual is not None else None,
            "trace_squares": [to_string(z, min(digits, 30)) for z in self.trace_squares],
            "alternates": [to_string(z, 20) for z in self.alternates],
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }
        if self.identified is not None:
            from .algebraic import format_poly

            out["minpoly"] = list(self.identified.minpoly)
            out["minpoly_text"] = format_poly(self.identified.minpoly)
        return out


# ---------------------------------------------------------------------------
# objectives


def imaginary_parts(ms: MonodromySet):
    """``(Im tr(A1A2), Im tr(A3A1), Im tr(A3A2))``."""
    t32, t12, t31 = ms.pair_traces
    return (t12.imag, t31.imag, t32.imag)


def objective_f(ms) -> float:
    """Signed maximum of the three imaginary parts."""
    return float(max(imaginary_parts(ms)))


def objective_g(ms) -> float:
    """Sum of absolute imaginary parts."""
    return float(sum(abs(v) for v in imaginary_parts(ms)))


# ---------------------------------------------------------------------------
# operator families


class LameFamily:
    """``C -> LameOperator`` for a fixed curve and ramification index.

    The depressed cubic and loop plan depend only on the curve, so they are
    built once per precision.
    """

    def __init__(self, curve, e, step_ratio=0.5, basepoint=None):
        self.curve = curve
        self.e = int(e)
        self.step_ratio = step_ratio
        self.basepoint = basepoint
        self._cubics = {}
        self._plans = {}

    def cubic(self, ctx):
        key = (ctx.digits, ctx.guard)
        if key not in self._cubics:
            if isinstance(self.curve, WeierstrassCurve):
                self._cubics[key] = depress(self.curve, ctx)
            else:
                self._cubics[key] = self.curve(ctx)
        return self._cubics[key]

    def __call__(self, C, ctx) -> LameOperator:
        return LameOperator(self.cubic(ctx), self.e, C)

    def plan(self, ctx):
        key = (ctx.digits, ctx.guard)
        if key not in self._plans:
            self._plans[key] = build_loops(self.cubic(ctx), self.basepoint, self.step_ratio, ctx)
        return self._plans[key]


class _CallableFamily:
    """Adapter for a bare ``(C, ctx) -> LameOperator`` callable."""

    def __init__(self, factory, step_ratio):
        self.factory = factory
        self.step_ratio = step_ratio
        self._plans = {}

    def __call__(self, C, ctx):
        return self.factory(C, ctx)

    def plan(self, ctx):
        key = (ctx.digits, ctx.guard)
        if key not in self._plans:
            op = self.factory(0, ctx)
            self._plans[key] = build_loops(op.cubic, None, self.step_ratio, ctx)
        return self._plans[key]


def _as_family(family, step_ratio):
    if hasattr(family, "plan"):
        return family
    return _CallableFamily(family, step_ratio)


@dataclass
class _Sample:
    C: object
    ms: MonodromySet
    ims: tuple
    g: float
    digits: int


class _Evaluator:
    def __init__(self, family, config: SolverConfig, ctx: PrecisionContext):
        self.family = _as_family(family, config.step_ratio)
        self.config = config
        self.ctx = ctx
        self.count = 0
        self._ctxs = {}

    def levels(self):
        top = self.ctx.digits
        return [d for d in self.config.digits_schedule if d < top] + [top]

    def level_ctx(self, digits):
        if digits not in self._ctxs:
            guard = max(self.ctx.guard, self.config.guard)
            base = PrecisionContext(digits=digits, guard=guard)
            op = self.family(0, base)
            order = truncation_order_for(op, min(self.config.step_ratio, 0.75), base)
            self._ctxs[digits] = replace(base, series_order=order)
        return self._ctxs[digits]

    def ex(self, digits):
        floor = 10.0 ** (-digits + LEVEL_SLACK)
        if digits == self.ctx.digits and self.config.ex is not None:
            return self.config.ex
        return floor

    def __call__(self, C, digits) -> _Sample:
        lctx = self.level_ctx(digits)
        op = self.family(C, lctx)
        ms = monodromy_set(op, self.family.plan(lctx), lctx)
        self.count += 1
        ims = imaginary_parts(ms)
        g = float(sum(abs(v) for v in ims))
        return _Sample(op.C, ms, ims, g, digits)


def _check_target(sample, target, tol, ctx):
    if target is None:
        return None
    return match_squares(sample.ms.trace_squares, target, tol, ctx)


def _finish(sample, ev, start, uncertainty=None, alternates=(), escalations=(), iterations=0, report=None):
    lctx = ev.level_ctx(sample.digits)
    est = sample.ms.digits_est
    if uncertainty is None:
        uncertainty = sample.g
    if uncertainty > 0:
        scale = max(1.0, abs(complex(sample.C)))
        est = min(est, max(0, int(-math.log10(uncertainty / scale))))
    with lctx.scope():
        C = mpc(sample.C)
    return SolveResult(
        C=C, digits_est=est,
        matched_permutation=report.permutation if report else None,
        objective_residual=sample.g, digits=sample.digits, match=report,
        trace_squares=sample.ms.trace_squares, alternates=list(alternates),
        escalations=list(escalations), evaluations=ev.count, iterations=iterations,
        timings={"solve": time.perf_counter() - start},
    )


def _escalation_record(prev, new):
    floor = 10.0 ** (-prev.ms.digits_est)
    return {"from": prev.digits, "to": new.digits, "g_before": prev.g, "g_after": new.g,
            "sound": abs(new.g - prev.g) < 10 * max(floor, prev.g)}


# ---------------------------------------------------------------------------
# real bisection


def _driver(a: _Sample, b: _Sample):
    """Component whose sign differs between ``a`` and ``b`` above round-off, or None."""
    best, best_size = None, 0.0
    for j in range(3):
        va, vb = float(a.ims[j]), float(b.ims[j])
        noise = 1e3 * (10.0 ** (-min(a.ms.digits_est, b.ms.digits_est)))
        if abs(va) > noise and abs(vb) > noise and (va > 0) != (vb > 0):
            size = min(abs(va), abs(vb))
            if size > best_size:
                best, best_size = j, size
    return best


class _Bracket:
    def __init__(self, lo: _Sample, hi: _Sample, j: int):
        self.lo, self.hi, self.j = lo, hi, j
        self.best = lo if lo.g <= hi.g else hi

    @property
    def width(self):
        with gmpy2.context(precision=4 * max(self.lo.C.real.precision, self.hi.C.real.precision)):
            return float(abs(self.hi.C.real - self.lo.C.real))

    def sign(self, s):
        return float(s.ims[self.j]) > 0


def _bisect(br: _Bracket, ev: _Evaluator, digits, stop, min_width, max_iters):
    """Halve ``br`` until ``stop(sample)`` or the width drops below ``min_width``."""
    lctx = ev.level_ctx(digits)
    steps = 0
    if stop(br.best):
        return br.best, steps
    while br.width > min_width and steps < max_iters:
        with lctx.scope():
            mid = (mpc(br.lo.C).real + mpc(br.hi.C).real) / 2
        s = ev(mid, digits)
        steps += 1
        if s.g < br.best.g:
            br.best = s
        if stop(s):
            return s, steps
        if br.sign(s) == br.sign(br.lo):
            br.lo = s
        else:
            br.hi = s
    return br.best, steps


def _refine(br, ev, levels, start_level, max_iters):
    """Drive a bracket to ``g < ex`` through the remaining precision levels."""
    escalations = []
    steps = 0
    best = br.best
    for i, digits in enumerate(levels[start_level:]):
        if digits != br.lo.digits:
            prev = best
            lo, hi = ev(br.lo.C, digits), ev(br.hi.C, digits)
            best = ev(prev.C, digits)
            escalations.append(_escalation_record(prev, best))
            j = br.j
            if (float(lo.ims[j]) > 0) == (float(hi.ims[j]) > 0):
                j2 = _driver(lo, hi)
                if j2 is None:
                    raise Stalled(f"bracket lost its sign change at {digits} digits")
                j = j2
            br = _Bracket(lo, hi, j)
            br.best = best if best.g <= br.best.g else br.best
        ex = ev.ex(digits)
        lctx = ev.level_ctx(digits)
        scale = max(1.0, abs(float(br.lo.C.real)))
        min_width = 10.0 ** (-(digits + lctx.guard // 2)) * scale
        best, n = _bisect(br, ev, digits, lambda s: s.g < ex, min_width, max_iters - steps)
        steps += n
        if best.g >= ex:
            if digits == levels[-1]:
                raise Stalled(f"bisection exhausted {digits}-digit resolution with g = {best.g:.3e}")
    polished, uncertainty = _polish(br, best, ev, levels[-1])
    return polished, uncertainty, escalations, steps + 1


def _polish(br, best, ev, digits):
    """One regula falsi step on the final bracket.

    The bracket is already tiny, so linear interpolation of the driver
    component is accurate to roughly its square.  Returns the better of the
    interpolated and the bisection point, and an estimate of the error in C.
    """
    lctx = ev.level_ctx(digits)
    j = br.j
    with lctx.scope():
        lo, hi = br.lo.C.real, br.hi.C.real
        vlo, vhi = br.lo.ims[j], br.hi.ims[j]
        if vhi == vlo:
            return best, br.width
        slope = abs(vhi - vlo) / abs(hi - lo)
        x = lo - vlo * (hi - lo) / (vhi - vlo)
    s = ev(x, digits)
    pick = s if s.g <= best.g else best
    noise = 10.0 ** (-pick.ms.digits_est)
    return pick, max(pick.g, noise) / float(slope)


def _probe_points(ex0, limit):
    kmax = max(0, math.ceil(math.log2(limit / ex0)))
    return [ex0 * 2.0 ** k for k in range(kmax + 1)]


def solve_real(family, config: SolverConfig, ctx: PrecisionContext, target=None) -> SolveResult:
    """Bisection for a real accessory parameter.

    Probes ``C = 0`` first, then ``+-ex 2^k`` outward up to
    ``bracket_limit``, so the first accepted root has the smallest ``|C|``.
    With a ``target`` triple, roots whose trace squares do not match are
    recorded in ``alternates`` and the scan continues.

    Raises
    ------
    NoBracket
        When no sign change leads to an acceptable root within the limit.
    Stalled
        When a bracket cannot be refined below ``ex`` at the top precision.
    """
    start = time.perf_counter()
    ev = _Evaluator(family, config, ctx)
    levels = ev.levels()
    L0 = levels[0]
    ex0 = ev.ex(L0)
    alternates = []
    total_steps = 0

    def accept(br):
        nonlocal total_steps
        if target is not None:
            coarse = lambda s: s.g < ex0
            s, n = _bisect(br, ev, L0, coarse, COARSE_MATCH_TOL * 1e-2 * max(1.0, abs(float(br.lo.C.real))),
                           config.max_iters)
            total_steps += n
            rep = _check_target(s, target, COARSE_MATCH_TOL, ev.level_ctx(L0))
            if not rep.matched:
                alternates.append(s.C)
                return None
        try:
            best, unc, esc, n = _refine(br, ev, levels, 0, config.max_iters)
        except Stalled:
            alternates.append(br.best.C)
            return None
        total_steps += n
        report = _check_target(best, target, max(1e-12, 10.0 ** (-best.digits / 2)), ev.level_ctx(best.digits))
        if report is not None and not report.matched:
            alternates.append(best.C)
            return None
        return _finish(best, ev, start, unc, alternates, esc, total_steps, report)

    zero = ev(0, L0)
    if zero.g < ex0:
        best = zero
        escalations = []
        for digits in levels[1:]:
            s = ev(0, digits)
            escalations.append(_escalation_record(best, s))
            best = s
        if best.g < ev.ex(levels[-1]):
            report = _check_target(best, target, max(1e-12, 10.0 ** (-best.digits / 2)), ev.level_ctx(best.digits))
            if report is None or report.matched:
                return _finish(best, ev, start, None, alternates, escalations, 0, report)
            alternates.append(best.C)

    prev = {1: zero, -1: zero}
    for x in _probe_points(ex0, config.bracket_limit):
        found = []
        for side in (1, -1):
            s = ev(side * x, L0)
            j = _driver(prev[side], s)
            if j is not None:
                lo, hi = (prev[side], s) if side > 0 else (s, prev[side])
                res = accept(_Bracket(lo, hi, j))
                if res is not None:
                    found.append(res)
            prev[side] = s
        if found:
            found.sort(key=lambda r: abs(complex(r.C)))
            return found[0]
    raise NoBracket(
        f"no acceptable sign change of the trace imaginary parts for |C| <= {config.bracket_limit}"
        + (f"; non-matching roots near {[f'{complex(a).real:.6g}' for a in alternates]}" if alternates else ""))


# ---------------------------------------------------------------------------
# complex compass search

DIRECTIONS = [cmath.exp(2j * math.pi * k / 8) for k in range(8)]


def solve_complex(family, config: SolverConfig, ctx: PrecisionContext, target=None, start_C=None) -> SolveResult:
    """Compass search on ``g`` over the complex C plane.

    Raises
    ------
    Stalled
        If the step shrinks to round-off (``10^-digits`` relative) before
        ``g < ex``, or ``max_iters`` is exhausted.
    """
    t0 = time.perf_counter()
    ev = _Evaluator(family, config, ctx)
    levels = ev.levels()
    C0 = config.start if start_C is None else start_C
    r = config.initial_step
    cur = None
    escalations = []
    iters = 0
    for digits in levels:
        lctx = ev.level_ctx(digits)
        new = ev(C0 if cur is None else cur.C, digits)
        if cur is not None:
            escalations.append(_escalation_record(cur, new))
        cur = new
        ex = ev.ex(digits)
        while cur.g >= ex:
            iters += 1
            if iters > config.max_iters:
                raise Stalled(f"no convergence within {config.max_iters} iterations (g = {cur.g:.3e})")
            moved = False
            with lctx.scope():
                base = mpc(cur.C)
                probes = [base + mpc(r * d) for d in DIRECTIONS]
            for cc in probes:
                s = ev(cc, digits)
                if s.g < cur.g:
                    cur, moved = s, True
                    break
            if not moved:
                r /= 2
                floor = 10.0 ** (-digits) * max(1.0, abs(complex(cur.C)))
                if r < floor:
                    raise Stalled(f"step underflowed at {digits} digits with g = {cur.g:.3e} >= ex = {ex:.1e}")
        # a smaller step for the next level: C is now good to about g
        r = max(min(r, 10 * cur.g), 10.0 ** (-digits))
    report = _check_target(cur, target, max(1e-12, 10.0 ** (-cur.digits / 2)), ev.level_ctx(cur.digits))
    res = _finish(cur, ev, t0, None, [], escalations, iters, report)
    return res


# ---------------------------------------------------------------------------
# solve, identify, re-verify


def default_identify_degree(curve):
    deg = curve.field_degree() if hasattr(curve, "field_degree") else 1
    return max(1, deg)


def solve_and_identify(entry, config: SolverConfig = None, ctx: PrecisionContext = None,
                       complex_search=None, max_degree=None, max_height_digits=None):
    """Solve for C, recognize it, and confirm at doubled precision.

    Works through the digits schedule: after solving at a level the value is
    handed to :func:`identify` with as many digits as the solve supports.
    If nothing is recognized, the next schedule level is tried.  A
    recognized value is evaluated at twice the solve precision and must
    again make the traces real and match the target.
    """
    config = config or SolverConfig()
    if ctx is None:
        ctx = PrecisionContext(digits=config.digits_schedule[0], guard=config.guard)
    family = LameFamily(entry.curve, entry.e, config.step_ratio)
    target = [to_big(t, PrecisionContext(digits=max(60, ctx.digits * 4))) if not isinstance(t, AlgebraicNumber)
              else t for t in entry.target_squares]
    if complex_search is None:
        complex_search = not entry.curve.is_real
    if max_degree is None:
        max_degree = default_identify_degree(entry.curve)

    top = [d for d in config.digits_schedule if d > ctx.digits]
    solve_levels = [ctx.digits] + top
    t0 = time.perf_counter()
    result = None
    for digits in solve_levels:
        lctx = replace(ctx, digits=digits, series_order=None) if digits != ctx.digits else ctx
        if result is None:
            if complex_search:
                result = solve_complex(family, config, lctx, target)
            else:
                result = solve_real(family, config, lctx, target)
        else:
            # continue from the previous answer
            sub = replace(config, digits_schedule=tuple(d for d in config.digits_schedule if d <= digits) or (digits,),
                          initial_step=max(10.0 ** (-result.digits_est), 10.0 ** (-digits)))
            if complex_search:
                result = solve_complex(family, sub, lctx, target, start_C=result.C)
            else:
                result = _resolve_real_near(family, sub, lctx, target, result)
        found = _try_identify(result, max_degree, max_height_digits)
        if found is not None:
            check = _verify(family, config, found, 2 * digits, target)
            if check:
                result.identified = found
                break
    result.timings["total"] = time.perf_counter() - t0
    return result


def _resolve_real_near(family, config, ctx, target, previous):
    """Re-run the bisection at higher precision in a small bracket around a previous root."""
    ev = _Evaluator(family, config, ctx)
    levels = ev.levels()
    L0 = levels[0]
    c = float(complex(previous.C).real)
    w = max(10.0 ** (-previous.digits_est + 2), 1e-300) * max(1.0, abs(c))
    t0 = time.perf_counter()
    for _ in range(40):
        lo, hi = ev(mpfr(c) - mpfr(w), L0), ev(mpfr(c) + mpfr(w), L0)
        j = _driver(lo, hi)
        if j is not None:
            break
        w *= 4
    else:
        return solve_real(family, config, ctx, target)
    best, unc, esc, n = _refine(_Bracket(lo, hi, j), ev, levels, 0, config.max_iters)
    report = _check_target(best, target, max(1e-12, 10.0 ** (-best.digits / 2)), ev.level_ctx(best.digits))
    res = _finish(best, ev, t0, unc, previous.alternates, previous.escalations + esc, n, report)
    res.evaluations += previous.evaluations
    return res


def _try_identify(result, max_degree, max_height_digits):
    usable = min(result.digits or 0, result.digits_est)
    if usable < 21:
        return None
    h = (usable - 20) // (2 * max_degree)
    if max_height_digits is not None:
        h = min(h, max_height_digits)
    if h < 1:
        return None
    ictx = PrecisionContext(digits=usable)
    try:
        return identify(result.C, max_degree, h, ictx)
    except InsufficientPrecision:
        return None


def _verify(family, config, alg, digits, target):
    vctx = PrecisionContext(digits=digits, guard=config.guard)
    ev = _Evaluator(family, config, vctx)
    C = evaluate_algebraic(alg, ev.level_ctx(digits))
    s = ev(C, digits)
    if s.g >= ev.ex(digits):
        return False
    if target is not None:
        rep = match_squares(s.ms.trace_squares, target, 10.0 ** (-digits / 2), ev.level_ctx(digits))
        return rep.matched
    return True
