"""Independent reference computations shared by the test modules."""
import mpmath
from gmpy2 import mpc


def mp_of(z):
    # exact binary conversion; str() of a 53-bit mpfr is only the shortest round-trip form
    re_, im_ = (mpmath.mpf(n) / d for n, d in (z.real.as_integer_ratio(), z.imag.as_integer_ratio()))
    return mpmath.mpc(re_, im_)


def oracle(op, p, t, dps):
    """Stepwise Taylor integration (mpmath.odefun) along the segment p -> t."""
    with mpmath.workdps(dps + 10):
        g2, g3, C = mp_of(op.cubic.g2), mp_of(op.cubic.g3), mp_of(op.C)
        nn = mpmath.mpf(op.nn.numerator) / op.nn.denominator
        p, d = mp_of(mpc(p)), mp_of(mpc(t)) - mp_of(mpc(p))   # doubles, exact in 53 bits

        def rhs(s, Y):
            u = p + s * d
            P = 4 * u ** 3 - g2 * u - g3
            y, yp = Y
            return [d * yp, d * ((nn * u + C) * y - (12 * u ** 2 - g2) / 2 * yp) / P]

        rows = []
        for y0 in ([mpmath.mpc(1), mpmath.mpc(0)], [mpmath.mpc(0), mpmath.mpc(1)]):
            rows.append(mpmath.odefun(rhs, 0, y0)(1))
        return rows
