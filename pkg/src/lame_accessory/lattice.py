"""Integral LLL reduction (all-integer variant, no rational arithmetic)."""


def _round_div(a, b):
    """Nearest integer to a/b for integers, b > 0."""
    return (2 * a + b) // (2 * b)


def lll_reduce(basis, delta=(99, 100)):
    """LLL-reduce the rows of an integer matrix.

    Uses the integral Gram-Schmidt formulation (subdeterminants ``d_i``
    and scaled coefficients ``lam[i][j]``), so every intermediate quantity
    is an exact Python int.  ``delta`` is the Lovász constant as a
    fraction ``(p, q)``.

    Returns a new list of rows; the input is not modified.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n <= 1:
        return b
    p, q = delta

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [0] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    d[0] = 1
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("basis vectors must be linearly independent")

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = _round_div(lam[k][l], d[l + 1])
            bk, bl = b[k], b[l]
            for i in range(len(bk)):
                bk[i] -= r * bl[i]
            lam[k][l] -= r * d[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (B * t + mu * lam[i][k]) // d[k + 1]
        d[k] = B

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    if u == 0:
                        raise ValueError("basis vectors must be linearly independent")
        red(k, k - 1)
        if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b
