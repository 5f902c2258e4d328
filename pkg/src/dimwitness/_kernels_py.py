"""Pure-Python reference kernels for the 5x5 witness arithmetic.

These are the fallback implementations selected by :mod:`dimwitness.kernels`
when the compiled extension is unavailable.  The compiled module
(``_kernels_cy``) mirrors the exact expression structure used here, cofactor
by cofactor, so the two backends agree to the last few ulps.  Any change to
an expression below must be applied to the ``.pyx`` twin as well.

All matrices are plain 5x5 nested indexables of floats; callers pass numpy
arrays, and numpy arrays come back out.
"""

import math

import numpy as np

BACKEND = "python"


def _det3(a, b, c, d, e, f, g, h, i):
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _det4(m):
    # First-row cofactor expansion into 3x3 minors.
    d0 = _det3(m[1][1], m[1][2], m[1][3],
               m[2][1], m[2][2], m[2][3],
               m[3][1], m[3][2], m[3][3])
    d1 = _det3(m[1][0], m[1][2], m[1][3],
               m[2][0], m[2][2], m[2][3],
               m[3][0], m[3][2], m[3][3])
    d2 = _det3(m[1][0], m[1][1], m[1][3],
               m[2][0], m[2][1], m[2][3],
               m[3][0], m[3][1], m[3][3])
    d3 = _det3(m[1][0], m[1][1], m[1][2],
               m[2][0], m[2][1], m[2][2],
               m[3][0], m[3][1], m[3][2])
    return m[0][0] * d0 - m[0][1] * d1 + m[0][2] * d2 - m[0][3] * d3


def _minor4(m, drop_row, drop_col):
    rows = [r for r in range(5) if r != drop_row]
    cols = [c for c in range(5) if c != drop_col]
    return [[m[r][c] for c in cols] for r in rows]


def det5(m):
    """Determinant of a 5x5 matrix by first-row cofactor expansion."""
    acc = 0.0
    sign = 1.0
    for col in range(5):
        acc += sign * m[0][col] * _det4(_minor4(m, 0, col))
        sign = -sign
    return acc


def adjugate5(m):
    """Adjugate (transposed cofactor matrix) of a 5x5 matrix.

    Satisfies ``m @ adjugate5(m) == det5(m) * I`` up to rounding.
    """
    adj = np.empty((5, 5), dtype=np.float64)
    for i in range(5):
        for j in range(5):
            sign = 1.0 if (i + j) % 2 == 0 else -1.0
            adj[j][i] = sign * _det4(_minor4(m, i, j))
    return adj


def prob_matrix(beta, phi):
    """Ideal outcome-probability matrix for settings ``beta`` (5) and ``phi`` (4).

    Row k, column j holds the ground-state return probability for
    preparation angle beta_j and measurement angle phi_k:

        p = (1 - sin(b)cos(b) sin(f)cos(f) - sin^2(b) sin^2(f)
               + cos(b)cos(f)) / 2

    Row 5 is the constant 1 (trace row).  Entries are clamped to [0, 1]
    so that sub-ulp excursions of the closed form never escape the valid
    probability range.
    """
    out = np.ones((5, 5), dtype=np.float64)
    sb = [math.sin(b) for b in beta]
    cb = [math.cos(b) for b in beta]
    sf = [math.sin(f) for f in phi]
    cf = [math.cos(f) for f in phi]
    for k in range(4):
        for j in range(5):
            p = 0.5 * (1.0 - sb[j] * cb[j] * sf[k] * cf[k]
                       - sb[j] * sb[j] * sf[k] * sf[k]
                       + cb[j] * cf[k])
            if p < 0.0:
                p = 0.0
            elif p > 1.0:
                p = 1.0
            out[k][j] = p
    return out


def sigma_t2_sum(f):
    """Binomial variance combination: sum over the 20 sampled cells of
    ``f (1 - f) adj^2``, where ``adj`` is the adjugate of ``f`` evaluated
    at the transposed index.  Multiplying by 1/T gives the witness
    variance for T samples per cell.
    """
    adj = adjugate5(f)
    acc = 0.0
    for k in range(4):
        for j in range(5):
            a = adj[j][k]
            acc += f[k][j] * (1.0 - f[k][j]) * a * a
    return acc


def adj_frobenius(beta, phi):
    """Frobenius norm of the adjugate of the ideal probability matrix.

    This is the sensitivity objective: for the (singular) ideal matrix it
    equals the product of the four non-zero singular values, and larger
    values mean a smaller statistical error on the witness at fixed T.
    """
    adj = adjugate5(prob_matrix(beta, phi))
    acc = 0.0
    for i in range(5):
        for j in range(5):
            acc += adj[i][j] * adj[i][j]
    return math.sqrt(acc)
