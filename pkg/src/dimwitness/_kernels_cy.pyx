# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the 5x5 witness arithmetic.

Twin of ``_kernels_py``: the cofactor expansions below follow the same
expression structure term for term, and the build disables FMA contraction,
so both backends agree to the last few ulps.  Keep edits synchronized.
"""

from libc.math cimport sin, cos, sqrt

import numpy as np

BACKEND = "compiled"


cdef inline double _det3(double a, double b, double c,
                         double d, double e, double f,
                         double g, double h, double i) nogil:
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


cdef double _det4(double[4][4] m) nogil:
    cdef double d0, d1, d2, d3
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


cdef void _minor4(double[5][5] m, int drop_row, int drop_col,
                  double[4][4] out) nogil:
    cdef int r, c, rr, cc
    rr = 0
    for r in range(5):
        if r == drop_row:
            continue
        cc = 0
        for c in range(5):
            if c == drop_col:
                continue
            out[rr][cc] = m[r][c]
            cc += 1
        rr += 1


cdef int _load5(object m, double[5][5] out) except -1:
    cdef const double[:, :] mv = np.ascontiguousarray(m, dtype=np.float64)
    if mv.shape[0] != 5 or mv.shape[1] != 5:
        raise ValueError("expected a 5x5 matrix")
    cdef int i, j
    for i in range(5):
        for j in range(5):
            out[i][j] = mv[i, j]
    return 0


cdef double _det5_c(double[5][5] m) nogil:
    cdef double acc = 0.0
    cdef double sign = 1.0
    cdef double[4][4] sub
    cdef int col
    for col in range(5):
        _minor4(m, 0, col, sub)
        acc += sign * m[0][col] * _det4(sub)
        sign = -sign
    return acc


cdef void _adjugate5_c(double[5][5] m, double[5][5] adj) nogil:
    cdef int i, j
    cdef double sign
    cdef double[4][4] sub
    for i in range(5):
        for j in range(5):
            sign = 1.0 if (i + j) % 2 == 0 else -1.0
            _minor4(m, i, j, sub)
            adj[j][i] = sign * _det4(sub)


cdef void _prob_c(double[5] beta, double[4] phi, double[5][5] out) nogil:
    cdef double sb[5]
    cdef double cb[5]
    cdef double sf[4]
    cdef double cf[4]
    cdef int k, j
    cdef double p
    for j in range(5):
        sb[j] = sin(beta[j])
        cb[j] = cos(beta[j])
    for k in range(4):
        sf[k] = sin(phi[k])
        cf[k] = cos(phi[k])
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
    for j in range(5):
        out[4][j] = 1.0


def det5(m):
    """Determinant of a 5x5 matrix by first-row cofactor expansion."""
    cdef double[5][5] buf
    _load5(m, buf)
    return _det5_c(buf)


def adjugate5(m):
    """Adjugate (transposed cofactor matrix) of a 5x5 matrix."""
    cdef double[5][5] buf
    cdef double[5][5] adj
    _load5(m, buf)
    _adjugate5_c(buf, adj)
    out = np.empty((5, 5), dtype=np.float64)
    cdef double[:, :] ov = out
    cdef int i, j
    for i in range(5):
        for j in range(5):
            ov[i, j] = adj[i][j]
    return out


def prob_matrix(beta, phi):
    """Ideal outcome-probability matrix; see the pure-Python twin for the
    closed form.  Entries are clamped to [0, 1]; row 5 is ones.
    """
    cdef double[5] b
    cdef double[4] f
    cdef double[5][5] buf
    cdef const double[:] bv = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const double[:] fv = np.ascontiguousarray(phi, dtype=np.float64)
    if bv.shape[0] != 5 or fv.shape[0] != 4:
        raise ValueError("expected 5 preparation and 4 measurement angles")
    cdef int i, j
    for i in range(5):
        b[i] = bv[i]
    for i in range(4):
        f[i] = fv[i]
    _prob_c(b, f, buf)
    out = np.empty((5, 5), dtype=np.float64)
    cdef double[:, :] ov = out
    for i in range(5):
        for j in range(5):
            ov[i, j] = buf[i][j]
    return out


def sigma_t2_sum(f):
    """Sum over sampled cells of ``f (1 - f) adj^2`` (see pure twin)."""
    cdef double[5][5] buf
    cdef double[5][5] adj
    _load5(f, buf)
    _adjugate5_c(buf, adj)
    cdef double acc = 0.0
    cdef double a
    cdef int k, j
    for k in range(4):
        for j in range(5):
            a = adj[j][k]
            acc += buf[k][j] * (1.0 - buf[k][j]) * a * a
    return acc


def adj_frobenius(beta, phi):
    """Frobenius norm of the adjugate of the ideal probability matrix."""
    cdef double[5] b
    cdef double[4] f
    cdef double[5][5] buf
    cdef double[5][5] adj
    cdef const double[:] bv = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const double[:] fv = np.ascontiguousarray(phi, dtype=np.float64)
    if bv.shape[0] != 5 or fv.shape[0] != 4:
        raise ValueError("expected 5 preparation and 4 measurement angles")
    cdef int i, j
    for i in range(5):
        b[i] = bv[i]
    for i in range(4):
        f[i] = fv[i]
    _prob_c(b, f, buf)
    _adjugate5_c(buf, adj)
    cdef double acc = 0.0
    for i in range(5):
        for j in range(5):
            acc += adj[i][j] * adj[i][j]
    return sqrt(acc)
