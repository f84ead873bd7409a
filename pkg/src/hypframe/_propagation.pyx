# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled frame-propagation kernel.

Mirrors propagation.py exactly: CF4 commutator-free stepping, fixed-order
scaling-and-squaring exponentials, pseudo Gram-Schmidt with the wedge
rebuild of mu.  See that module for the algorithm description.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef double CF4_A = 0.25 + sqrt(3.0) / 6.0
cdef double CF4_B = 0.25 - sqrt(3.0) / 6.0


cdef void _matmul(double* a, double* b, double* out) noexcept:
    cdef int i, j, k
    cdef double acc
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc += a[4 * i + k] * b[4 * k + j]
            out[4 * i + j] = acc


cdef void _expm4(double* x, double* out) noexcept:
    cdef double y[16]
    cdef double term[16]
    cdef double nxt[16]
    cdef double rowsum, nrm
    cdef int i, j, k, s
    nrm = 0.0
    for i in range(4):
        rowsum = 0.0
        for j in range(4):
            rowsum += fabs(x[4 * i + j])
        if rowsum > nrm:
            nrm = rowsum
    s = 0
    while nrm > 0.03125:
        nrm *= 0.5
        s += 1
    cdef double scale = 1.0
    for i in range(s):
        scale *= 0.5
    for i in range(16):
        y[i] = x[i] * scale
        out[i] = 0.0
        term[i] = 0.0
    for i in range(4):
        out[5 * i] = 1.0
        term[5 * i] = 1.0
    for k in range(1, 13):
        _matmul(term, y, nxt)
        for i in range(16):
            term[i] = nxt[i] / k
            out[i] += term[i]
    for i in range(s):
        _matmul(out, out, nxt)
        for j in range(16):
            out[j] = nxt[j]


cdef double _mdot(double* x, double* y) noexcept:
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]


cdef double _gram_residual(double* f) noexcept:
    cdef double worst = 0.0
    cdef double acc, target
    cdef int i, j
    for i in range(4):
        for j in range(4):
            acc = _mdot(f + 4 * i, f + 4 * j)
            target = 0.0
            if i == j:
                target = -1.0 if i == 0 else 1.0
            acc = fabs(acc - target)
            if acc > worst:
                worst = acc
    return worst


cdef double _gram_drift(double* f) noexcept:
    # residual of F G F^T - G relative to (1 + max squared row norm)
    cdef double scale = 0.0
    cdef double acc
    cdef int i, j
    for i in range(4):
        acc = 0.0
        for j in range(4):
            acc += f[4 * i + j] * f[4 * i + j]
        if acc > scale:
            scale = acc
    return _gram_residual(f) / (1.0 + scale)


cdef void _orthonormalize(double* f) noexcept:
    cdef double q, c1, c2
    cdef int i
    cdef double* g = f
    cdef double* v1 = f + 4
    cdef double* v2 = f + 8
    cdef double* mu = f + 12
    q = sqrt(-_mdot(g, g))
    for i in range(4):
        g[i] /= q
    c1 = _mdot(v1, g)
    for i in range(4):
        v1[i] += c1 * g[i]
    q = sqrt(_mdot(v1, v1))
    for i in range(4):
        v1[i] /= q
    c1 = _mdot(v2, g)
    c2 = _mdot(v2, v1)
    for i in range(4):
        v2[i] += c1 * g[i] - c2 * v1[i]
    q = sqrt(_mdot(v2, v2))
    for i in range(4):
        v2[i] /= q
    # mu = -(g ^ v1 ^ v2): the det=+1 orientation
    cdef double m01 = v1[0] * v2[1] - v1[1] * v2[0]
    cdef double m02 = v1[0] * v2[2] - v1[2] * v2[0]
    cdef double m03 = v1[0] * v2[3] - v1[3] * v2[0]
    cdef double m12 = v1[1] * v2[2] - v1[2] * v2[1]
    cdef double m13 = v1[1] * v2[3] - v1[3] * v2[1]
    cdef double m23 = v1[2] * v2[3] - v1[3] * v2[2]
    mu[0] = g[1] * m23 - g[2] * m13 + g[3] * m12
    mu[1] = g[0] * m23 - g[2] * m03 + g[3] * m02
    mu[2] = -(g[0] * m13 - g[1] * m03 + g[3] * m01)
    mu[3] = g[0] * m12 - g[1] * m02 + g[2] * m01
    # the wedge fixes direction only; project to clear its |F|^3 rounding
    c1 = _mdot(mu, g)
    c2 = _mdot(mu, v1)
    q = _mdot(mu, v2)
    for i in range(4):
        mu[i] += c1 * g[i] - c2 * v1[i] - q * v2[i]
    q = sqrt(_mdot(mu, mu))
    for i in range(4):
        mu[i] /= q


def propagate(cnp.ndarray[double, ndim=3] node_vals,
              cnp.ndarray[double, ndim=1] hs,
              cnp.ndarray[long, ndim=1] substeps,
              cnp.ndarray[double, ndim=2] f0,
              double tol_correct):
    """Same contract as propagation.propagate."""
    cdef int nint = hs.shape[0]
    cdef cnp.ndarray[double, ndim=3] frames = np.empty((nint + 1, 4, 4))
    cdef double f[16]
    cdef double a1[16]
    cdef double a2[16]
    cdef double w1[16]
    cdef double w2[16]
    cdef double e1[16]
    cdef double e2[16]
    cdef double tmp[16]
    cdef double m, n, a, b, h, drift
    cdef double max_raw = 0.0, max_final = 0.0
    cdef long corrections = 0, worst = 0, pos = 0
    cdef int i, j, k

    for i in range(4):
        for j in range(4):
            f[4 * i + j] = f0[i, j]
            frames[0, i, j] = f0[i, j]

    for i in range(nint):
        h = hs[i]
        for k in range(substeps[i]):
            for j in range(16):
                a1[j] = 0.0
                a2[j] = 0.0
            m = node_vals[pos, 0, 0]; n = node_vals[pos, 0, 1]
            a = node_vals[pos, 0, 2]; b = node_vals[pos, 0, 3]
            a1[3] = m; a1[6] = n; a1[7] = a
            a1[9] = -n; a1[11] = b
            a1[12] = m; a1[13] = -a; a1[14] = -b
            m = node_vals[pos, 1, 0]; n = node_vals[pos, 1, 1]
            a = node_vals[pos, 1, 2]; b = node_vals[pos, 1, 3]
            a2[3] = m; a2[6] = n; a2[7] = a
            a2[9] = -n; a2[11] = b
            a2[12] = m; a2[13] = -a; a2[14] = -b
            for j in range(16):
                w1[j] = h * (CF4_A * a1[j] + CF4_B * a2[j])
                w2[j] = h * (CF4_B * a1[j] + CF4_A * a2[j])
            _expm4(w1, e1)
            _expm4(w2, e2)
            _matmul(e1, f, tmp)
            _matmul(e2, tmp, f)
            drift = _gram_drift(f)
            if drift > max_raw:
                max_raw = drift
            if _gram_residual(f) > tol_correct:
                _orthonormalize(f)
                corrections += 1
                drift = _gram_drift(f)
            if drift > max_final:
                max_final = drift
                worst = pos
            pos += 1
        for j in range(4):
            for k in range(4):
                frames[i + 1, j, k] = f[4 * j + k]
    return frames, int(corrections), float(max_raw), float(max_final), int(worst)


BACKEND = "cython"
