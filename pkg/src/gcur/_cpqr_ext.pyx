# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Householder QR with greedy column pivoting.

Mirrors ``gcur._cpqr_py.cpqr_kernel`` step for step.
"""
import numpy as np
from libc.math cimport sqrt, fabs

cdef double TIE_RTOL = 1e-14
cdef double SQRT_EPS = 1.4901161193847656e-08


cdef inline void _swap_cols(double[::1, :] a, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t r
    cdef double tmp
    for r in range(a.shape[0]):
        tmp = a[r, i]
        a[r, i] = a[r, j]
        a[r, j] = tmp


cdef inline double _colnorm(double[::1, :] a, Py_ssize_t j, Py_ssize_t start) noexcept nogil:
    # scaled by the column maximum so tiny entries do not underflow when squared
    cdef Py_ssize_t r
    cdef double s = 0.0, scale = 0.0, e
    for r in range(start, a.shape[0]):
        if fabs(a[r, j]) > scale:
            scale = fabs(a[r, j])
    if scale == 0.0:
        return 0.0
    for r in range(start, a.shape[0]):
        e = a[r, j] / scale
        s += e * e
    return scale * sqrt(s)


def cpqr_kernel(x):
    """Return ``(q, t, perm)`` with ``x[:, perm] = q @ t`` (economy size)."""
    r_arr = np.array(x, dtype=np.float64, order="F", copy=True)
    cdef double[::1, :] r = r_arr
    cdef Py_ssize_t m = r.shape[0], n = r.shape[1]
    cdef Py_ssize_t kk = min(m, n)
    perm_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] perm = perm_arr
    norms_arr = np.empty(n)
    orig_arr = np.empty(n)
    cdef double[::1] norms = norms_arr
    cdef double[::1] orig = orig_arr
    vs_arr = np.zeros((m, kk), order="F")
    cdef double[::1, :] vs = vs_arr
    q_arr = np.eye(m, kk, order="F")
    cdef double[::1, :] q = q_arr

    cdef Py_ssize_t i, j, rr, best, itmp
    cdef double nmax, nrm, alpha, vnorm, s, tmp, ratio, factor, new
    cdef bint reflect

    with nogil:
        for j in range(n):
            norms[j] = _colnorm(r, j, 0)
            orig[j] = norms[j]

        for i in range(kk):
            nmax = norms[i]
            for j in range(i + 1, n):
                if norms[j] > nmax:
                    nmax = norms[j]
            best = -1
            for j in range(i, n):
                if norms[j] >= nmax * (1.0 - TIE_RTOL):
                    if best < 0 or perm[j] < perm[best]:
                        best = j
            if best != i:
                _swap_cols(r, i, best)
                tmp = norms[i]; norms[i] = norms[best]; norms[best] = tmp
                tmp = orig[i]; orig[i] = orig[best]; orig[best] = tmp
                itmp = perm[i]; perm[i] = perm[best]; perm[best] = itmp

            nrm = _colnorm(r, i, i)
            if nrm == 0.0:
                continue
            # skip the reflection when the column is already triangular
            reflect = fabs(r[i, i]) != nrm
            if not reflect:
                for rr in range(i + 1, m):
                    if r[rr, i] != 0.0:
                        reflect = True
                        break
            if reflect:
                alpha = -nrm if r[i, i] >= 0 else nrm
                for rr in range(i, m):
                    vs[rr, i] = r[rr, i]
                vs[i, i] -= alpha
                vnorm = 0.0
                for rr in range(i, m):
                    if fabs(vs[rr, i]) > vnorm:
                        vnorm = fabs(vs[rr, i])
                for rr in range(i, m):
                    vs[rr, i] /= vnorm
                vnorm = 0.0
                for rr in range(i, m):
                    vnorm += vs[rr, i] * vs[rr, i]
                vnorm = sqrt(2.0) / sqrt(vnorm)
                for rr in range(i, m):
                    vs[rr, i] *= vnorm
                    r[rr, i] = 0.0
                r[i, i] = alpha

            for j in range(i + 1, n):
                if reflect:
                    s = 0.0
                    for rr in range(i, m):
                        s += vs[rr, i] * r[rr, j]
                    if s != 0.0:
                        for rr in range(i, m):
                            r[rr, j] -= vs[rr, i] * s
                if norms[j] != 0.0:
                    ratio = fabs(r[i, j]) / norms[j]
                    factor = 1.0 - ratio * ratio
                    if factor < 0.0:
                        factor = 0.0
                    new = norms[j] * sqrt(factor)
                    if new <= SQRT_EPS * orig[j]:
                        new = _colnorm(r, j, i + 1)
                        orig[j] = new
                    norms[j] = new

        for i in range(kk - 1, -1, -1):
            nrm = 0.0
            for rr in range(i, m):
                nrm += fabs(vs[rr, i])
            if nrm == 0.0:
                continue
            for j in range(i, kk):
                s = 0.0
                for rr in range(i, m):
                    s += vs[rr, i] * q[rr, j]
                if s != 0.0:
                    for rr in range(i, m):
                        q[rr, j] -= vs[rr, i] * s

        for i in range(kk):
            for rr in range(i + 1, m):
                r[rr, i] = 0.0
            if r[i, i] < 0:
                for j in range(i, n):
                    r[i, j] = -r[i, j]
                for rr in range(m):
                    q[rr, i] = -q[rr, i]

    return q_arr, np.array(r_arr[:kk, :], order="F"), perm_arr
