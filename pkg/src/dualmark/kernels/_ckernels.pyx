# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double SQRT1_2 = 0.70710678118654752440
cdef double EPS = 2.220446049250313e-16
cdef int MAX_SWEEPS = 60
DEF MAXD = 8


def haar_analysis(frames, int levels):
    cdef double[:, ::1] x = np.ascontiguousarray(frames, dtype=np.float64)
    cdef Py_ssize_t rows = x.shape[0], length = x.shape[1]
    out_arr = np.empty((rows, length), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] buf = np.empty(length, dtype=np.float64)
    cdef Py_ssize_t r, i, n, half
    cdef int lev
    cdef double e, o
    for r in range(rows):
        for i in range(length):
            buf[i] = x[r, i]
        n = length
        for lev in range(levels):
            half = n >> 1
            for i in range(half):
                e = buf[2 * i]
                o = buf[2 * i + 1]
                out[r, half + i] = (e - o) * SQRT1_2
                buf[i] = (e + o) * SQRT1_2
            n = half
        for i in range(n):
            out[r, i] = buf[i]
    return out_arr


def haar_synthesis(packed, int levels):
    cdef double[:, ::1] c = np.ascontiguousarray(packed, dtype=np.float64)
    cdef Py_ssize_t rows = c.shape[0], length = c.shape[1]
    out_arr = np.empty((rows, length), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] cur = np.empty(length, dtype=np.float64)
    cdef double[::1] nxt = np.empty(length, dtype=np.float64)
    cdef Py_ssize_t r, i, n
    cdef int lev
    cdef double a, d
    for r in range(rows):
        n = length >> levels
        for i in range(n):
            cur[i] = c[r, i]
        for lev in range(levels):
            for i in range(n):
                a = cur[i]
                d = c[r, n + i]
                nxt[2 * i] = (a + d) * SQRT1_2
                nxt[2 * i + 1] = (a - d) * SQRT1_2
            n *= 2
            for i in range(n):
                cur[i] = nxt[i]
        for i in range(length):
            out[r, i] = cur[i]
    return out_arr


cdef void _jacobi_one(double* a, double* u, double* s, double* v, int d) noexcept nogil:
    # a, u, v: row-major d x d; a is overwritten with the rotated columns
    cdef int sweep, p, q, i, j, k, best_k, imax
    cdef double alpha, beta, gamma, zeta, t, c, sn, ap, aq, tmp, cutoff, norm, best_norm, dot
    cdef bint rotated
    cdef double cand[MAXD]
    cdef double best[MAXD]
    cdef int order[MAXD]
    cdef double w[MAXD * MAXD]
    cdef double vv[MAXD * MAXD]
    cdef double sig[MAXD]

    for i in range(d):
        for j in range(d):
            v[i * d + j] = 1.0 if i == j else 0.0

    for sweep in range(MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(d):
                    alpha += a[i * d + p] * a[i * d + p]
                    beta += a[i * d + q] * a[i * d + q]
                    gamma += a[i * d + p] * a[i * d + q]
                if gamma == 0.0 or fabs(gamma) <= EPS * sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                sn = c * t
                for i in range(d):
                    ap = a[i * d + p]
                    aq = a[i * d + q]
                    a[i * d + p] = c * ap - sn * aq
                    a[i * d + q] = sn * ap + c * aq
                    ap = v[i * d + p]
                    aq = v[i * d + q]
                    v[i * d + p] = c * ap - sn * aq
                    v[i * d + q] = sn * ap + c * aq
        if not rotated:
            break

    for j in range(d):
        tmp = 0.0
        for i in range(d):
            tmp += a[i * d + j] * a[i * d + j]
        sig[j] = sqrt(tmp)
        order[j] = j
    # stable insertion sort, descending
    for j in range(1, d):
        k = order[j]
        i = j - 1
        while i >= 0 and sig[order[i]] < sig[k]:
            order[i + 1] = order[i]
            i -= 1
        order[i + 1] = k
    for j in range(d):
        s[j] = sig[order[j]]
        for i in range(d):
            w[i * d + j] = a[i * d + order[j]]
            vv[i * d + j] = v[i * d + order[j]]
    for i in range(d * d):
        v[i] = vv[i]

    cutoff = s[0] * d * EPS
    for j in range(d):
        if s[j] > cutoff and s[j] > 0.0:
            for i in range(d):
                u[i * d + j] = w[i * d + j] / s[j]
        else:
            s[j] = 0.0
            best_norm = -1.0
            for k in range(d):
                for i in range(d):
                    cand[i] = 1.0 if i == k else 0.0
                for imax in range(2):
                    for p in range(j):
                        dot = 0.0
                        for i in range(d):
                            dot += u[i * d + p] * cand[i]
                        for i in range(d):
                            cand[i] -= dot * u[i * d + p]
                norm = 0.0
                for i in range(d):
                    norm += cand[i] * cand[i]
                norm = sqrt(norm)
                if norm > best_norm:
                    best_norm = norm
                    for i in range(d):
                        best[i] = cand[i]
            for i in range(d):
                u[i * d + j] = best[i] / best_norm

    for j in range(d):
        for i in range(d):
            if fabs(u[i * d + j]) > EPS:
                if u[i * d + j] < 0.0:
                    for k in range(d):
                        u[k * d + j] = -u[k * d + j]
                        v[k * d + j] = -v[k * d + j]
                break


def svd_batch(mats):
    arr = np.array(mats, dtype=np.float64, copy=True, order="C")
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError("expected a stack of square matrices")
    cdef int d = arr.shape[1]
    # exact power-of-two normalisation keeps squared norms clear of under/overflow
    _, expo = np.frexp(np.abs(arr).reshape(arr.shape[0], -1).max(axis=1, initial=0.0))
    arr = np.ascontiguousarray(np.ldexp(arr, -expo[:, None, None]))
    if d > MAXD:
        raise ValueError(f"matrix dimension {d} exceeds {MAXD}")
    cdef Py_ssize_t count = arr.shape[0], m
    u_arr = np.zeros_like(arr)
    v_arr = np.zeros_like(arr)
    s_arr = np.zeros((count, d), dtype=np.float64)
    cdef double[:, :, ::1] a = arr
    cdef double[:, :, ::1] u = u_arr
    cdef double[:, :, ::1] v = v_arr
    cdef double[:, ::1] s = s_arr
    if count == 0:
        return u_arr, s_arr, v_arr
    with nogil:
        for m in range(count):
            _jacobi_one(&a[m, 0, 0], &u[m, 0, 0], &s[m, 0], &v[m, 0, 0], d)
    return u_arr, np.ldexp(s_arr, expo[:, None]), v_arr
