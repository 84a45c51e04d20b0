# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: mutual information, nested golden-section minimax,
Blahut-Arimoto and batched maximum-likelihood decoding.

Mirrors ``_kernels_py`` operation for operation.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2, pow, sqrt, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

cdef double _R = (sqrt(5.0) - 1.0) / 2.0
cdef double _TIE_TOL = 1e-9


cdef double _mi(const double* p, const double* w, Py_ssize_t ny, Py_ssize_t nx, double* r) noexcept nogil:
    # w is row-major (ny, nx); r is scratch of length ny
    cdef Py_ssize_t x, y
    cdef double acc, px, wyx, total = 0.0
    for y in range(ny):
        acc = 0.0
        for x in range(nx):
            acc += p[x] * w[y * nx + x]
        r[y] = acc
    for x in range(nx):
        px = p[x]
        if px <= 0.0:
            continue
        for y in range(ny):
            wyx = w[y * nx + x]
            if wyx > 0.0:
                total += px * wyx * log2(wyx / r[y])
    if total > 0.0:
        return total
    return 0.0


cdef inline double _mi2(double p0, const double* w, Py_ssize_t ny, double* r) noexcept nogil:
    cdef double p[2]
    p[0] = p0
    p[1] = 1.0 - p0
    return _mi(p, w, ny, 2, r)


cdef void _mix(const double* w1, const double* w2, double theta, Py_ssize_t n, double* out) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = theta * w1[i] + (1.0 - theta) * w2[i]


cdef double _binary_capacity(const double* w, Py_ssize_t ny, double tol, double* r, double* p_out) noexcept nogil:
    cdef double a = 0.0, b = 1.0, c, d, fc, fd, best_x, best_f, f, x
    cdef int k
    c = b - _R * (b - a)
    d = a + _R * (b - a)
    fc = _mi2(c, w, ny, r)
    fd = _mi2(d, w, ny, r)
    while b - a > tol:
        if fc >= fd:
            b = d
            d = c
            fd = fc
            c = b - _R * (b - a)
            fc = _mi2(c, w, ny, r)
        else:
            a = c
            c = d
            fc = fd
            d = a + _R * (b - a)
            fd = _mi2(d, w, ny, r)
    best_x = 0.5 * (a + b)
    best_f = _mi2(best_x, w, ny, r)
    for k in range(2):
        x = <double>k
        f = _mi2(x, w, ny, r)
        if f > best_f:
            best_x = x
            best_f = f
    p_out[0] = best_x
    return best_f


def mutual_information(p, w):
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ny = wv.shape[0], nx = wv.shape[1]
    cdef double* r = <double*>malloc(ny * sizeof(double))
    cdef double out
    try:
        out = _mi(&pv[0], &wv[0, 0], ny, nx, r)
    finally:
        free(r)
    return out


def binary_capacity(w, double tol=1e-10):
    """Max over p0 of I((p0, 1-p0); w) for a binary-input channel."""
    cdef const double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ny = wv.shape[0]
    cdef double* r = <double*>malloc(ny * sizeof(double))
    cdef double val, p0
    try:
        val = _binary_capacity(&wv[0, 0], ny, tol, r, &p0)
    finally:
        free(r)
    return val, p0


def minimax_two_state(w1, w2, double tol=1e-10):
    """Min over theta of max over p0 of I((p0,1-p0); theta*w1 + (1-theta)*w2)."""
    cdef const double[:, ::1] v1 = np.ascontiguousarray(w1, dtype=np.float64)
    cdef const double[:, ::1] v2 = np.ascontiguousarray(w2, dtype=np.float64)
    cdef Py_ssize_t ny = v1.shape[0]
    cdef Py_ssize_t n = ny * 2
    cdef double* r = <double*>malloc(ny * sizeof(double))
    cdef double* m = <double*>malloc(n * sizeof(double))
    cdef double a = 0.0, b = 1.0, c, d, gc, gd, best_t, best_v, best_p, v, pp, t
    cdef int k
    try:
        with nogil:
            c = b - _R * (b - a)
            d = a + _R * (b - a)
            _mix(&v1[0, 0], &v2[0, 0], c, n, m)
            gc = _binary_capacity(m, ny, tol, r, &pp)
            _mix(&v1[0, 0], &v2[0, 0], d, n, m)
            gd = _binary_capacity(m, ny, tol, r, &pp)
            while b - a > tol:
                if gc <= gd:
                    b = d
                    d = c
                    gd = gc
                    c = b - _R * (b - a)
                    _mix(&v1[0, 0], &v2[0, 0], c, n, m)
                    gc = _binary_capacity(m, ny, tol, r, &pp)
                else:
                    a = c
                    c = d
                    gc = gd
                    d = a + _R * (b - a)
                    _mix(&v1[0, 0], &v2[0, 0], d, n, m)
                    gd = _binary_capacity(m, ny, tol, r, &pp)
            best_t = 0.5 * (a + b)
            _mix(&v1[0, 0], &v2[0, 0], best_t, n, m)
            best_v = _binary_capacity(m, ny, tol, r, &best_p)
            for k in range(2):
                t = <double>k
                _mix(&v1[0, 0], &v2[0, 0], t, n, m)
                v = _binary_capacity(m, ny, tol, r, &pp)
                if v < best_v:
                    best_t = t
                    best_v = v
                    best_p = pp
    finally:
        free(r)
        free(m)
    return best_v, best_t, best_p


def min_over_theta(p, w1, w2, double tol=1e-10):
    """Min over theta of I(p; theta*w1 + (1-theta)*w2) for a fixed input law p."""
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[:, ::1] v1 = np.ascontiguousarray(w1, dtype=np.float64)
    cdef const double[:, ::1] v2 = np.ascontiguousarray(w2, dtype=np.float64)
    cdef Py_ssize_t ny = v1.shape[0], nx = v1.shape[1]
    cdef Py_ssize_t n = ny * nx
    cdef double* r = <double*>malloc(ny * sizeof(double))
    cdef double* m = <double*>malloc(n * sizeof(double))
    cdef double a = 0.0, b = 1.0, c, d, fc, fd, best_t, best_v, v, t
    cdef int k
    try:
        with nogil:
            c = b - _R * (b - a)
            d = a + _R * (b - a)
            _mix(&v1[0, 0], &v2[0, 0], c, n, m)
            fc = _mi(&pv[0], m, ny, nx, r)
            _mix(&v1[0, 0], &v2[0, 0], d, n, m)
            fd = _mi(&pv[0], m, ny, nx, r)
            while b - a > tol:
                if fc <= fd:
                    b = d
                    d = c
                    fd = fc
                    c = b - _R * (b - a)
                    _mix(&v1[0, 0], &v2[0, 0], c, n, m)
                    fc = _mi(&pv[0], m, ny, nx, r)
                else:
                    a = c
                    c = d
                    fc = fd
                    d = a + _R * (b - a)
                    _mix(&v1[0, 0], &v2[0, 0], d, n, m)
                    fd = _mi(&pv[0], m, ny, nx, r)
            best_t = 0.5 * (a + b)
            _mix(&v1[0, 0], &v2[0, 0], best_t, n, m)
            best_v = _mi(&pv[0], m, ny, nx, r)
            for k in range(2):
                t = <double>k
                _mix(&v1[0, 0], &v2[0, 0], t, n, m)
                v = _mi(&pv[0], m, ny, nx, r)
                if v < best_v:
                    best_t = t
                    best_v = v
    finally:
        free(r)
        free(m)
    return best_v, best_t


def blahut_arimoto(w, double tol=1e-12, Py_ssize_t max_iter=200000):
    """Capacity of a DMC by Blahut-Arimoto; returns (lower, p, upper)."""
    cdef const double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ny = wv.shape[0], nx = wv.shape[1]
    p_arr = np.full(nx, 1.0 / nx)
    cdef double[::1] p = p_arr
    cdef double* r = <double*>malloc(ny * sizeof(double))
    cdef double* dvec = <double*>malloc(nx * sizeof(double))
    cdef double acc, wyx, lower = 0.0, upper = 0.0, norm
    cdef Py_ssize_t it, x, y
    try:
        with nogil:
            for it in range(max_iter):
                for y in range(ny):
                    acc = 0.0
                    for x in range(nx):
                        acc += p[x] * wv[y, x]
                    r[y] = acc
                for x in range(nx):
                    acc = 0.0
                    for y in range(ny):
                        wyx = wv[y, x]
                        if wyx > 0.0:
                            acc += wyx * log2(wyx / r[y])
                    dvec[x] = acc
                lower = 0.0
                upper = dvec[0]
                for x in range(nx):
                    lower += p[x] * dvec[x]
                    if dvec[x] > upper:
                        upper = dvec[x]
                if upper - lower <= tol:
                    break
                norm = 0.0
                for x in range(nx):
                    p[x] = p[x] * pow(2.0, dvec[x])
                    norm += p[x]
                for x in range(nx):
                    p[x] = p[x] / norm
    finally:
        free(r)
        free(dvec)
    if lower < 0.0:
        lower = 0.0
    return lower, p_arr, upper


def ml_decode(loglik, codewords, outputs, tie_u):
    """Maximum-likelihood decisions for a batch of received words."""
    cdef const double[:, ::1] ll = np.ascontiguousarray(loglik, dtype=np.float64)
    cdef const long long[:, ::1] cw = np.ascontiguousarray(codewords, dtype=np.int64)
    cdef const long long[:, ::1] out = np.ascontiguousarray(outputs, dtype=np.int64)
    cdef const double[::1] u = np.ascontiguousarray(tie_u, dtype=np.float64)
    cdef Py_ssize_t m_count = cw.shape[0], n = cw.shape[1], trials = out.shape[0]
    dec_arr = np.empty(trials, dtype=np.int64)
    cdef long long[::1] dec = dec_arr
    cdef double* scores = <double*>malloc(max(m_count, 1) * sizeof(double))
    cdef Py_ssize_t t, m, i, ties, k
    cdef double best, s
    try:
        with nogil:
            for t in range(trials):
                best = -INFINITY
                for m in range(m_count):
                    s = 0.0
                    for i in range(n):
                        s += ll[out[t, i], cw[m, i]]
                    scores[m] = s
                    if s > best:
                        best = s
                ties = 0
                for m in range(m_count):
                    if scores[m] >= best - _TIE_TOL:
                        ties += 1
                k = <Py_ssize_t>(u[t] * ties)
                if k >= ties:
                    k = ties - 1
                for m in range(m_count):
                    if scores[m] >= best - _TIE_TOL:
                        if k == 0:
                            dec[t] = m
                            break
                        k -= 1
    finally:
        free(scores)
    return dec_arr
