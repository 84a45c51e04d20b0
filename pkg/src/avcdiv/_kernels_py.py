"""Pure-Python reference versions of the compiled kernels in ``_kernels.pyx``.

Every function here performs the same floating-point operations in the same
order as its compiled twin, so both backends agree to the last bit on the
same platform.  Matrices are (outputs x inputs).
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

# 1/phi
_R = (math.sqrt(5.0) - 1.0) / 2.0
_TIE_TOL = 1e-9


def _mi(p, w, ny, nx):
    # p: list of floats, w: nested list w[y][x]
    r = [0.0] * ny
    for y in range(ny):
        acc = 0.0
        for x in range(nx):
            acc += p[x] * w[y][x]
        r[y] = acc
    total = 0.0
    for x in range(nx):
        px = p[x]
        if px <= 0.0:
            continue
        for y in range(ny):
            wyx = w[y][x]
            if wyx > 0.0:
                total += px * wyx * math.log2(wyx / r[y])
    return total if total > 0.0 else 0.0


def mutual_information(p, w):
    w = np.asarray(w, dtype=np.float64)
    ny, nx = w.shape
    return _mi([float(v) for v in p], w.tolist(), ny, nx)


def _mix(w1, w2, theta, ny, nx):
    return [[theta * w1[y][x] + (1.0 - theta) * w2[y][x] for x in range(nx)] for y in range(ny)]


def _binary_capacity(w, ny, tol):
    a, b = 0.0, 1.0
    c = b - _R * (b - a)
    d = a + _R * (b - a)
    fc = _mi([c, 1.0 - c], w, ny, 2)
    fd = _mi([d, 1.0 - d], w, ny, 2)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _R * (b - a)
            fc = _mi([c, 1.0 - c], w, ny, 2)
        else:
            a, c, fc = c, d, fd
            d = a + _R * (b - a)
            fd = _mi([d, 1.0 - d], w, ny, 2)
    best_x = 0.5 * (a + b)
    best_f = _mi([best_x, 1.0 - best_x], w, ny, 2)
    for x in (0.0, 1.0):
        f = _mi([x, 1.0 - x], w, ny, 2)
        if f > best_f:
            best_x, best_f = x, f
    return best_f, best_x


def binary_capacity(w, tol=1e-10):
    """Max over p0 of I((p0, 1-p0); w) for a binary-input channel."""
    w = np.asarray(w, dtype=np.float64)
    return _binary_capacity(w.tolist(), w.shape[0], tol)


def minimax_two_state(w1, w2, tol=1e-10):
    """Min over theta of max over p0 of I((p0,1-p0); theta*w1 + (1-theta)*w2).

    Both channels must be binary-input.  Returns (value, theta, p0).
    """
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    ny = w1.shape[0]
    l1, l2 = w1.tolist(), w2.tolist()

    def g(theta):
        return _binary_capacity(_mix(l1, l2, theta, ny, 2), ny, tol)

    a, b = 0.0, 1.0
    c = b - _R * (b - a)
    d = a + _R * (b - a)
    gc = g(c)[0]
    gd = g(d)[0]
    while b - a > tol:
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _R * (b - a)
            gc = g(c)[0]
        else:
            a, c, gc = c, d, gd
            d = a + _R * (b - a)
            gd = g(d)[0]
    best_t = 0.5 * (a + b)
    best_v, best_p = g(best_t)
    for t in (0.0, 1.0):
        v, p = g(t)
        if v < best_v:
            best_t, best_v, best_p = t, v, p
    return best_v, best_t, best_p


def min_over_theta(p, w1, w2, tol=1e-10):
    """Min over theta of I(p; theta*w1 + (1-theta)*w2) for a fixed input law p."""
    w1 = np.asarray(w1, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    ny, nx = w1.shape
    l1, l2 = w1.tolist(), w2.tolist()
    pl = [float(v) for v in p]

    def f(theta):
        return _mi(pl, _mix(l1, l2, theta, ny, nx), ny, nx)

    a, b = 0.0, 1.0
    c = b - _R * (b - a)
    d = a + _R * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _R * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _R * (b - a)
            fd = f(d)
    best_t = 0.5 * (a + b)
    best_v = f(best_t)
    for t in (0.0, 1.0):
        v = f(t)
        if v < best_v:
            best_t, best_v = t, v
    return best_v, best_t


def blahut_arimoto(w, tol=1e-12, max_iter=200000):
    """Capacity of a DMC by Blahut-Arimoto.

    Returns (lower, p, upper) where lower = I(p; w) and upper = max_x D(w_x || r)
    bracket the capacity.
    """
    w = np.asarray(w, dtype=np.float64)
    ny, nx = w.shape
    wl = w.tolist()
    p = [1.0 / nx] * nx
    dvec = [0.0] * nx
    lower = upper = 0.0
    for _ in range(max_iter):
        r = [0.0] * ny
        for y in range(ny):
            acc = 0.0
            for x in range(nx):
                acc += p[x] * wl[y][x]
            r[y] = acc
        for x in range(nx):
            acc = 0.0
            for y in range(ny):
                wyx = wl[y][x]
                if wyx > 0.0:
                    acc += wyx * math.log2(wyx / r[y])
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
            p[x] = p[x] * 2.0 ** dvec[x]
            norm += p[x]
        for x in range(nx):
            p[x] = p[x] / norm
    if lower < 0.0:
        lower = 0.0
    return lower, np.array(p), upper


def ml_decode(loglik, codewords, outputs, tie_u):
    """Maximum-likelihood decisions for a batch of received words.

    ``loglik[y, x]`` is the per-letter log-likelihood, ``codewords`` is (M, n),
    ``outputs`` is (T, n) and ``tie_u`` holds one uniform per trial used to pick
    among tied messages (ascending order).
    """
    ll = np.asarray(loglik, dtype=np.float64).tolist()
    cw = np.asarray(codewords, dtype=np.int64).tolist()
    out = np.asarray(outputs, dtype=np.int64).tolist()
    u = np.asarray(tie_u, dtype=np.float64).tolist()
    m_count = len(cw)
    n = len(cw[0]) if m_count else 0
    decisions = np.empty(len(out), dtype=np.int64)
    scores = [0.0] * m_count
    for t, y in enumerate(out):
        best = -math.inf
        for m in range(m_count):
            c = cw[m]
            s = 0.0
            for i in range(n):
                s += ll[y[i]][c[i]]
            scores[m] = s
            if s > best:
                best = s
        ties = 0
        for m in range(m_count):
            if scores[m] >= best - _TIE_TOL:
                ties += 1
        k = int(u[t] * ties)
        if k >= ties:
            k = ties - 1
        for m in range(m_count):
            if scores[m] >= best - _TIE_TOL:
                if k == 0:
                    decisions[t] = m
                    break
                k -= 1
    return decisions
