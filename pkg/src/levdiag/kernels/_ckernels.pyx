# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled kernel backend.

Statement-for-statement mirror of ``pykernels``: identical loop structure
and accumulation order, compiled with FP contraction disabled, so results
are bit-identical to the pure-Python backend.
"""

from libc.math cimport sqrt

import numpy as np


def center(x):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t p = xv.shape[1]
    tilde_arr = np.empty((n, p), dtype=np.float64)
    mean_arr = np.empty(p, dtype=np.float64)
    std_arr = np.empty(p, dtype=np.float64)
    cdef double[:, ::1] tilde = tilde_arr
    cdef double[::1] mean = mean_arr
    cdef double[::1] std = std_arr
    cdef Py_ssize_t r, j
    cdef double acc, m, t
    for j in range(p):
        acc = 0.0
        for r in range(n):
            acc += xv[r, j]
        mean[j] = acc / n
    for j in range(p):
        m = mean[j]
        acc = 0.0
        for r in range(n):
            t = xv[r, j] - m
            tilde[r, j] = t
            acc += t * t
        std[j] = sqrt(acc / n)
    return tilde_arr, mean_arr, std_arr


def gram(tilde):
    cdef const double[:, ::1] t = np.ascontiguousarray(tilde, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t p = t.shape[1]
    g_arr = np.zeros((p, p), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef Py_ssize_t i, j, r
    cdef double acc
    for i in range(p):
        for j in range(i + 1):
            acc = 0.0
            for r in range(n):
                acc += t[r, i] * t[r, j]
            g[i, j] = acc
            g[j, i] = acc
    return g_arr


def cholesky_lower(s, double eps):
    cdef const double[:, ::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef Py_ssize_t p = sv.shape[0]
    a_arr = np.zeros((p, p), dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, d, tr, thresh
    if p == 0:
        return a_arr, -1
    tr = 0.0
    for j in range(p):
        tr += sv[j, j]
    thresh = eps * (tr / p)
    if thresh < 0.0:
        thresh = 0.0
    for j in range(p):
        acc = sv[j, j]
        for k in range(j):
            acc -= a[j, k] * a[j, k]
        if acc <= thresh:
            return a_arr, j
        d = sqrt(acc)
        a[j, j] = d
        for i in range(j + 1, p):
            acc = sv[i, j]
            for k in range(j):
                acc -= a[i, k] * a[j, k]
            a[i, j] = acc / d
    return a_arr, -1


def invert_lower(a):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t p = av.shape[0]
    m_arr = np.zeros((p, p), dtype=np.float64)
    cdef double[:, ::1] m = m_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    for j in range(p):
        m[j, j] = 1.0 / av[j, j]
        for i in range(j + 1, p):
            acc = 0.0
            for k in range(j, i):
                acc += av[i, k] * m[k, j]
            m[i, j] = -acc / av[i, i]
    return m_arr


def lower_t_lower(m):
    cdef const double[:, ::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef Py_ssize_t p = mv.shape[0]
    w_arr = np.zeros((p, p), dtype=np.float64)
    cdef double[:, ::1] w = w_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(p):
        for j in range(i + 1):
            acc = 0.0
            for k in range(i, p):
                acc += mv[k, i] * mv[k, j]
            w[i, j] = acc
            w[j, i] = acc
    return w_arr


def row_solve_sq(a, dev):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(dev, dtype=np.float64)
    cdef Py_ssize_t p = av.shape[0]
    cdef Py_ssize_t n = d.shape[0]
    if d.shape[1] != p:
        raise ValueError("dev width does not match factor order")
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    w_arr = np.zeros(p, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t r, k, l
    cdef double acc, acc2, wk
    for r in range(n):
        acc2 = 0.0
        for k in range(p):
            acc = d[r, k]
            for l in range(k):
                acc -= av[k, l] * w[l]
            wk = acc / av[k, k]
            w[k] = wk
            acc2 += wk * wk
        out[r] = acc2
    return out_arr


def row_dots(dev, w):
    cdef const double[:, ::1] d = np.ascontiguousarray(dev, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t p = d.shape[1]
    if wv.shape[0] != p:
        raise ValueError("weight length does not match row width")
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc
    for r in range(n):
        acc = 0.0
        for k in range(p):
            acc += d[r, k] * wv[k]
        out[r] = acc
    return out_arr


def row_quad_forms(dev, m):
    cdef const double[:, ::1] d = np.ascontiguousarray(dev, dtype=np.float64)
    cdef const double[:, ::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t p = d.shape[1]
    if mv.shape[0] != p or mv.shape[1] != p:
        raise ValueError("matrix order does not match row width")
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, i, j
    cdef double acc, t
    for r in range(n):
        acc = 0.0
        for i in range(p):
            t = 0.0
            for j in range(p):
                t += mv[i, j] * d[r, j]
            acc += d[r, i] * t
        out[r] = acc
    return out_arr
