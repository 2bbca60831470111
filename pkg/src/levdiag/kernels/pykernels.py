"""Pure-Python kernel backend.

Every floating-point reduction used by the library lives here (or in the
compiled twin ``_ckernels``).  Accumulation is plain sequential summation,
never pairwise, so that the two backends produce bit-identical results:
the compiled module mirrors these loops statement for statement and is
built with FP contraction disabled.

All functions accept anything convertible to a C-contiguous float64 array
and return fresh numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np


def _as_matrix(x) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    return a


def center(x):
    """Column means, centered matrix, population standard deviations.

    Returns ``(tilde, mean, std)`` where ``tilde[r, j] = x[r, j] - mean[j]``
    and ``std[j] = sqrt(mean of tilde[:, j]**2)`` (divisor n).
    """
    xa = _as_matrix(x)
    n, p = xa.shape
    rows = xa.tolist()
    mean = [0.0] * p
    for j in range(p):
        acc = 0.0
        for r in range(n):
            acc += rows[r][j]
        mean[j] = acc / n
    tilde = [[0.0] * p for _ in range(n)]
    std = [0.0] * p
    for j in range(p):
        m = mean[j]
        acc = 0.0
        for r in range(n):
            t = rows[r][j] - m
            tilde[r][j] = t
            acc += t * t
        std[j] = math.sqrt(acc / n)
    return (
        np.array(tilde, dtype=np.float64),
        np.array(mean, dtype=np.float64),
        np.array(std, dtype=np.float64),
    )


def gram(tilde):
    """Cross-product matrix ``tilde.T @ tilde``, symmetric by construction."""
    t = _as_matrix(tilde)
    n, p = t.shape
    rows = t.tolist()
    g = [[0.0] * p for _ in range(p)]
    for i in range(p):
        for j in range(i + 1):
            acc = 0.0
            for r in range(n):
                acc += rows[r][i] * rows[r][j]
            g[i][j] = acc
            g[j][i] = acc
    return np.array(g, dtype=np.float64).reshape(p, p)


def cholesky_lower(s, eps):
    """Lower Cholesky factor with a relative pivot threshold.

    Returns ``(a, fail)``: ``fail`` is the index of the first pivot that is
    <= eps * mean(diagonal), or -1 on success.  The factor has a strictly
    positive diagonal when ``fail`` is -1.
    """
    sa = _as_matrix(s)
    p = sa.shape[0]
    rows = sa.tolist()
    a = [[0.0] * p for _ in range(p)]
    if p == 0:
        return np.zeros((0, 0), dtype=np.float64), -1
    tr = 0.0
    for j in range(p):
        tr += rows[j][j]
    thresh = eps * (tr / p)
    if thresh < 0.0:
        thresh = 0.0
    for j in range(p):
        acc = rows[j][j]
        for k in range(j):
            acc -= a[j][k] * a[j][k]
        if acc <= thresh:
            return np.array(a, dtype=np.float64), j
        d = math.sqrt(acc)
        a[j][j] = d
        for i in range(j + 1, p):
            acc = rows[i][j]
            for k in range(j):
                acc -= a[i][k] * a[j][k]
            a[i][j] = acc / d
    return np.array(a, dtype=np.float64), -1


def invert_lower(a):
    """Inverse of a lower-triangular matrix by forward substitution."""
    aa = _as_matrix(a)
    p = aa.shape[0]
    rows = aa.tolist()
    m = [[0.0] * p for _ in range(p)]
    for j in range(p):
        m[j][j] = 1.0 / rows[j][j]
        for i in range(j + 1, p):
            acc = 0.0
            for k in range(j, i):
                acc += rows[i][k] * m[k][j]
            m[i][j] = -acc / rows[i][i]
    return np.array(m, dtype=np.float64).reshape(p, p)


def lower_t_lower(m):
    """``m.T @ m`` for lower-triangular ``m``, symmetric by construction."""
    ma = _as_matrix(m)
    p = ma.shape[0]
    rows = ma.tolist()
    w = [[0.0] * p for _ in range(p)]
    for i in range(p):
        for j in range(i + 1):
            acc = 0.0
            for k in range(i, p):
                acc += rows[k][i] * rows[k][j]
            w[i][j] = acc
            w[j][i] = acc
    return np.array(w, dtype=np.float64).reshape(p, p)


def row_solve_sq(a, dev):
    """Squared norms of the forward-substitution solves ``a @ w = dev[r]``.

    ``a`` is lower-triangular (p, p); ``dev`` is (n, p).  Returns a length-n
    vector of ``|w|^2``.  p == 0 yields zeros.
    """
    aa = _as_matrix(a)
    d = _as_matrix(dev)
    p = aa.shape[0]
    n = d.shape[0]
    if d.shape[1] != p:
        raise ValueError("dev width does not match factor order")
    arows = aa.tolist()
    drows = d.tolist()
    out = [0.0] * n
    w = [0.0] * p
    for r in range(n):
        dr = drows[r]
        acc2 = 0.0
        for k in range(p):
            acc = dr[k]
            ak = arows[k]
            for l in range(k):
                acc -= ak[l] * w[l]
            wk = acc / ak[k]
            w[k] = wk
            acc2 += wk * wk
        out[r] = acc2
    return np.array(out, dtype=np.float64)


def row_dots(dev, w):
    """Per-row inner products ``dev[r] . w``."""
    d = _as_matrix(dev)
    wv = np.ascontiguousarray(w, dtype=np.float64)
    n, p = d.shape
    if wv.shape != (p,):
        raise ValueError("weight length does not match row width")
    drows = d.tolist()
    wl = wv.tolist()
    out = [0.0] * n
    for r in range(n):
        dr = drows[r]
        acc = 0.0
        for k in range(p):
            acc += dr[k] * wl[k]
        out[r] = acc
    return np.array(out, dtype=np.float64)


def row_quad_forms(dev, m):
    """Per-row quadratic forms ``dev[r].T @ m @ dev[r]``."""
    d = _as_matrix(dev)
    ma = _as_matrix(m)
    n, p = d.shape
    if ma.shape != (p, p):
        raise ValueError("matrix order does not match row width")
    drows = d.tolist()
    mrows = ma.tolist()
    out = [0.0] * n
    for r in range(n):
        dr = drows[r]
        acc = 0.0
        for i in range(p):
            mi = mrows[i]
            t = 0.0
            for j in range(p):
                t += mi[j] * dr[j]
            acc += dr[i] * t
        out[r] = acc
    return np.array(out, dtype=np.float64)
