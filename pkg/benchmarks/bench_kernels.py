#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-Python fallback.

Times each kernel on synthetic data and the full diagnostics pipeline,
then prints a table with the speedup.  Both backends produce bit-identical
results (asserted here as a side check), so the choice is purely speed.

Usage: python benchmarks/bench_kernels.py [--rows N] [--cols P] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from levdiag.auxreg import PermutedFactors
from levdiag.decomposition import decomposition_one_components, decomposition_two_all
from levdiag.kernels import available_backends, get_backend
from levdiag.leverage import mahalanobis_sq_all
from levdiag.linalg import DataMatrix, center


def best_of(repeat, fn, *args):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernels(n, p, repeat):
    rng = np.random.default_rng(7)
    x = rng.standard_normal((n, p))
    py = get_backend("python")
    cy = get_backend("compiled")

    rows = []
    tilde, _, _ = cy.center(x)
    g = cy.gram(tilde)
    s = g / n
    a, _ = cy.cholesky_lower(s, 1e-12)
    m = cy.invert_lower(a)
    w = cy.lower_t_lower(m)
    v = rng.standard_normal(p)

    cases = [
        ("center", (x,)),
        ("gram", (tilde,)),
        ("cholesky_lower", (s, 1e-12)),
        ("invert_lower", (a,)),
        ("lower_t_lower", (m,)),
        ("row_solve_sq", (a, tilde)),
        ("row_dots", (tilde, v)),
        ("row_quad_forms", (tilde, w)),
    ]
    for name, args in cases:
        t_py, out_py = best_of(repeat, getattr(py, name), *args)
        t_cy, out_cy = best_of(repeat, getattr(cy, name), *args)
        first_py = out_py[0] if isinstance(out_py, tuple) else out_py
        first_cy = out_cy[0] if isinstance(out_cy, tuple) else out_cy
        assert np.asarray(first_py).tobytes() == np.asarray(first_cy).tobytes(), name
        rows.append((name, t_py, t_cy))
    return rows


def full_pipeline(data):
    cen = center(data)
    factors = PermutedFactors(cen)
    d2 = mahalanobis_sq_all(cen, factors.base)
    decomposition_one_components(cen, factors)
    for j in range(cen.p):
        decomposition_two_all(cen, j, factors)
    return d2


def bench_pipeline(n, p, repeat):
    import levdiag.kernels as kmod

    rng = np.random.default_rng(11)
    data = DataMatrix(rng.standard_normal((n, p)), tuple(f"x{j}" for j in range(p)))

    results = {}
    saved = {name: getattr(kmod, name) for name in (
        "center", "gram", "cholesky_lower", "invert_lower", "lower_t_lower",
        "row_solve_sq", "row_dots", "row_quad_forms")}
    try:
        for backend in ("python", "compiled"):
            impl = get_backend(backend)
            for name in saved:
                setattr(kmod, name, getattr(impl, name))
            results[backend], out = best_of(repeat, full_pipeline, data)
            results[backend + "_checksum"] = np.asarray(out).tobytes()
    finally:
        for name, fn in saved.items():
            setattr(kmod, name, fn)
    assert results["python_checksum"] == results["compiled_checksum"]
    return results["python"], results["compiled"]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=20000)
    parser.add_argument("--cols", type=int, default=12)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if "compiled" not in available_backends():
        raise SystemExit("compiled backend not built; nothing to compare")

    n, p = args.rows, args.cols
    print(f"kernel benchmark  n={n}  p={p}  (best of {args.repeat})")
    print(f"{'kernel':<18} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, t_py, t_cy in bench_kernels(n, p, args.repeat):
        print(f"{name:<18} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms {t_py / t_cy:>8.1f}x")

    t_py, t_cy = bench_pipeline(max(n // 4, 50), p, args.repeat)
    print(f"{'full pipeline':<18} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms {t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
