"""Exact attributions of the squared Mahalanobis distance.

Two complementary splits, both summing to D_r^2 by construction of the
underlying factorizations:

* per-regressor attribution: one signed term per regressor, the product of
  its collinearity inflation, its scaled auxiliary residual and its
  marginal z-score;
* removal split: the distance over the remaining regressors plus the
  squared auxiliary residual of the removed one, giving the exact change
  in leverage if that regressor were dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .auxreg import (
    PermutedFactors,
    _check_regressor,
    _factors,
    inflation_factor,
    multiple_correlation,
    standardized_aux_residual,
    standardized_aux_residuals_all,
)
from .errors import IndexOutOfRange, SingleRegressor
from .linalg import CenteredData


@dataclass(frozen=True)
class DecompositionITerm:
    """One regressor's signed contribution to a row's D^2.

    ``term = inflation * aux_residual * marginal_z``; individual terms may
    be negative, only the sum over regressors is constrained.
    """

    regressor: int
    inflation: float
    aux_residual: float
    marginal_z: float
    term: float


@dataclass(frozen=True)
class DecompositionIIResult:
    """Split of a row's D^2 into without-one-regressor distance + remainder."""

    removed: int
    subset_dist_sq: float
    residual_sq: float
    total: float


def _check_row(r: int, n: int) -> None:
    if not 0 <= r < n:
        raise IndexOutOfRange(f"row {r} outside 0..{n - 1}")


def inverse_cov_via_permutations(
    c: CenteredData, factors: PermutedFactors | None = None
) -> np.ndarray:
    """Inverse covariance assembled column by column from permuted factors.

    Column i is the permuted last inverse-factor column scaled by its final
    diagonal entry; symmetric only up to rounding, by construction.
    """
    fac = _factors(c, factors)
    p = c.p
    out = np.empty((p, p), dtype=np.float64)
    for i in range(p):
        out[:, i] = fac.pair(i).b_pp * fac.weight(i)
    return out


def decomposition_one(
    c: CenteredData, r: int, factors: PermutedFactors | None = None
) -> list[DecompositionITerm]:
    """Per-regressor attribution of row ``r``'s squared distance.

    Returns exactly p terms in original column order; their sum equals the
    row's D^2 up to rounding.
    """
    _check_row(r, c.n)
    fac = _factors(c, factors)
    terms = []
    for i in range(c.p):
        r_sq = multiple_correlation(c, i, fac)
        infl = inflation_factor(r_sq)
        u = standardized_aux_residual(c, i, r, fac)
        z = float(c.tilde_x[r, i] / c.std[i])
        terms.append(DecompositionITerm(i, infl, u, z, infl * u * z))
    return terms


def decomposition_one_components(
    c: CenteredData, factors: PermutedFactors | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Batch form of the per-regressor attribution for all rows.

    Returns ``(inflation[p], aux_residuals[n, p], marginal_z[n, p],
    terms[n, p])``; row-for-row identical to ``decomposition_one``.
    """
    fac = _factors(c, factors)
    n, p = c.n, c.p
    infl = np.array(
        [inflation_factor(multiple_correlation(c, i, fac)) for i in range(p)],
        dtype=np.float64,
    )
    u = np.empty((n, p), dtype=np.float64)
    for i in range(p):
        u[:, i] = standardized_aux_residuals_all(c, i, fac)
    z = c.tilde_x / c.std[None, :]
    terms = (infl[None, :] * u) * z
    return infl, u, z, terms


def partitioned_inverse(
    c: CenteredData, factors: PermutedFactors | None = None
) -> np.ndarray:
    """Inverse covariance assembled from the partition of the base factor.

    Top-left block: inverse of the leading-subset covariance plus the outer
    product of the head of the last inverse-factor column; border scaled by
    its final entry; corner is that entry squared.
    """
    p = c.p
    if p < 2:
        raise SingleRegressor("partitioned inverse needs at least two regressors")
    fac = _factors(c, factors)
    pair = fac.base
    a1 = np.ascontiguousarray(pair.leading_block)
    inv1 = kernels.lower_t_lower(kernels.invert_lower(a1))
    b1 = pair.last_b_column[: p - 1]
    bpp = pair.b_pp
    out = np.empty((p, p), dtype=np.float64)
    out[: p - 1, : p - 1] = inv1 + np.multiply.outer(b1, b1)
    out[: p - 1, p - 1] = bpp * b1
    out[p - 1, : p - 1] = bpp * b1
    out[p - 1, p - 1] = bpp * bpp
    return out


def _subset_dev(c: CenteredData, j: int, rows: np.ndarray) -> np.ndarray:
    # Deviations with regressor j moved last, last coordinate dropped.
    p = c.p
    dev = rows.copy()
    if j != p - 1:
        dev[:, [j, p - 1]] = dev[:, [p - 1, j]]
    return np.ascontiguousarray(dev[:, : p - 1])


def decomposition_two(
    c: CenteredData, j: int, r: int, factors: PermutedFactors | None = None
) -> DecompositionIIResult:
    """Split row ``r``'s D^2 by removing regressor ``j``.

    ``subset_dist_sq`` is the squared Mahalanobis distance over the other
    p-1 regressors (0 when p = 1); ``residual_sq`` is the squared scaled
    auxiliary residual of regressor ``j`` at row ``r``.
    """
    _check_regressor(j, c.p)
    _check_row(r, c.n)
    fac = _factors(c, factors)
    pair = fac.pair(j)
    p = c.p
    a1 = np.ascontiguousarray(pair.a[: p - 1, : p - 1])
    sub = _subset_dev(c, j, c.tilde_x[r : r + 1])
    subset = float(kernels.row_solve_sq(a1, sub)[0])
    u = standardized_aux_residual(c, j, r, fac)
    residual_sq = u * u
    return DecompositionIIResult(j, subset, residual_sq, subset + residual_sq)


def decomposition_two_all(
    c: CenteredData, j: int, factors: PermutedFactors | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Batch removal split for all rows: ``(subset_dist_sq[n], residual_sq[n])``."""
    _check_regressor(j, c.p)
    fac = _factors(c, factors)
    pair = fac.pair(j)
    p = c.p
    a1 = np.ascontiguousarray(pair.a[: p - 1, : p - 1])
    subset = kernels.row_solve_sq(a1, _subset_dev(c, j, c.tilde_x))
    u = standardized_aux_residuals_all(c, j, fac)
    return subset, u * u


def leverage_drop(
    c: CenteredData, j: int, r: int, factors: PermutedFactors | None = None
) -> float:
    """Exact decrease in row ``r``'s leverage if regressor ``j`` is dropped
    while the remaining regressors stay in the model."""
    return decomposition_two(c, j, r, factors).residual_sq / c.n
