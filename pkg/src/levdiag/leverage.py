"""Per-row leverage and squared Mahalanobis distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IndexOutOfRange
from .linalg import CenteredData, CholeskyPair, DataMatrix, center, direct_inverse


@dataclass(frozen=True)
class LeverageRecord:
    """Leverage of one row: h = (1 + D^2) / n, flagged when above threshold."""

    row_index: int
    leverage: float
    mahalanobis_sq: float
    flagged: bool


def default_threshold(n: int, p: int) -> float:
    """Twice the mean leverage (p + 1) / n, the conventional cutoff."""
    return 2.0 * (p + 1) / n


def _check_row(r: int, n: int) -> None:
    if not 0 <= r < n:
        raise IndexOutOfRange(f"row {r} outside 0..{n - 1}")


def mahalanobis_sq_all(c: CenteredData, chol: CholeskyPair) -> np.ndarray:
    """Squared Mahalanobis distance of every row from the column means.

    Computed as the squared norm of the forward-substitution solve
    ``a @ w = x_r - mean``; the explicit inverse is never formed.
    """
    return kernels.row_solve_sq(chol.a, c.tilde_x)


def mahalanobis_sq(c: CenteredData, chol: CholeskyPair, r: int) -> float:
    _check_row(r, c.n)
    return float(kernels.row_solve_sq(chol.a, c.tilde_x[r : r + 1])[0])


def _record(r: int, d2: float, n: int, threshold: float) -> LeverageRecord:
    lev = (1.0 + d2) / n
    return LeverageRecord(r, lev, d2, lev > threshold)


def leverage(
    c: CenteredData, chol: CholeskyPair, r: int, threshold: float | None = None
) -> LeverageRecord:
    """Leverage of row ``r``; default threshold is 2(p+1)/n."""
    th = default_threshold(c.n, c.p) if threshold is None else threshold
    return _record(r, mahalanobis_sq(c, chol, r), c.n, th)


def leverage_all(
    c: CenteredData, chol: CholeskyPair, threshold: float | None = None
) -> list[LeverageRecord]:
    th = default_threshold(c.n, c.p) if threshold is None else threshold
    d2s = mahalanobis_sq_all(c, chol)
    return [_record(r, float(d2), c.n, th) for r, d2 in enumerate(d2s)]


def hat_diagonal_oracle(data: DataMatrix) -> np.ndarray:
    """Hat-matrix diagonal for the intercept-augmented design.

    Direct route through the explicit inverse of the centered cross-product
    matrix; independent of the triangular-solve path, used by tests and the
    verify mode.
    """
    cen = center(data)
    g = kernels.gram(cen.tilde_x)
    minv = direct_inverse(g)
    q = kernels.row_quad_forms(cen.tilde_x, minv)
    return 1.0 / data.n + q
