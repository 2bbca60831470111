"""Auxiliary regressions: each regressor regressed on all the others.

Coefficients, residuals, SSE, squared multiple correlation and the
collinearity inflation factor are all read off Cholesky factorizations of
the covariance with the target regressor moved to the last position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IndexOutOfRange, NotPositiveDefinite, SingleRegressor
from .linalg import PD_EPS, CenteredData, CholeskyPair, TranspositionPerm, cholesky, covariance


def _check_regressor(i: int, p: int) -> None:
    if not 0 <= i < p:
        raise IndexOutOfRange(f"regressor {i} outside 0..{p - 1}")


def _original_index(pivot: int, target: int, p: int) -> int:
    # Undo the swap (target <-> last) that produced the permuted matrix.
    if pivot == target:
        return p - 1
    if pivot == p - 1:
        return target
    return pivot


class PermutedFactors:
    """Cholesky factors of the covariance with each regressor moved last.

    One factorization per regressor (position ``i`` holds the factors for
    the column order with regressor ``i`` in the final slot), computed once
    and shared read-only by the attribution routines.  ``weight(i)`` is the
    last column of the permuted inverse-transpose factor mapped back to the
    original column order, i.e. the vector whose dot product with a row
    deviation gives that row's scaled auxiliary residual for regressor i.
    """

    def __init__(self, centered: CenteredData, eps: float = PD_EPS):
        self.centered = centered
        p = centered.p
        s = covariance(centered)
        s.setflags(write=False)
        self.covariance_matrix = s
        pairs: list[CholeskyPair] = []
        weights: list[np.ndarray] = []
        for i in range(p):
            perm = TranspositionPerm(i, p)
            si = perm.apply_symmetric(s)
            try:
                pair = cholesky(si, eps)
            except NotPositiveDefinite as exc:
                raise NotPositiveDefinite(
                    _original_index(exc.pivot_index, i, p)
                ) from None
            pairs.append(pair)
            w = pair.last_b_column.copy()
            w[i], w[p - 1] = w[p - 1], w[i]
            w.setflags(write=False)
            weights.append(w)
        self.pairs = tuple(pairs)
        self._weights = tuple(weights)

    @property
    def p(self) -> int:
        return self.centered.p

    @property
    def base(self) -> CholeskyPair:
        """Factors of the unpermuted covariance."""
        return self.pairs[self.p - 1]

    def pair(self, i: int) -> CholeskyPair:
        _check_regressor(i, self.p)
        return self.pairs[i]

    def weight(self, i: int) -> np.ndarray:
        _check_regressor(i, self.p)
        return self._weights[i]


@dataclass(frozen=True)
class AuxRegression:
    """Least-squares fit of one centered regressor on the remaining ones."""

    target: int
    others: tuple[int, ...]
    coefficients: np.ndarray
    residuals: np.ndarray
    sse: float
    r_sq: float
    inflation: float


def _factors(c: CenteredData, factors: PermutedFactors | None) -> PermutedFactors:
    return factors if factors is not None else PermutedFactors(c)


def multiple_correlation(
    c: CenteredData, i: int, factors: PermutedFactors | None = None
) -> float:
    """Squared multiple correlation of regressor ``i`` with the others.

    Read off the permuted factor: with the target last, the squared norm of
    the final off-diagonal row against the final diagonal entry.  Defined
    as 0 for a single regressor.
    """
    p = c.p
    _check_regressor(i, p)
    if p == 1:
        return 0.0
    pair = _factors(c, factors).pair(i)
    a = pair.a
    acc = 0.0
    for k in range(p - 1):
        acc += float(a[p - 1, k]) * float(a[p - 1, k])
    app = float(a[p - 1, p - 1])
    return acc / (acc + app * app)


def inflation_factor(r_sq: float) -> float:
    """Collinearity amplifier (1 - r^2)^(-1/2); >= 1, equal to 1 iff r^2 = 0."""
    return 1.0 / math.sqrt(1.0 - r_sq)


def standardized_aux_residual(
    c: CenteredData, i: int, r: int, factors: PermutedFactors | None = None
) -> float:
    """Scaled residual of row ``r`` in the auxiliary regression for ``i``.

    The residual times the reciprocal scale of the fit; exactly the middle
    factor of the per-regressor attribution.  For p = 1 this reduces to the
    marginal z-score (x_ri - mean_i) / s_i.
    """
    p = c.p
    _check_regressor(i, p)
    if not 0 <= r < c.n:
        raise IndexOutOfRange(f"row {r} outside 0..{c.n - 1}")
    w = _factors(c, factors).weight(i)
    return float(kernels.row_dots(c.tilde_x[r : r + 1], w)[0])


def standardized_aux_residuals_all(
    c: CenteredData, i: int, factors: PermutedFactors | None = None
) -> np.ndarray:
    w = _factors(c, factors).weight(i)
    return kernels.row_dots(c.tilde_x, w)


def aux_regression(
    c: CenteredData, i: int, factors: PermutedFactors | None = None
) -> AuxRegression:
    """Regression of regressor ``i`` on the remaining regressors.

    Coefficients are reported against ``others`` in ascending original
    column order.  Raises SingleRegressor when there is nothing to regress
    on.
    """
    p = c.p
    _check_regressor(i, p)
    if p == 1:
        raise SingleRegressor("auxiliary regression needs at least two regressors")
    fac = _factors(c, factors)
    pair = fac.pair(i)
    bvec = pair.last_b_column
    bpp = pair.b_pp
    coeff_permuted = -(bvec[: p - 1] / bpp)

    perm = list(range(p))
    perm[i], perm[p - 1] = perm[p - 1], perm[i]
    ordered = sorted((perm[k], float(coeff_permuted[k])) for k in range(p - 1))
    others = tuple(idx for idx, _ in ordered)
    coefficients = np.array([v for _, v in ordered], dtype=np.float64)

    residuals = kernels.row_dots(c.tilde_x, fac.weight(i)) / bpp
    sse = c.n / (bpp * bpp)
    r_sq = multiple_correlation(c, i, fac)
    return AuxRegression(
        target=i,
        others=others,
        coefficients=coefficients,
        residuals=residuals,
        sse=sse,
        r_sq=r_sq,
        inflation=inflation_factor(r_sq),
    )
