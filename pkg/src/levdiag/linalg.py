"""Dense linear-algebra layer: value types and deterministic factorizations.

Everything here is a pure function of its inputs; arrays held by the value
types are frozen (non-writeable) copies, safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConstantColumn, IndexOutOfRange, NotPositiveDefinite

# Relative pivot threshold for positive-definiteness, against the mean
# diagonal of the input.  Near-singular inputs must fail loudly rather
# than return garbage attributions.
PD_EPS = 1e-12


def _frozen(values, shape_hint=None) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """n x p matrix of regressor measurements with column names."""

    values: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2:
            raise ValueError("values must be a 2-d matrix")
        n, p = arr.shape
        if n < 2:
            raise ValueError("need at least two rows")
        if p < 1:
            raise ValueError("need at least one column")
        if not np.isfinite(arr).all():
            raise ValueError("all entries must be finite")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != p:
            raise ValueError(f"expected {p} column names, got {len(names)}")
        if len(set(names)) != p:
            raise ValueError("column names must be distinct")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CenteredData:
    """Column-centered data with per-column mean and population std."""

    tilde_x: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tilde_x", _frozen(self.tilde_x))
        object.__setattr__(self, "mean", _frozen(self.mean))
        object.__setattr__(self, "std", _frozen(self.std))

    @property
    def n(self) -> int:
        return self.tilde_x.shape[0]

    @property
    def p(self) -> int:
        return self.tilde_x.shape[1]


@dataclass(frozen=True)
class CholeskyPair:
    """Lower factor ``a`` of a covariance matrix and ``b = inv(a).T``.

    ``a`` has a strictly positive diagonal and satisfies ``a @ a.T = s``;
    ``b`` is upper-triangular with ``b.T = inv(a)`` (so ``a @ b.T = I`` and
    ``a.T @ b = I``).
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b", _frozen(self.b))

    @property
    def p(self) -> int:
        return self.a.shape[0]

    @property
    def leading_block(self) -> np.ndarray:
        """Leading (p-1) x (p-1) block of ``a``."""
        return self.a[: self.p - 1, : self.p - 1]

    @property
    def last_a_row(self) -> np.ndarray:
        """First p-1 entries of the last row of ``a``."""
        return self.a[self.p - 1, : self.p - 1]

    @property
    def a_pp(self) -> float:
        return float(self.a[self.p - 1, self.p - 1])

    @property
    def last_b_column(self) -> np.ndarray:
        return self.b[:, self.p - 1]

    @property
    def b_pp(self) -> float:
        return float(self.b[self.p - 1, self.p - 1])


@dataclass(frozen=True)
class TranspositionPerm:
    """Permutation swapping one position with the last; identity if equal."""

    index: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not 0 <= self.index < self.dim:
            raise IndexOutOfRange(
                f"transposition index {self.index} outside 0..{self.dim - 1}"
            )

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Swap entries ``index`` and ``dim-1`` of a vector."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            raise IndexOutOfRange(f"vector length {v.shape} does not match dim {self.dim}")
        out = v.copy()
        out[self.index], out[self.dim - 1] = out[self.dim - 1], out[self.index]
        return out

    def apply_columns(self, m: np.ndarray) -> np.ndarray:
        """Swap columns ``index`` and ``dim-1`` of a matrix."""
        m = np.asarray(m, dtype=np.float64)
        if m.ndim != 2 or m.shape[1] != self.dim:
            raise IndexOutOfRange("matrix width does not match dim")
        out = m.copy()
        out[:, [self.index, self.dim - 1]] = out[:, [self.dim - 1, self.index]]
        return out

    def apply_symmetric(self, s: np.ndarray) -> np.ndarray:
        """Conjugate a square matrix: swap both rows and columns."""
        s = np.asarray(s, dtype=np.float64)
        if s.shape != (self.dim, self.dim):
            raise IndexOutOfRange("matrix order does not match dim")
        out = s.copy()
        i, j = self.index, self.dim - 1
        out[[i, j], :] = out[[j, i], :]
        out[:, [i, j]] = out[:, [j, i]]
        return out


def center(data: DataMatrix) -> CenteredData:
    """Center each column; fails with ConstantColumn on zero variance."""
    tilde, mean, std = kernels.center(data.values)
    for j in range(data.p):
        if std[j] == 0.0:
            raise ConstantColumn(j, data.column_names[j])
    return CenteredData(tilde, mean, std)


def covariance(c: CenteredData) -> np.ndarray:
    """Data covariance with divisor n, symmetric by construction."""
    return kernels.gram(c.tilde_x) / c.n


def cholesky(s: np.ndarray, eps: float = PD_EPS) -> CholeskyPair:
    """Factor a symmetric positive-definite matrix into a CholeskyPair.

    Raises NotPositiveDefinite with the failing pivot index when a pivot
    falls at or below ``eps`` times the mean diagonal.
    """
    s = np.ascontiguousarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.array_equal(s, s.T):
        raise ValueError("matrix is not symmetric")
    a, fail = kernels.cholesky_lower(s, eps)
    if fail >= 0:
        raise NotPositiveDefinite(int(fail))
    b = kernels.invert_lower(a).T
    return CholeskyPair(a, b)


def apply_transposition(perm: TranspositionPerm, v: np.ndarray) -> np.ndarray:
    """Entries ``perm.index`` and the last entry swapped; involution."""
    return perm.apply(v)


def direct_inverse(s: np.ndarray, eps: float = PD_EPS) -> np.ndarray:
    """Explicit SPD inverse via the Cholesky factor (test / verify oracle)."""
    pair = cholesky(s, eps)
    m = np.ascontiguousarray(pair.b.T)
    return kernels.lower_t_lower(m)
