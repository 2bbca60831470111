"""Exception types shared across the package."""


class LevdiagError(Exception):
    """Base class for all errors raised by this package."""


class ConstantColumn(LevdiagError):
    """A regressor column has zero variance and cannot be standardized."""

    def __init__(self, index: int, name: str | None = None):
        self.index = index
        self.name = name
        label = f"column {index}" if name is None else f"column {index} ({name!r})"
        super().__init__(f"{label} is constant (zero variance)")


class NotPositiveDefinite(LevdiagError):
    """Covariance factorization hit a nonpositive pivot.

    Signals exact or near collinearity; ``pivot_index`` is the offending
    column (in original column order when the factorization was permuted).
    """

    def __init__(self, pivot_index: int, name: str | None = None):
        self.pivot_index = pivot_index
        self.name = name
        label = f"pivot {pivot_index}" if name is None else f"pivot {pivot_index} ({name!r})"
        super().__init__(f"covariance matrix is not positive definite at {label}")


class SingleRegressor(LevdiagError):
    """Operation needs at least two regressors."""


class IndexOutOfRange(LevdiagError, IndexError):
    """Row or regressor index outside the valid range."""


class BadSpec(LevdiagError):
    """Invalid scenario specification."""


class DuplicateHeader(LevdiagError):
    """CSV header contains a repeated column name."""


class UnknownColumn(LevdiagError):
    """A named column does not exist in the input."""


class ParseError(LevdiagError):
    """Malformed CSV content; carries the 1-based line and field position."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, field {col}: {message}")


class MissingValue(ParseError):
    """Empty CSV field; values are required (no imputation)."""

    def __init__(self, line: int, col: int):
        super().__init__(line, col, "missing value")
