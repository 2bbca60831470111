"""Numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; set the environment
variable ``LEVDIAG_PURE_PYTHON=1`` to force the fallback.  The two backends
are bit-identical by construction (same accumulation order, contraction
disabled), so the choice affects speed only.
"""

from __future__ import annotations

import os

from . import pykernels

_impl = None
if not os.environ.get("LEVDIAG_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
if _impl is None:
    _impl = pykernels

BACKEND = "compiled" if _impl is not pykernels else "python"

center = _impl.center
gram = _impl.gram
cholesky_lower = _impl.cholesky_lower
invert_lower = _impl.invert_lower
lower_t_lower = _impl.lower_t_lower
row_solve_sq = _impl.row_solve_sq
row_dots = _impl.row_dots
row_quad_forms = _impl.row_quad_forms

_KERNEL_NAMES = (
    "center",
    "gram",
    "cholesky_lower",
    "invert_lower",
    "lower_t_lower",
    "row_solve_sq",
    "row_dots",
    "row_quad_forms",
)


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)


def get_backend(name: str):
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    if name == "python":
        return pykernels
    if name == "compiled":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
