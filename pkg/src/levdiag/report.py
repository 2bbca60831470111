"""CSV ingestion, diagnostics pipeline, and report rendering.

The JSON document has exactly three top-level keys: ``meta``,
``regressors`` and ``rows``.  Numbers are serialized with 17 significant
digits so that parsing the output reproduces every value bit-exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .auxreg import PermutedFactors, aux_regression, multiple_correlation
from .decomposition import (
    decomposition_one_components,
    decomposition_two_all,
    inverse_cov_via_permutations,
    partitioned_inverse,
)
from .errors import (
    DuplicateHeader,
    LevdiagError,
    MissingValue,
    ParseError,
    UnknownColumn,
)
from .leverage import (
    default_threshold,
    hat_diagonal_oracle,
    leverage_all,
    mahalanobis_sq_all,
)
from .linalg import CenteredData, DataMatrix, center, direct_inverse

CONDITION_WARN_LIMIT = 1e12

_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


@dataclass
class RunConfig:
    """Configuration of one diagnostics run (CLI flags map 1:1)."""

    input_path: str
    response_column: str | None = None
    threshold: float | None = None
    decompositions: tuple[str, ...] = ("I", "II")
    output_format: str = "text"
    verify: bool = False
    top_k: int = 10

    def __post_init__(self):
        if self.threshold is not None and not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        if self.output_format not in ("text", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        bad = set(self.decompositions) - {"I", "II"}
        if bad:
            raise ValueError(f"unknown decompositions {sorted(bad)}")


@dataclass
class DiagnosticsReport:
    meta: dict
    regressors: list[dict]
    rows: list[dict]

    @property
    def flagged_count(self) -> int:
        return self.meta["flagged_rows"]

    def to_dict(self) -> dict:
        return {"meta": self.meta, "regressors": self.regressors, "rows": self.rows}


def ingest_csv(
    path: str, response_column: str | None = None
) -> tuple[DataMatrix, np.ndarray | None]:
    """Strict CSV reader: mandatory header, comma-separated finite numbers.

    Returns the regressor matrix and, when ``response_column`` names one of
    the headers, that column as a separate vector (excluded from the
    regressors, echoed in reports).
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, 1, "missing header line")
    header = [name.strip() for name in lines[0].split(",")]
    for idx, name in enumerate(header, start=1):
        if not name:
            raise ParseError(1, idx, "empty column name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DuplicateHeader(f"duplicate column name(s): {', '.join(dupes)}")

    resp_idx: int | None = None
    if response_column is not None:
        if response_column not in header:
            raise UnknownColumn(f"response column {response_column!r} not in header")
        resp_idx = header.index(response_column)
        if len(header) < 2:
            raise ParseError(1, 1, "no regressor columns besides the response")

    width = len(header)
    rows: list[list[float]] = []
    response: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if lineno == len(lines) and not line:
            continue
        if not line.strip():
            raise ParseError(lineno, 1, "blank line")
        fields = line.split(",")
        if len(fields) != width:
            raise ParseError(
                lineno, min(len(fields), width), f"expected {width} fields, got {len(fields)}"
            )
        parsed: list[float] = []
        for col, raw in enumerate(fields, start=1):
            token = raw.strip()
            if not token:
                raise MissingValue(lineno, col)
            if not _NUMBER_RE.match(token):
                raise ParseError(lineno, col, f"not a finite number: {token!r}")
            parsed.append(float(token))
        if resp_idx is not None:
            response.append(parsed.pop(resp_idx))
        rows.append(parsed)

    if len(rows) < 2:
        raise ParseError(len(lines), 1, "need at least two data rows")
    names = tuple(h for i, h in enumerate(header) if i != resp_idx)
    data = DataMatrix(np.array(rows, dtype=np.float64), names)
    resp = np.array(response, dtype=np.float64) if resp_idx is not None else None
    return data, resp


def write_csv(data: DataMatrix, response: np.ndarray | None = None,
              response_name: str = "y") -> str:
    """Render a DataMatrix back to strict CSV (shortest round-trip floats)."""
    names = list(data.column_names)
    cols = [data.values[:, j] for j in range(data.p)]
    if response is not None:
        names.append(response_name)
        cols.append(np.asarray(response, dtype=np.float64))
    lines = [",".join(names)]
    for r in range(data.n):
        lines.append(",".join(repr(float(col[r])) for col in cols))
    return "\n".join(lines) + "\n"


def _condition_estimate(s: np.ndarray, s_inv: np.ndarray) -> float:
    """1-norm condition number from the explicit inverse."""
    return float(np.abs(s).sum(axis=0).max() * np.abs(s_inv).sum(axis=0).max())


def _rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    """Max |a - b| relative to scale, with an absolute floor of 1."""
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    if a.size == 0:
        return 0.0
    return float((np.abs(a - b) / denom).max())


VERIFY_TOLERANCES = {
    "hat_diagonal_max_abs": 1e-10,
    "leverage_sum_abs": 1e-9,
    "attribution_sum_rel": 1e-9,
    "removal_split_sum_rel": 1e-9,
    "removal_subset_recompute_rel": 1e-8,
    "correlation_identity_rel": 1e-10,
    "inverse_by_columns_rel": 1e-8,
    "inverse_by_blocks_rel": 1e-8,
    "aux_coefficients_rel": 1e-8,
    "aux_sse_rel": 1e-9,
}


def compute_oracle_deviations(
    data: DataMatrix, cen: CenteredData, factors: PermutedFactors
) -> dict[str, float]:
    """Max deviations between the production paths and independent oracles."""
    n, p = cen.n, cen.p
    base = factors.base
    d2 = mahalanobis_sq_all(cen, base)
    lev = (1.0 + d2) / n

    hat = hat_diagonal_oracle(data)
    out = {"hat_diagonal_max_abs": float(np.abs(lev - hat).max())}
    out["leverage_sum_abs"] = abs(float(lev.sum()) - (p + 1))

    _, _, _, terms = decomposition_one_components(cen, factors)
    out["attribution_sum_rel"] = _rel_dev(terms.sum(axis=1), d2)

    split_dev = 0.0
    subset_dev = 0.0
    for j in range(p):
        subset, residual_sq = decomposition_two_all(cen, j, factors)
        split_dev = max(split_dev, _rel_dev(subset + residual_sq, d2))
        if p >= 2:
            keep = [k for k in range(p) if k != j]
            sub_data = DataMatrix(
                data.values[:, keep], tuple(data.column_names[k] for k in keep)
            )
            sub_cen = center(sub_data)
            sub_pair = PermutedFactors(sub_cen).base
            oracle = mahalanobis_sq_all(sub_cen, sub_pair)
        else:
            oracle = np.zeros(n)
        subset_dev = max(subset_dev, _rel_dev(subset, oracle))
    out["removal_split_sum_rel"] = split_dev
    out["removal_subset_recompute_rel"] = subset_dev

    corr_dev = 0.0
    if p >= 2:
        for i in range(p):
            lhs = 1.0 - multiple_correlation(cen, i, factors)
            bpp = factors.pair(i).b_pp
            s_i = float(cen.std[i])
            rhs = 1.0 / (s_i * s_i * bpp * bpp)
            corr_dev = max(corr_dev, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    out["correlation_identity_rel"] = corr_dev

    s = factors.covariance_matrix
    s_inv = direct_inverse(s)
    out["inverse_by_columns_rel"] = _rel_dev(inverse_cov_via_permutations(cen, factors), s_inv)
    out["inverse_by_blocks_rel"] = (
        _rel_dev(partitioned_inverse(cen, factors), s_inv) if p >= 2 else 0.0
    )

    coeff_dev = 0.0
    sse_dev = 0.0
    if p >= 2:
        g = kernels.gram(cen.tilde_x)
        for i in range(p):
            fit = aux_regression(cen, i, factors)
            keep = list(fit.others)
            beta = np.linalg.solve(g[np.ix_(keep, keep)], g[keep, i])
            coeff_dev = max(coeff_dev, _rel_dev(fit.coefficients, beta))
            resid = cen.tilde_x[:, i] - cen.tilde_x[:, keep] @ beta
            coeff_dev = max(coeff_dev, _rel_dev(fit.residuals, resid))
            sse_dev = max(
                sse_dev, _rel_dev(np.array([float(fit.residuals @ fit.residuals)]),
                                  np.array([fit.sse]))
            )
    out["aux_coefficients_rel"] = coeff_dev
    out["aux_sse_rel"] = sse_dev
    return out


def run_diagnostics(config: RunConfig) -> DiagnosticsReport:
    """Full pipeline: ingest, factor, attribute, assemble the report."""
    data, response = ingest_csv(config.input_path, config.response_column)
    cen = center(data)
    factors = PermutedFactors(cen)
    base = factors.base
    n, p = data.n, data.p
    threshold = (
        default_threshold(n, p) if config.threshold is None else config.threshold
    )
    records = leverage_all(cen, base, threshold)

    r_sqs = [multiple_correlation(cen, i, factors) for i in range(p)]
    infl, u, z, terms = decomposition_one_components(cen, factors)

    want_one = "I" in config.decompositions
    want_two = "II" in config.decompositions
    if want_two:
        splits = [decomposition_two_all(cen, j, factors) for j in range(p)]

    s = factors.covariance_matrix
    s_inv = direct_inverse(s)
    cond = _condition_estimate(s, s_inv)

    names = data.column_names
    regressors = [
        {
            "name": names[i],
            "index": i,
            "mean": float(cen.mean[i]),
            "std": float(cen.std[i]),
            "r_sq": r_sqs[i],
            "inflation": float(infl[i]),
        }
        for i in range(p)
    ]

    rows = []
    for rec in records:
        r = rec.row_index
        row: dict = {
            "index": r,
            "leverage": rec.leverage,
            "mahalanobis_sq": rec.mahalanobis_sq,
            "flagged": rec.flagged,
        }
        if response is not None:
            row["response"] = float(response[r])
        if want_one:
            d2 = rec.mahalanobis_sq
            row["decomposition_one"] = [
                {
                    "regressor": names[i],
                    "index": i,
                    "inflation": float(infl[i]),
                    "aux_residual": float(u[r, i]),
                    "marginal_z": float(z[r, i]),
                    "term": float(terms[r, i]),
                    "share": abs(float(terms[r, i])) / d2 if d2 > 0 else 0.0,
                }
                for i in range(p)
            ]
        if want_two:
            row["decomposition_two"] = [
                {
                    "removed": names[j],
                    "index": j,
                    "subset_dist_sq": float(splits[j][0][r]),
                    "residual_sq": float(splits[j][1][r]),
                    "leverage_drop": float(splits[j][1][r]) / n,
                }
                for j in range(p)
            ]
        rows.append(row)

    meta = {
        "n": n,
        "p": p,
        "column_names": list(names),
        "response_column": config.response_column,
        "threshold": threshold,
        "threshold_is_default": config.threshold is None,
        "decompositions": [d for d in ("I", "II") if d in config.decompositions],
        "flagged_rows": sum(1 for rec in records if rec.flagged),
        "condition_estimate": cond,
        "condition_warning": bool(cond > CONDITION_WARN_LIMIT),
        "row_indexing": "0-based",
    }
    if config.verify:
        meta["verification"] = compute_oracle_deviations(data, cen, factors)
    return DiagnosticsReport(meta, regressors, rows)


# --- serialization ---


def _format_float(x: float) -> str:
    if isinstance(x, bool) or not np.isfinite(x):
        raise ValueError(f"non-finite number in report: {x!r}")
    return format(float(x), ".17g")


def _write_json(value, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, val) in enumerate(value.items()):
            out.append(f'{pad}  "{key}": ')
            _write_json(val, out, indent + 1)
            out.append(",\n" if k < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for k, val in enumerate(value):
            out.append(pad + "  ")
            _write_json(val, out, indent + 1)
            out.append(",\n" if k < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif value is None:
        out.append("null")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_format_float(float(value)))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value)!r}")


def emit_json(report: DiagnosticsReport) -> bytes:
    out: list[str] = []
    _write_json(report.to_dict(), out, 0)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _fmt(x: float) -> str:
    return format(x, ".6g")


def emit_text(report: DiagnosticsReport, top_k: int = 10) -> bytes:
    meta = report.meta
    lines = []
    lines.append("leverage diagnostics")
    lines.append("====================")
    resp = meta["response_column"]
    lines.append(
        f"rows: {meta['n']}    regressors: {meta['p']}"
        + (f"    response column: {resp}" if resp else "")
    )
    default_note = " (default 2(p+1)/n)" if meta["threshold_is_default"] else ""
    lines.append(f"leverage threshold: {_fmt(meta['threshold'])}{default_note}")
    lines.append(f"flagged rows: {meta['flagged_rows']} of {meta['n']}")
    if meta["condition_warning"]:
        lines.append(
            f"WARNING: covariance condition estimate {_fmt(meta['condition_estimate'])} "
            "exceeds 1e12; attributions may be inaccurate"
        )
    lines.append("note: rows are 1-based below; JSON output uses 0-based indices")
    lines.append("")

    lines.append("regressors")
    lines.append(f"  {'name':<16} {'r_sq':>12} {'inflation':>12}")
    for reg in report.regressors:
        lines.append(
            f"  {reg['name']:<16} {_fmt(reg['r_sq']):>12} {_fmt(reg['inflation']):>12}"
        )
    lines.append("")

    if meta["flagged_rows"] == 0:
        lines.append("no rows exceed the leverage threshold")

    order = sorted(report.rows, key=lambda row: (-row["leverage"], row["index"]))
    shown = order[:top_k]
    lines.append(f"rows by leverage (top {len(shown)} of {meta['n']})")
    for row in shown:
        flag = "  FLAGGED" if row["flagged"] else ""
        resp_note = (
            f"  response {_fmt(row['response'])}" if "response" in row else ""
        )
        lines.append(
            f"  row {row['index'] + 1}  leverage {_fmt(row['leverage'])}  "
            f"D^2 {_fmt(row['mahalanobis_sq'])}{flag}{resp_note}"
        )
        if "decomposition_one" in row:
            lines.append("    attribution by regressor (terms sum to D^2)")
            lines.append(
                f"      {'regressor':<16} {'inflation':>11} {'aux_residual':>13} "
                f"{'marginal_z':>11} {'term':>11} {'share':>7}"
            )
            for t in row["decomposition_one"]:
                lines.append(
                    f"      {t['regressor']:<16} {_fmt(t['inflation']):>11} "
                    f"{_fmt(t['aux_residual']):>13} {_fmt(t['marginal_z']):>11} "
                    f"{_fmt(t['term']):>11} {_fmt(t['share']):>7}"
                )
        if "decomposition_two" in row:
            lines.append("    leverage change if one regressor is removed")
            lines.append(
                f"      {'removed':<16} {'subset_D^2':>11} {'residual_sq':>12} "
                f"{'leverage_drop':>14}"
            )
            for t in row["decomposition_two"]:
                lines.append(
                    f"      {t['removed']:<16} {_fmt(t['subset_dist_sq']):>11} "
                    f"{_fmt(t['residual_sq']):>12} {_fmt(t['leverage_drop']):>14}"
                )
    if "verification" in meta:
        lines.append("")
        lines.append("verification (max deviation vs oracle, tolerance)")
        for key, value in meta["verification"].items():
            tol = VERIFY_TOLERANCES[key]
            ok = "ok" if value <= tol else "FAIL"
            lines.append(f"  {key:<32} {value:.3e}  (tol {tol:.0e})  {ok}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def emit(report: DiagnosticsReport, output_format: str, top_k: int = 10) -> bytes:
    if output_format == "json":
        return emit_json(report)
    if output_format == "text":
        return emit_text(report, top_k)
    raise ValueError(f"unknown output format {output_format!r}")
