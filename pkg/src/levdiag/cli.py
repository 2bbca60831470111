"""Command-line interface.

Subcommands:
  analyze   run the diagnostics pipeline on a CSV and emit a report
  synth     generate a scenario dataset to CSV from a config file
  verify    run the oracle cross-checks only and report max deviations

Exit codes for ``analyze``: 0 when no row is flagged, 2 when at least one
row exceeds the leverage threshold (for pipeline gating), 1 on any error.
``synth`` and ``verify`` use 0 for success and 1 for errors (``verify``
also exits 1 when a deviation exceeds its tolerance).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .auxreg import PermutedFactors
from .errors import LevdiagError, NotPositiveDefinite
from .linalg import center
from .report import (
    VERIFY_TOLERANCES,
    RunConfig,
    compute_oracle_deviations,
    emit,
    ingest_csv,
    run_diagnostics,
    write_csv,
)
from .synthetic import (
    LeverageSweep,
    dataset_at,
    generate,
    parse_scenario,
    provenance,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for
    # "rows flagged", so route usage errors through the normal error path.
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levdiag", description="regression leverage diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="compute leverages and attribute them to their sources"
    )
    analyze.add_argument("--input", required=True, help="input CSV path")
    analyze.add_argument(
        "--response", default=None, help="response column name (excluded from X)"
    )
    analyze.add_argument(
        "--threshold", type=float, default=None,
        help="high-leverage cutoff (default 2(p+1)/n)",
    )
    analyze.add_argument(
        "--decompose", choices=("I", "II", "both"), default="both",
        help="which attributions to include",
    )
    analyze.add_argument("--format", choices=("text", "json"), default="text")
    analyze.add_argument(
        "--top-k", type=int, default=10, help="rows shown in text mode"
    )
    analyze.add_argument(
        "--verify", action="store_true",
        help="also run the oracle cross-checks and report max deviations",
    )
    analyze.add_argument("--output", default=None, help="write to file instead of stdout")
    analyze.set_defaults(func=_cmd_analyze)

    synth = sub.add_parser("synth", help="generate a scenario dataset as CSV")
    synth.add_argument(
        "--seedfile", required=True,
        help="scenario config: plain 'key = value' lines",
    )
    synth.add_argument("--output", default=None, help="CSV path (default stdout)")
    synth.set_defaults(func=_cmd_synth)

    verify = sub.add_parser(
        "verify", help="run only the oracle cross-checks on a CSV"
    )
    verify.add_argument("--input", required=True, help="input CSV path")
    verify.add_argument("--response", default=None, help="response column name")
    verify.set_defaults(func=_cmd_verify)
    return parser


def _write_out(payload: bytes, path: str | None) -> None:
    if path is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(payload)


def _collinear_partners(path: str, response: str | None, pivot: int) -> str:
    """Name the failing column and any (near-)duplicate partner columns."""
    try:
        data, _ = ingest_csv(path, response)
        cen = center(data)
        name = data.column_names[pivot]
        partners = []
        x = cen.tilde_x
        for j in range(data.p):
            if j == pivot:
                continue
            denom = float(cen.std[j]) * float(cen.std[pivot]) * data.n
            if denom == 0.0:
                continue
            corr = float(x[:, j] @ x[:, pivot]) / denom
            if abs(corr) >= 1.0 - 1e-9:
                partners.append(data.column_names[j])
        if partners:
            return (
                f"column {name!r} is exactly collinear with "
                f"column(s) {', '.join(repr(q) for q in partners)}"
            )
        return f"column {name!r} is collinear with the remaining columns"
    except LevdiagError:
        return f"column {pivot} is collinear"


def _cmd_analyze(args) -> int:
    decompose = ("I", "II") if args.decompose == "both" else (args.decompose,)
    try:
        config = RunConfig(
            input_path=args.input,
            response_column=args.response,
            threshold=args.threshold,
            decompositions=decompose,
            output_format=args.format,
            verify=args.verify,
            top_k=args.top_k,
        )
    except ValueError as exc:
        print(f"levdiag: error: {exc}", file=sys.stderr)
        return 1
    try:
        report = run_diagnostics(config)
    except NotPositiveDefinite as exc:
        detail = _collinear_partners(args.input, args.response, exc.pivot_index)
        print(f"levdiag: error: {exc}; {detail}", file=sys.stderr)
        return 1
    _write_out(emit(report, config.output_format, config.top_k), args.output)
    return 2 if report.flagged_count > 0 else 0


def _cmd_synth(args) -> int:
    with open(args.seedfile, "r", encoding="utf-8") as fh:
        spec = parse_scenario(fh.read())
    if isinstance(spec.plant, LeverageSweep):
        # A CSV holds a single matrix: emit the dataset at the final t.
        base = generate(replace(spec, plant=None))
        data = dataset_at(
            base,
            spec.plant.row,
            np.asarray(spec.plant.direction, dtype=np.float64),
            spec.plant.t_values[-1],
        )
    else:
        data = generate(spec)
    _write_out(write_csv(data).encode("utf-8"), args.output)
    print(json.dumps(provenance(spec)), file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    data, _ = ingest_csv(args.input, args.response)
    cen = center(data)
    factors = PermutedFactors(cen)
    deviations = compute_oracle_deviations(data, cen, factors)
    all_ok = True
    for key, value in deviations.items():
        tol = VERIFY_TOLERANCES[key]
        ok = value <= tol
        all_ok = all_ok and ok
        print(f"{key:<32} {value:.3e}  (tol {tol:.0e})  {'ok' if ok else 'FAIL'}")
    print("overall:", "ok" if all_ok else "FAIL")
    return 0 if all_ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"levdiag: usage error: {exc}", file=sys.stderr)
        return 1
    except LevdiagError as exc:
        print(f"levdiag: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"levdiag: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"levdiag: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
