"""Command-line entry point.

Exit codes: 0 on success, 1 on input or validation errors (including
usage errors), 2 on unexpected internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import metrics as M
from . import properties as P
from .errors import McvError
from .moments import Convention, DataSet, MomentSummary, estimate_moments, read_csv
from .sims import DEFAULT_METRICS, Experiment, ExperimentConfig, run_experiment
from .whitening import WhiteningKind, apply_whitening, whiten

log = logging.getLogger("mcvgini")

DEFAULT_COMPUTE = ("gamma_vn", "gamma_r", "gamma_vv", "gamma_az", "g2")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def load_input(path: str) -> DataSet | MomentSummary:
    """CSV observations, or a moment-summary JSON file (``.json``)."""
    p = Path(path)
    if not p.exists():
        raise McvError(f"{path}: no such file")
    if p.suffix.lower() == ".json":
        try:
            return MomentSummary.from_json(p.read_text())
        except json.JSONDecodeError as exc:
            raise McvError(f"{path}: invalid JSON ({exc})") from None
    return read_csv(p)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in header]] + [[f"{c:.10g}" if isinstance(c, float) else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(c) if isinstance(c, float) else c for c in r])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def cmd_compute(args) -> int:
    source = load_input(args.input)
    metric_ids = args.metrics or list(DEFAULT_COMPUTE)
    reports = []
    for mid in metric_ids:
        if mid == "gq":
            for q in args.q or [2.0]:
                reports.append(M.compute_metric("gq", source, args.convention, q))
        elif mid == "gini":
            if not isinstance(source, DataSet) or source.n != 1:
                raise McvError("gini needs a single-column CSV")
            reports.append(M.gini_univariate(source.values[:, 0]))
        else:
            reports.append(M.compute_metric(mid, source, args.convention))
    header = ["metric_id", "value", "n", "convention", "q"]
    rows = [[r.metric_id, r.value, r.n, r.convention, "" if r.q is None else r.q] for r in reports]
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=1)
    elif args.format == "csv":
        text = _csv_text(header, rows)
    else:
        text = _table(header, rows)
    _emit(text, args.output)
    return 0


def cmd_whiten(args) -> int:
    source = load_input(args.input)
    ms = source if isinstance(source, MomentSummary) else estimate_moments(source, args.convention)
    W = whiten(ms, args.kind)
    whitened = apply_whitening(W, source) if isinstance(source, DataSet) else None
    if args.format == "json" or whitened is None:
        d = {"kind": W.kind.value, "matrix": W.matrix.tolist(), "whitened_mean": W.whitened_mean().tolist()}
        if whitened is not None:
            d["columns"] = list(whitened.column_names)
            d["whitened"] = whitened.values.tolist()
        text = json.dumps(d, indent=1)
    elif args.format == "csv":
        text = _csv_text(whitened.column_names, [[float(x) for x in row] for row in whitened.values])
    else:
        text = _table(whitened.column_names, [[float(x) for x in row] for row in whitened.values])
    _emit(text, args.output)
    return 0


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("MCV_DEFAULT_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise McvError(f"MCV_DEFAULT_SEED must be an integer, got {env!r}") from None
    return P.DEFAULT_SEED


def cmd_verify(args) -> int:
    seed = _resolve_seed(args.seed)
    metric_ids = P.MATRIX_METRICS if args.all or not args.metrics else tuple(args.metrics)
    matrix = P.verdict_matrix(seed, metric_ids)
    suite = P.counterexample_suite() if args.all else []
    golden = P.golden_values() if args.all else []
    mismatches = P.matrix_mismatches(matrix) + P.matrix_mismatches(suite)
    if args.format == "json":
        text = json.dumps({
            "seed": seed,
            "matrix": [v.to_dict() for v in matrix],
            "counterexamples": [v.to_dict() for v in suite],
            "golden_values": [{"label": a, "computed": b, "exact": c} for a, b, c in golden],
            "mismatches": len(mismatches),
        }, indent=1)
    else:
        lines = [P.format_table(matrix), ""]
        if golden:
            lines.append(_table(["instance", "computed", "exact"], golden))
            lines.append("")
        lines.append(f"seed: {seed}")
        lines.append(f"mismatches: {len(mismatches)}")
        for v in mismatches:
            lines.append(f"  {v.metric_id} {v.property_id}: got {v.verdict.value}, expected {v.expected.value}")
        text = "\n".join(lines)
    _emit(text, args.output)
    return 0


def cmd_simulate(args) -> int:
    seed = args.seed
    if seed is None:
        raise McvError("simulate needs --seed")
    config = ExperimentConfig(
        args.experiment,
        seed,
        tuple(args.dims or ()),
        args.samples or 0,
        tuple(args.metrics or DEFAULT_METRICS),
        nested_means=args.nested_means,
        include_start=args.include_start,
    )
    result = run_experiment(config)
    if args.format == "json":
        text = result.to_json()
    elif args.format == "csv":
        text = result.to_csv()
    else:
        text = _table(["x_value", "metric_id", "value"], result.rows)
    _emit(text, args.output)
    return 0


def cmd_influence(args) -> int:
    source = load_input(args.input)
    if not isinstance(source, DataSet):
        raise McvError("influence needs observations (CSV input)")
    ms = estimate_moments(source, Convention.POPULATION)
    points = [np.asarray(args.point, dtype=float)] if args.point else [ms.mean.copy()]
    rows = []
    for x in points:
        formula = M.influence_g2(x, ms)
        fd = M.influence_fd(x, source, args.eps)
        rows.append({"x": x.tolist(), "formula": formula, "fd_eps": fd.estimate, "fd_half_eps": fd.half_eps_estimate,
                     "eps": fd.eps, "fd_relative_change": fd.relative_change})
    if args.format == "json":
        text = json.dumps(rows, indent=1)
    else:
        header = ["x", "formula", "fd_eps", "fd_half_eps", "fd_relative_change"]
        body = [[" ".join(f"{v:.6g}" for v in r["x"]), r["formula"], r["fd_eps"], r["fd_half_eps"],
                 r["fd_relative_change"]] for r in rows]
        text = _csv_text(header, body) if args.format == "csv" else _table(header, body)
    _emit(text, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcvgini", description="Multivariate coefficients of variation and Gini indices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv", "table"), default="json"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--output", help="write here instead of stdout")

    p = sub.add_parser("compute", help="evaluate metrics on a CSV or moment-summary JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--metrics", type=_csv_list, help="comma-separated metric ids")
    p.add_argument("--q", type=_float_list, help="q values for gq (each >= 1)")
    p.add_argument("--convention", choices=["population", "unbiased"], default="population")
    common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("whiten", help="ZCA-cor or Cholesky whitening")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=[k.value for k in WhiteningKind], default="zca_cor")
    p.add_argument("--convention", choices=["population", "unbiased"], default="population")
    common(p, default="csv")
    p.set_defaults(func=cmd_whiten)

    p = sub.add_parser("verify", help="property verdict matrix and counterexamples")
    p.add_argument("--all", action="store_true", help="full matrix plus the counterexample registry")
    p.add_argument("--metrics", type=_csv_list)
    p.add_argument("--seed", type=int)
    common(p, formats=("json", "table"), default="table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Gaussian or Galton simulation study")
    p.add_argument("--experiment", choices=[e.value for e in Experiment], required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--dims", type=_int_list, help="dimensions or horizons")
    p.add_argument("--samples", type=int, help="points (Gaussian) or particles (Galton)")
    p.add_argument("--metrics", type=_csv_list)
    p.add_argument("--nested-means", action="store_true")
    p.add_argument("--include-start", action="store_true")
    common(p, default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("influence", help="G_2 influence function: formula vs finite differences")
    p.add_argument("--input", required=True)
    p.add_argument("--point", type=_float_list, help="contamination point (default: sample mean)")
    p.add_argument("--eps", type=float, default=1e-4)
    common(p, default="table")
    p.set_defaults(func=cmd_influence)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "q", None) and any(q < 1.0 for q in args.q):
        parser.error("q values must be >= 1")
    try:
        return args.func(args)
    except McvError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        sys.stderr.write(f"internal error: {exc!r}\n")
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
