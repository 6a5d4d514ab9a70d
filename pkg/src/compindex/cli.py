"""Command-line driver: validate, compute, render, synth, report.

Exit codes: 0 success, 1 validation failure, 2 input/parse/config error,
3 degenerate cells under ``--strict``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import heatmap
from .config import load_analysis_config, load_synth_params, movement_names
from .errors import (
    CompIndexError,
    ConfigError,
    MalformedRow,
    MissingColumn,
    NromIncomplete,
    UnitUndeclared,
    UnknownMetric,
    UnreachableTarget,
)
from .ingest import CsvSchemaConfig, load_dataset, write_dataset
from .model import ORIENTATIONS, Orientation, angle_key_name, validate_dataset
from .pipeline import compute_metrics, read_metric_column, write_metrics
from .synth import generate_dataset

log = logging.getLogger("compindex")

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_DEGENERATE = 0, 1, 2, 3
PARSE_ERRORS = (MalformedRow, MissingColumn, UnitUndeclared, NromIncomplete, ConfigError, UnknownMetric,
                UnreachableTarget, FileNotFoundError)
REPORT_METRICS = ("L", "A", "J", "H", "I")


def _orientations(value: str) -> list[Orientation]:
    if value == "both":
        return list(ORIENTATIONS)
    return [Orientation.parse(value)]


def _parse_scale(text: str | None):
    if not text:
        return None
    if not text.startswith("fixed:"):
        raise argparse.ArgumentTypeError("scale must look like fixed:<lo>,<hi>")
    try:
        lo, hi = (float(x) for x in text[len("fixed:"):].split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("scale must look like fixed:<lo>,<hi>") from None
    return lo, hi


def _load(args):
    cfg, paths = load_analysis_config(args.config)
    if args.workers is not None:
        from dataclasses import replace

        cfg = replace(cfg, workers=args.workers)
    schema_path = args.schema or paths.get("schema")
    schema = CsvSchemaConfig.from_file(schema_path) if schema_path else CsvSchemaConfig()
    nrom_path = args.nrom or paths.get("nrom_path")
    d = load_dataset(args.dataset, schema, nrom_path)
    return d, cfg, paths


def cmd_validate(args) -> int:
    d, _, _ = _load(args)
    report = validate_dataset(d, allow_partial=args.allow_partial)
    stream = sys.stdout if report.passed else sys.stderr
    print(report.format(), file=stream)
    print(f"{len(d.records)} records, {len(d.subjects)} subjects", file=stream)
    return EXIT_OK if report.passed else EXIT_INVALID


def _compute(args):
    d, cfg, paths = _load(args)
    report = validate_dataset(d, allow_partial=args.allow_partial)
    if not report.passed:
        print(report.format(), file=sys.stderr)
        return None, EXIT_INVALID
    out = Path(args.out)
    results = {}
    for o in _orientations(args.orientation):
        metrics = compute_metrics(d, o, cfg)
        for p in write_metrics(metrics, o, out, cfg.grid):
            log.info("wrote %s", p)
        results[o] = metrics
    degenerate = any(math.isnan(m.I) for ms in results.values() for m in ms)
    code = EXIT_DEGENERATE if (degenerate and args.strict) else EXIT_OK
    return (results, cfg, paths), code


def cmd_compute(args) -> int:
    _, code = _compute(args)
    return code


def _render_one(values, fmt: str, grid, title: str, scale, ansi: bool) -> str:
    if fmt == "svg":
        return heatmap.render_svg(values, grid, title=title, scale=scale)
    if fmt == "csv":
        return heatmap.render_csv(values, grid)
    return heatmap.render_terminal(values, grid, scale=scale, ansi=ansi)


def cmd_render(args) -> int:
    cfg, paths = load_analysis_config(args.config)
    values = read_metric_column(args.metrics_csv, args.metric)
    fmt = args.format or ("csv" if str(args.out).endswith(".csv") else "svg" if args.out else "term")
    title = args.title
    if title is None:
        names = {f"dA_{angle_key_name(k)}": v for k, v in movement_names(paths.get("movements")).items()}
        title = names.get(args.metric, args.metric)
    text = _render_one(values, fmt, cfg.grid, title, args.scale, args.ansi)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    params = load_synth_params(
        args.params, seed=args.seed, compensation_gain=args.gain, strategy_noise=args.noise,
        n_subjects=args.subjects,
    )
    d = generate_dataset(params)
    write_dataset(d, args.out)
    print(f"wrote {len(d.records)} reaches for {len(d.subjects)} subjects to {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    res, code = _compute(args)
    if res is None:
        return code
    results, cfg, _ = res
    out = Path(args.out)
    for o in results:
        for metric in REPORT_METRICS:
            values = read_metric_column(out / f"metrics_{o.value}.csv", metric)
            path = out / f"heatmap_{metric}_{o.value}.svg"
            path.write_text(
                heatmap.render_svg(values, cfg.grid, title=f"{metric} ({o.value})", scale=args.scale),
                encoding="utf-8",
            )
            log.info("wrote %s", path)
    return code


def _dataset_args(p: argparse.ArgumentParser):
    p.add_argument("dataset", help="dataset directory or single reach CSV")
    p.add_argument("--schema", help="CSV schema/adapter TOML")
    p.add_argument("--nrom", help="NROM CSV (overrides the dataset's nrom.csv)")
    p.add_argument("--config", help="pipeline config TOML (default: $COMPINDEX_CONFIG)")
    p.add_argument("--allow-partial", action="store_true", help="accept incomplete factorial coverage")
    p.add_argument("--workers", type=int, help="worker processes for per-target computation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compindex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset for coverage and sanity")
    _dataset_args(p)
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("compute", cmd_compute, "write per-target metric CSVs"),
        ("report", cmd_report, "compute, then render L, A, J, H and I heatmaps"),
    ):
        p = sub.add_parser(name, help=helptext)
        _dataset_args(p)
        p.add_argument("--orientation", default="horizontal", choices=["horizontal", "vertical", "h", "v", "both"])
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--strict", action="store_true", help="exit 3 if any target's index is unavailable")
        if name == "report":
            p.add_argument("--scale", type=_parse_scale, help="fixed:<lo>,<hi> colour scale")
        p.set_defaults(func=func)

    p = sub.add_parser("render", help="render one metric column as a heatmap")
    p.add_argument("metrics_csv")
    p.add_argument("--metric", required=True, help="column name, e.g. I, L, J_e, dA_s_z")
    p.add_argument("--out", help="output path; stdout if omitted")
    p.add_argument("--format", choices=["svg", "csv", "term"])
    p.add_argument("--scale", type=_parse_scale, help="fixed:<lo>,<hi> colour scale")
    p.add_argument("--title")
    p.add_argument("--ansi", action="store_true", help="ANSI colour shading for terminal output")
    p.add_argument("--config", help="pipeline config TOML (grid numbering)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--params", help="synth parameter TOML")
    p.add_argument("--seed", type=int)
    p.add_argument("--gain", type=float, help="compensation gain")
    p.add_argument("--noise", type=float, help="strategy noise multiplier")
    p.add_argument("--subjects", type=int)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except PARSE_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CompIndexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

