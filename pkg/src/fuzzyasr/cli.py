"""Command-line interface: ``fuzzyasr {infer,parse,sweep,frame,tables}``.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 failed claim
check under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dataio, framing, sweep
from .fis_config import ERROR, FisParseError, paper_fis_text, parse_fis_with_issues, serialize_fis
from .fuzzy_core import DEFAULT_RESOLUTION, FuzzyError, infer

RESOLUTION_ENV = "FUZZYASR_RESOLUTION"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CLAIM = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _f4(v: float) -> str:
    return f"{v:.4f}"


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in lo:hi:step, got {text!r}") from None


def _resolution(args) -> int:
    value = args.resolution
    if value is None:
        env = os.environ.get(RESOLUTION_ENV)
        if env is None:
            return DEFAULT_RESOLUTION
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{RESOLUTION_ENV} must be an integer, got {env!r}") from None
    if value < 11 or value % 2 == 0:
        raise UsageError(f"resolution must be odd and at least 11, got {value}")
    return value


def _read_fis_text(path) -> str:
    if path is None:
        return paper_fis_text()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read FIS file {path}: {exc.strerror}") from None


def _load_fis(path):
    fis, issues = parse_fis_with_issues(_read_fis_text(path))
    if fis is None:
        raise DataError("\n".join(str(i) for i in issues if i.severity == ERROR))
    return fis


def cmd_infer(args, out):
    fis = _load_fis(args.fis)
    trace = infer(fis, [args.env, args.win, args.overlap], _resolution(args))
    print(f"accuracy={_f4(trace.crisp)}", file=out)
    print(f"fired={str(trace.fired).lower()}", file=out)
    if args.trace:
        for var, x, was_clamped, degrees in zip(fis.inputs, trace.clamped_inputs, trace.clamped, trace.degrees):
            mfs = " ".join(f"{mf.name}={_f4(d)}" for mf, d in zip(var.mfs, degrees))
            note = " (clamped)" if was_clamped else ""
            print(f"input {var.name}={_f4(x)}{note}: {mfs}", file=out)
        for i, s in enumerate(trace.rule_strengths, start=1):
            print(f"rule {i} strength={_f4(s)}", file=out)
    return EXIT_OK


def cmd_parse(args, out):
    fis, issues = parse_fis_with_issues(_read_fis_text(args.fis))
    for issue in issues:
        print(str(issue), file=sys.stderr if issue.severity == ERROR else out)
    if fis is None:
        return EXIT_DATA
    print(f"ok: {fis.name}: {len(fis.inputs)} inputs, {len(fis.outputs)} outputs, {len(fis.rules)} rules", file=out)
    if args.emit:
        out.write(serialize_fis(fis))
    return EXIT_OK


def cmd_sweep(args, out):
    fis = _load_fis(args.fis)
    axes = sweep.FINE_AXES if args.fine else sweep.COARSE_AXES
    try:
        grid = sweep.build_grid(args.env or axes["env"], args.win or axes["win"], args.overlap or axes["overlap"])
    except sweep.SweepError as exc:
        raise UsageError(str(exc)) from None
    points = sweep.evaluate_surface(fis, grid, _resolution(args), n_jobs=args.jobs)
    if args.out:
        fmt = args.format or ("json" if str(args.out).endswith(".json") else "csv")
        text = sweep.surface_to_json(points) if fmt == "json" else sweep.surface_to_csv(points)
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {args.out}: {exc.strerror}") from None
    best = sweep.argmax(points)
    threshold = args.threshold if args.threshold is not None else sweep.percentile_threshold(points)
    try:
        region = sweep.feasible_region(points, threshold)
    except sweep.EmptyRegionError as exc:
        raise DataError(str(exc)) from None
    print(f"points={len(points)}", file=out)
    print(f"argmax env={_f4(best.env)} win={_f4(best.win)} overlap={_f4(best.overlap)} "
          f"accuracy={_f4(best.accuracy)}", file=out)
    print(f"feasible threshold={_f4(region.threshold)} "
          f"env=[{_f4(region.env_range[0])}, {_f4(region.env_range[1])}] "
          f"win=[{_f4(region.win_range[0])}, {_f4(region.win_range[1])}] "
          f"overlap=[{_f4(region.overlap_range[0])}, {_f4(region.overlap_range[1])}]", file=out)
    return EXIT_OK


def cmd_frame(args, out):
    if (args.window is None) == (args.window_ms is None):
        raise UsageError("give exactly one of --window (samples) or --window-ms")
    try:
        if args.rate <= 0:
            raise framing.FramingError("--rate must be positive")
        window = args.window if args.window is not None else framing.window_size_samples(args.window_ms, args.rate)
        plan = framing.frame_plan(args.length, window, args.overlap)
        size = framing.frame_size_paper(args.length, window, args.overlap)
    except framing.FramingError as exc:
        raise UsageError(str(exc)) from None
    print(f"rate={args.rate} length={plan.length} duration_s={_f4(plan.length / args.rate)}", file=out)
    print(f"window={plan.window} window_ms={_f4(plan.window / args.rate * 1000)}", file=out)
    print(f"overlap_pct={_f4(plan.overlap_pct)} hop={plan.hop} frame_count={plan.frame_count}", file=out)
    print(f"frame_size_formula={_f4(size)}", file=out)
    return EXIT_OK


def cmd_tables(args, out):
    try:
        records = dataio.load_table_csv(args.csv) if args.csv else dataio.bundled_table(args.table)
    except (OSError, dataio.TableLoadError) as exc:
        raise DataError(f"cannot load table: {exc}") from None
    names = list(dataio.CHECKS) if args.check == "all" else [args.check]
    reports = [dataio.CHECKS[n](records) for n in names]
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], indent=1), file=out)
    else:
        for r in reports:
            print(r.to_text(), file=out)
    if args.lint:
        for w in dataio.lint_records(records):
            print(f"warning: {w}", file=sys.stderr)
    if args.strict and not all(r.passed for r in reports):
        return EXIT_CLAIM
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzyasr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_fis(p):
        p.add_argument("--fis", help="path to a .fis file (default: bundled speech accuracy system)")

    def add_resolution(p):
        p.add_argument("--resolution", type=int,
                       help=f"centroid sample count, odd and >= 11 (default {DEFAULT_RESOLUTION} "
                            f"or ${RESOLUTION_ENV})")

    p = sub.add_parser("infer", help="crisp accuracy for one parameter triple")
    add_fis(p)
    p.add_argument("--env", type=float, required=True, help="environment SNR in dB")
    p.add_argument("--win", type=float, required=True, help="Hamming window size in samples")
    p.add_argument("--overlap", type=float, required=True, help="frame overlap in percent")
    p.add_argument("--trace", action="store_true", help="also print degrees and rule strengths")
    add_resolution(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("parse", help="parse and validate a .fis file")
    add_fis(p)
    p.add_argument("--emit", action="store_true", help="print the normalized .fis text")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("sweep", help="evaluate the response surface over a grid")
    add_fis(p)
    p.add_argument("--env", type=_triple, metavar="LO:HI:STEP")
    p.add_argument("--win", type=_triple, metavar="LO:HI:STEP")
    p.add_argument("--overlap", type=_triple, metavar="LO:HI:STEP")
    p.add_argument("--fine", action="store_true", help="default to 1 dB / 1 sample / 0.5%% steps")
    p.add_argument("--out", help="write the surface to this file")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threshold", type=float,
                   help="feasibility cutoff (default: 90th percentile of the surface)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    add_resolution(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("frame", help="framing geometry for a signal")
    p.add_argument("--rate", type=int, default=8000, help="sampling rate in Hz")
    p.add_argument("--length", type=int, required=True, help="signal length in samples")
    p.add_argument("--window", type=int, help="window size in samples")
    p.add_argument("--window-ms", type=float, help="window length in milliseconds")
    p.add_argument("--overlap", type=float, required=True, help="frame overlap in percent")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("tables", help="check claims against published result tables")
    p.add_argument("--csv", help="table CSV file (default: bundled table selected by --table)")
    p.add_argument("--table", type=int, choices=range(1, 6), default=1)
    p.add_argument("--check", choices=("snr-peak", "acc-argmax", "all"), default="all")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict", action="store_true", help="exit 3 if any group fails")
    p.add_argument("--lint", action="store_true", help="warn about suspicious published cells")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"fuzzyasr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FisParseError, FuzzyError) as exc:
        print(f"fuzzyasr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
