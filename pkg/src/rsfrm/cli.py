"""Command-line entry point: ``rsfrm synth | run | compare``.

Exit status is 0 on success, 1 when any experiment cell failed and 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .dataio import generate_synthetic, write_synthetic_csv
from .exceptions import ConfigError, LabelMismatch, ParseError, RSFRMError
from .harness import compare_variants, emit_report, load_config, load_report, run_experiment

EXIT_OK, EXIT_FAILED_CELL, EXIT_USAGE = 0, 1, 2


def _cmd_synth(args) -> int:
    if args.count < 1:
        print("error: --count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    write_synthetic_csv(generate_synthetic(args.count, args.seed), args.out)
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        report = run_experiment(config)
    except (ConfigError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit_report(report, args.out)
    for v in report.variants:
        te = v.test
        status = "FAILED" if v.failed else f"test {te.mean:.6g} +/- {te.std:.3g}"
        print(f"{v.spec.label}: {status}")
    if report.best_label is not None:
        print(f"best: {report.best_label}")
    if not report.ok:
        print(f"{len(report.failed_cells)} cell(s) failed", file=sys.stderr)
        return EXIT_FAILED_CELL
    return EXIT_OK


def _cmd_compare(args) -> int:
    try:
        reports = [load_report(p) for p in args.reports]
        result = compare_variants(reports, args.control, args.alpha, args.critical_value)
    except (LabelMismatch, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RSFRMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED_CELL
    text = result.to_csv()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_suffix(".json").write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    sys.stdout.write(text)
    fr = result.friedman
    if fr is not None:
        print(f"# friedman chi2={fr.chi_squared:.4f} F_F={fr.f_statistic:.4f} df=({fr.df1}, {fr.df2})"
              + ("" if result.rejects_null is None else f" rejects_null={str(result.rejects_null).lower()}"))
    print(f"# bonferroni-dunn CD={result.cd:.4f} (alpha={result.alpha})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsfrm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write the two-variable benchmark sample as CSV")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="run a cross-validated experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="Friedman / Bonferroni-Dunn comparison across reports")
    p.add_argument("--reports", nargs="+", required=True, help="report directories or report.json files")
    p.add_argument("--control", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--critical-value", type=float, default=None,
                   help="critical value of F(df1, df2) at alpha")
    p.add_argument("--out", help="also write the comparison CSV (and a .json sibling) here")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
