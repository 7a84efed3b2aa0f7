"""Command-line entry point.

Subcommands::

    sefdm-mimo run CONFIG --out results.csv
    sefdm-mimo plot-data results.csv --metric {evm,ber,se,ee} [--out-dir DIR]
    sefdm-mimo codebook [--out codebook.csv]
    sefdm-mimo selftest

Failures exit nonzero after printing one JSON object on stderr, e.g.
``{"error": "ConfigurationError", "message": "..."}``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from ..beamforming import DEFAULT_CODEBOOK
from ..errors import ConfigurationError, SimulationError
from .config import load_config
from .selftest import run_selftest
from .sweep import METRICS, emit_plot_data, run_sweep

log = logging.getLogger("sefdm_mimo")

EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _cmd_run(args) -> int:
    spec = load_config(args.config)
    if args.workers is not None:
        spec = dataclasses.replace(spec, workers=args.workers)
    result = run_sweep(spec, args.out)
    print(json.dumps({"csv": str(result.path), "rows": result.rows, "points": len(result.reports)}))
    return 0


def _cmd_plot(args) -> int:
    files = emit_plot_data(args.csv, args.metric, args.out_dir)
    for f in files:
        print(f)
    return 0


def _cmd_codebook(args) -> int:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            DEFAULT_CODEBOOK.to_csv(fh)
    else:
        DEFAULT_CODEBOOK.to_csv(sys.stdout)
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest(sys.stdout) else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sefdm-mimo", description="Hybrid-precoded SEFDM link simulator")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a sweep described by a key=value config file")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--workers", type=int, default=None, help="threads per point (overrides config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("plot-data", help="write two-column curve files from a results CSV")
    p.add_argument("csv")
    p.add_argument("--metric", required=True, choices=sorted(METRICS))
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("codebook", help="dump the beam codebook as CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_codebook)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def _fail(exc: BaseException, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        return _fail(exc, EXIT_CONFIG)
    except (SimulationError, OSError, ValueError) as exc:
        return _fail(exc, EXIT_FAILURE)


if __name__ == "__main__":
    sys.exit(main())
