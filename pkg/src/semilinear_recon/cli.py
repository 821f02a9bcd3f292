"""Command-line entry point: ``semilinear-recon {forward,synth,invert,table,check}``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

from . import checks, nonlinearity
from .experiment import (ConfigError, invert_measurements, load_config, measure_from_config,
                         parse_pairs)
from .forward import ConvergenceError, solve_semilinear
from .grid import build_grid
from .measure import MeasurementSet
from .tables import results_to_csv, run_table

log = logging.getLogger("semilinear_recon")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def field_to_csv(u) -> str:
    """Row ``j`` holds ``u(x_i, y_j)`` for ``i = 0..n``."""
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in u.T)


def _config(args):
    return load_config(args.config, args.set or ())


def cmd_forward(args) -> int:
    cfg = _config(args)
    if not 0 <= cfg.delta <= 1:
        raise ConfigError("delta must lie in [0, 1]")
    grid = build_grid(cfg.n)
    u = solve_semilinear(grid, nonlinearity.get(cfg.f_true), cfg.delta, cfg.settings())
    _write(args.output, field_to_csv(u))
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = _config(args)
    log.info("seed %d (%s)", cfg.seed, cfg.seed_source)
    _write(args.output, measure_from_config(cfg).to_json() + "\n")
    return EXIT_OK


def cmd_invert(args) -> int:
    cfg = _config(args)
    with open(args.data) as fh:
        data = MeasurementSet.from_json(fh.read())
    report, Fhat, levels = invert_measurements(cfg, data)
    out = args.out_dir
    _write(os.path.join(out, "reconstruction.csv"), Fhat.to_csv(nonlinearity.get(cfg.f_true)))
    _write(os.path.join(out, "reconstruction.json"), json.dumps(Fhat.to_dict(), indent=1) + "\n")
    _write(os.path.join(out, "report.json"), report.to_json(timing=args.timing) + "\n")
    if args.levels:
        _write(os.path.join(out, "levels.json"),
               json.dumps([lv.to_dict() for lv in levels]) + "\n")
    if report.err is None:
        log.error("every level failed; no reconstruction")
        return EXIT_NUMERIC
    kind = "absolute" if report.err_absolute else "relative"
    log.info("%s error %.4g, unconverged levels %d", kind, report.err,
             sum(not c for c in report.converged))
    return EXIT_OK


def cmd_table(args) -> int:
    overrides = parse_pairs("\n".join(args.set or ()))
    results = run_table(args.which, args.repeats, **overrides)
    _write(args.output, results_to_csv(results))
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _config(args)
    reports = checks.run_suite(cfg.settings())
    _write(args.output, json.dumps([r.to_dict() for r in reports], indent=1) + "\n")
    failed = [r.name for r in reports if not r.passed]
    for name in failed:
        log.error("check failed: %s", name)
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semilinear-recon", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", help="key = value config file")
        sp.add_argument("-s", "--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
        sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = sub.add_parser("forward", help="solve one semilinear problem, write the field as CSV")
    common(sp)
    sp.set_defaults(func=cmd_forward)

    sp = sub.add_parser("synth", help="write a synthetic measurement set as JSON")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("invert", help="reconstruct F from a measurement file")
    common(sp)
    sp.add_argument("data", help="measurement JSON written by 'synth'")
    sp.add_argument("-d", "--out-dir", default=".", help="directory for result files")
    sp.add_argument("--levels", action="store_true", help="also write per-level fields")
    sp.add_argument("--timing", action="store_true", help="include wall-clock time in report.json")
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("table", help="reproduce a published parameter table")
    sp.add_argument("which", type=int, choices=(1, 2, 3))
    sp.add_argument("-r", "--repeats", type=int, default=1, help="seeds per row (median reported)")
    sp.add_argument("-s", "--set", action="append", metavar="KEY=VALUE",
                    help="override a non-table key, e.g. max_outer=1000")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("check", help="run the theorem-backed check suite")
    common(sp)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"semilinear-recon: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"semilinear-recon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
