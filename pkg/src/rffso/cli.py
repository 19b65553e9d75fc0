"""Command-line front end.

    rffso analyze  --config scenario.ini --out rows.csv
    rffso simulate --config scenario.ini --samples 200000 --seed 7
    rffso sweep    --config scenario.ini --scheme tase
    rffso validate [--seed 3] [--only 1,2,7] [--out report.json]

Exit codes: 0 ok, 1 configuration error, 2 numerical failure,
3 at least one acceptance criterion failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ALL_SCHEMES, default_config, load_config
from .errors import ConfigError, NumericalFailure
from .sweep import SweepFailure, rows_to_csv, run_sweep
from .validation import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 1, 2, 3


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _schemes(text):
    t = text.strip().upper()
    if t == "ALL":
        return ALL_SCHEMES
    if t not in ALL_SCHEMES:
        raise argparse.ArgumentTypeError(f"unknown scheme {text!r}")
    return (t,)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rffso", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("analyze", "closed-form SOP, exact SOP and EST"),
                        ("simulate", "Monte-Carlo estimates only"),
                        ("sweep", "closed forms and Monte Carlo side by side"),
                        ("validate", "run the acceptance checks")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="scenario file (defaults when omitted)")
        sp.add_argument("--out", help="output path (stdout when omitted)")
        sp.add_argument("--seed", type=_u64)
        if name != "validate":
            sp.add_argument("--samples", type=int)
            sp.add_argument("--scheme", type=_schemes, help="otas, tasr, tase, atas or all")
            sp.add_argument("--workers", type=int)
        else:
            sp.add_argument("--only", help="comma-separated criterion numbers")
            sp.add_argument("--fixtures", help="alternative Meijer-G fixture file")
    return p


def _config(args):
    cfg = load_config(args.config) if args.config else default_config()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        over["mc_samples"] = args.samples
    if getattr(args, "workers", None) is not None:
        over["workers"] = args.workers
    if getattr(args, "scheme", None):
        over["schemes"] = ",".join(args.scheme)
    return cfg.with_values(**over) if over else cfg


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _validate(args, cfg):
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",") if x.strip()}
        except ValueError:
            raise ConfigError(f"--only expects comma-separated integers, got {args.only!r}",
                              "only") from None
    results = run_validation(cfg.seed, only, args.fixtures)
    for r in results:
        print(r.line())
    if args.out:
        report = [{"criterion": r.number, "name": r.name, "passed": r.ok,
                   "seconds": r.seconds, "budget_seconds": r.budget,
                   "details": {k: (v if isinstance(v, (int, float, str, bool, list)) else str(v))
                               for k, v in r.details.items()}}
                  for r in results]
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "validate":
            return _validate(args, cfg)
        closed = args.command in ("analyze", "sweep")
        simulate = args.command in ("simulate", "sweep")
        rows = run_sweep(cfg, closed=closed, simulate=simulate)
        _emit(rows_to_csv(rows), args.out)
        return EXIT_OK
    except ConfigError as exc:
        where = f" (line {exc.line})" if getattr(exc, "line", None) else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SweepFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
