"""Command line entry point: ``lojex {estimate,section-check,tangency,run}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .report import run_checks, shell_tables, to_csv, to_json
from .scenario import CHECK_PARAMS, CheckSpec, ScenarioError, load_scenario

SEED_ENV = "LOJEX_SEED"

# subcommand -> check types it runs; the first listed is used when the scenario has none of them
SUBCOMMAND_CHECKS = {
    "estimate": ("estimate",),
    "section-check": ("section_monotonicity", "distance_comparability"),
    "tangency": ("tangency",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lojex", description="Estimate separation exponents and run checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"scenario seed (default: ${SEED_ENV}, else the scenario's own seed)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true", help="print per-shell tables to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("estimate", "run the scenario's estimate checks"),
                        ("section-check", "run the hyperplane section checks"),
                        ("tangency", "run the tangency bound check")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--scenario", required=True, type=Path)
    p = sub.add_parser("run", parents=[common], help="run every check of a scenario")
    p.add_argument("scenario", type=Path)
    return parser


def _seed(arg: int | None) -> int | None:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"lojex: {SEED_ENV} must be an integer, got {env!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as e:
        print(f"lojex: {e}", file=sys.stderr)
        return 2
    seed = _seed(args.seed)
    if seed is not None:
        sc = sc.with_seed(seed)
    if args.command in SUBCOMMAND_CHECKS:
        wanted = SUBCOMMAND_CHECKS[args.command]
        checks = [c for c in sc.checks if c.type in wanted]
        if not checks:
            kind = wanted[0]
            if kind in ("estimate", "tangency", "section_monotonicity") and sc.Y is None:
                print(f"lojex: {args.command} needs a second set 'Y' in the scenario", file=sys.stderr)
                return 2
            checks = [CheckSpec(kind, dict(CHECK_PARAMS[kind]))]
        sc = sc.with_checks(checks)
    report = run_checks(sc)
    text = to_json(report) if args.format == "json" else to_csv(report)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.verbose:
        tables = shell_tables(report)
        if tables:
            print(tables, file=sys.stderr)
    return report["exit_status"]


if __name__ == "__main__":
    sys.exit(main())
