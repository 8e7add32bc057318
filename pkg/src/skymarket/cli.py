"""Command-line entry point.

Subcommands:

* ``run``      - simulate a scenario (optionally swept/audited), emit CSVs
* ``preset``   - reproduce a canned figure/table experiment by name
* ``audit``    - property probes over random market instances
* ``validate`` - check a config file, list violations

Exit codes: 0 success, 1 usage error, 2 invalid/unreadable config,
3 runtime size-guard breach. The default output directory comes from
``SKYMARKET_OUT`` (falling back to ``./results``).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .audit import AUDIT_CSV_HEADER, audit_report_row
from .baselines import MarketTooLargeError
from .mechanism import OUTCOME_CSV_HEADER, outcome_rows
from .presets import PRESETS, run_audit_suite, run_preset
from .reporting import __version__, provenance_line, write_csv
from .simulator import (
    AGGREGATE_CSV_HEADER,
    ALL_SCHEMES,
    METRICS_CSV_HEADER,
    SCHEME_OURS,
    metrics_row_tuple,
    run_experiment,
)
from .types import ScenarioConfig, load_config, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _default_out() -> str:
    return os.environ.get("SKYMARKET_OUT", "results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skymarket",
        description="Auction-based scheduling of mobile wireless chargers for UAV fleets",
    )
    parser.add_argument("--version", action="version", version=f"skymarket {__version__}")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--out", default=_default_out(), help="output directory")

    p_run = sub.add_parser("run", help="simulate a scenario and emit metrics CSVs")
    common(p_run)
    p_run.add_argument("--config", help="scenario config file (flat key=value)")
    p_run.add_argument("--scheme", choices=list(ALL_SCHEMES) + ["all"], default=SCHEME_OURS)
    p_run.add_argument("--reps", type=int, default=1, help="number of seeds to simulate")
    p_run.add_argument("--ugvs", type=int, nargs="+", help="sweep over UGV counts")
    p_run.add_argument("--tau", type=float, nargs="+", help="sweep over window lengths (s)")
    p_run.add_argument("--audit", action="store_true",
                       help="attach a full audit report to every window")
    p_run.add_argument("--outcomes", action="store_true",
                       help="also dump per-window allocations and payments")

    p_preset = sub.add_parser("preset", help="run a canned experiment")
    common(p_preset)
    p_preset.add_argument("name", help=f"one of: {', '.join(sorted(PRESETS))}")
    p_preset.add_argument("--config", help="scenario config overriding the defaults")
    p_preset.add_argument("--reps", type=int, help="override replication count")
    p_preset.add_argument("--instances", type=int, help="override instance count (audit-suite)")

    p_audit = sub.add_parser("audit", help="IR/IC/envy/stability probes on random markets")
    common(p_audit)
    p_audit.add_argument("--instances", type=int, default=1000)
    p_audit.add_argument("--max-size", type=int, default=8, help="max market side length")

    p_val = sub.add_parser("validate", help="validate a scenario config file")
    p_val.add_argument("config", help="path to the config file")

    return parser


def _load_config_arg(path: str | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    return load_config(path)


def cmd_run(args) -> int:
    try:
        config = _load_config_arg(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate(config)
    if problems:
        for p in problems:
            print(f"invalid config: {p}", file=sys.stderr)
        return EXIT_CONFIG

    schemes = ALL_SCHEMES if args.scheme == "all" else (args.scheme,)
    sweep = {}
    if args.ugvs:
        sweep["ugv_count"] = args.ugvs
    if args.tau:
        sweep["window_len"] = args.tau

    result = run_experiment(
        config, sweep, replications=args.reps, schemes=schemes,
        base_seed=args.seed, with_audit=args.audit, keep_outcomes=args.outcomes,
    )
    out = Path(args.out)
    prov = provenance_line(args.seed, config, note=f"cmd=run reps={args.reps}")
    files = [
        write_csv(out / "metrics_raw.csv", METRICS_CSV_HEADER,
                  [metrics_row_tuple(r) for r in result.rows], prov),
        write_csv(out / "metrics_aggregate.csv", AGGREGATE_CSV_HEADER,
                  [tuple(a[k] for k in AGGREGATE_CSV_HEADER) for a in result.aggregates], prov),
    ]
    if args.audit:
        files.append(write_csv(out / "audits.csv", AUDIT_CSV_HEADER,
                               [audit_report_row(r) for r in result.audits], prov))
    if args.outcomes:
        rows = [
            (scheme, seed) + tuple(r)
            for scheme, seed, outcome in result.outcomes
            for r in outcome_rows(outcome)
        ]
        files.append(write_csv(out / "outcomes.csv",
                               ("scheme", "seed") + OUTCOME_CSV_HEADER, rows, prov))
    if result.errors:
        files.append(write_csv(out / "errors.csv",
                               ("scheme", "J", "tau", "seed", "message"),
                               result.errors, prov))
        print(f"warning: {len(result.errors)} run(s) hit the enumeration guard",
              file=sys.stderr)
    for f in files:
        print(f)
    if result.errors and not result.rows:
        return EXIT_GUARD
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.name not in PRESETS:
        print(f"unknown preset {args.name!r}; available: {', '.join(sorted(PRESETS))}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _load_config_arg(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate(config)
    if problems:
        for p in problems:
            print(f"invalid config: {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        files = run_preset(args.name, config, args.seed, args.out,
                           reps=args.reps, instances=args.instances)
    except MarketTooLargeError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    for f in files:
        print(f)
    return EXIT_OK


def cmd_audit(args) -> int:
    config = ScenarioConfig()
    try:
        files = run_audit_suite(config, args.seed, Path(args.out),
                                instances=args.instances, max_size=args.max_size)
    except MarketTooLargeError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    for f in files:
        print(f)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate(config)
    if problems:
        for p in problems:
            print(p)
        return EXIT_CONFIG
    print("OK")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; remap (2 is reserved for configs)
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.command == "run":
        return cmd_run(args)
    if args.command == "preset":
        return cmd_preset(args)
    if args.command == "audit":
        return cmd_audit(args)
    if args.command == "validate":
        return cmd_validate(args)
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
