"""Command-line entry point: simulate / check / compare / suite."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .config import ScenarioConfig
from .harness import SolverFailure


def _cmd_simulate(args) -> int:
    try:
        cfg = ScenarioConfig.from_file(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        run_dir = Path(args.out)
    else:
        run_dir = harness.resolve_out_dir() / Path(args.config).stem
    try:
        result = harness.run_scenario(cfg, run_dir)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    status = "blowup" if result.blew_up else "ok"
    print(f"{status} system={cfg.system} final_time={result.final_time!r}")
    print(f"run directory: {run_dir}")
    return 0


def _cmd_check(args) -> int:
    try:
        checks = harness.check_run(args.run_dir)
    except (OSError, ValueError) as exc:
        print(f"check error: {exc}", file=sys.stderr)
        return 2
    for c in checks:
        print(c.as_text())
    return 0 if all(c.passed for c in checks) else 1


def _cmd_compare(args) -> int:
    try:
        rep = harness.compare_runs(args.run_a, args.run_b)
    except (OSError, ValueError) as exc:
        print(f"compare error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(harness.format_comparison(rep))
    return 0


def _cmd_suite(args) -> int:
    try:
        checks = harness.run_suite(args.name, args.out)
    except ValueError as exc:
        print(f"suite error: {exc}", file=sys.stderr)
        return 2
    for c in checks:
        print(c.as_text())
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusflow",
        description=(
            "Pseudospectral marches of viscous flow systems on the 3-torus "
            "with a verification harness."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured scenario")
    p_sim.add_argument("config", help="path to a key = value scenario file")
    p_sim.add_argument("--out", help="run directory (default: $TORUSFLOW_OUT/<name>)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_chk = sub.add_parser("check", help="evaluate the check battery on a run")
    p_chk.add_argument("run_dir", help="directory produced by simulate")
    p_chk.set_defaults(func=_cmd_check)

    p_cmp = sub.add_parser("compare", help="diff two runs (ledgers and finals)")
    p_cmp.add_argument("run_a")
    p_cmp.add_argument("run_b")
    p_cmp.set_defaults(func=_cmd_compare)

    p_ste = sub.add_parser("suite", help="run a named verification suite")
    p_ste.add_argument("name", help=f"one of {sorted(harness.SUITES)}")
    p_ste.add_argument("--out", help="directory for the suite report")
    p_ste.set_defaults(func=_cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
