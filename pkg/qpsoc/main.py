"""
qpsoc command line.

    graph      instance summary and plus-loop stability
    check-td   validate a tree decomposition, report width, spreads and C1-C3
    relax      hierarchy relaxation at --level, optionally written with --out
    exact      exact block formulation (refuses unless plus loops are stable and C1 holds)
    solve      solve a written model through an adapter
    oracle     brute-force global minimum
    compare    model bound against the oracle, one or more instances
    witness    the fixed separating point for the perspective inequality

Exit codes: 0 success, 1 --assert-gap failed, 2 error.
"""

import argparse
import logging
import shlex
import sys
from typing import List, Optional

from qpsoc.app.config import load_settings
from qpsoc.app.core.decomposition import STRATEGIES
from qpsoc.app.core.errors import QPSocError
from qpsoc.app.services.reports import RunReport, append_csv, render_json, render_text
from qpsoc.app.workflow.batch_manager import compare_batch
from qpsoc.app.workflow.pipeline import (
    run_check_td,
    run_exact,
    run_graph,
    run_oracle,
    run_relax,
    run_solve,
    run_witness,
)

logger = logging.getLogger("qpsoc")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--one-based", action="store_true", help="print node labels 1-based")
    common.add_argument("--csv", metavar="PATH", help="append report rows to a CSV file")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--seed", type=int, default=None, help="sampling seed")

    parser = argparse.ArgumentParser(prog="qpsoc", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", parents=[common], help="instance graph summary")
    p.add_argument("instance")

    p = sub.add_parser("check-td", parents=[common], help="check a tree decomposition")
    p.add_argument("instance")
    p.add_argument("--td", help="tree decomposition JSON (constructed when omitted)")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")

    p = sub.add_parser("relax", parents=[common], help="hierarchy relaxation")
    p.add_argument("instance")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--out", help="write model JSON here")
    p.add_argument("--samples", type=int, default=0, help="check the system on N sampled product points")

    p = sub.add_parser("exact", parents=[common], help="exact block formulation")
    p.add_argument("instance")
    p.add_argument("--td")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--out")
    p.add_argument("--fallback-level", type=int, default=None,
                   help="build this hierarchy level when the exact preconditions fail")
    p.add_argument("--samples", type=int, default=0)

    p = sub.add_parser("solve", parents=[common], help="solve a model file")
    p.add_argument("model")
    p.add_argument("--adapter", default=None)

    p = sub.add_parser("oracle", parents=[common], help="brute-force global minimum")
    p.add_argument("instance")
    p.add_argument("--grid", action="store_true", help="grid every plus-loop node")

    p = sub.add_parser("compare", parents=[common], help="bound versus oracle")
    p.add_argument("instances", nargs="+")
    p.add_argument("--mode", choices=("exact", "relax"), default="exact")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--adapter", default=None)
    p.add_argument("--td")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--fallback-level", type=int, default=None)
    p.add_argument("--assert-gap", type=float, default=None, metavar="TOL",
                   help="exit 1 unless |oracle - bound| <= TOL for every instance")

    sub.add_parser("witness", parents=[common], help="separating witness point")
    return parser


def dispatch(args, settings) -> List[RunReport]:
    if args.command == "graph":
        return [run_graph(args.instance)]
    if args.command == "check-td":
        return [run_check_td(args.instance, args.td, args.strategy, settings)]
    if args.command == "relax":
        return [run_relax(args.instance, args.level, args.out, args.samples, settings)]
    if args.command == "exact":
        return [run_exact(args.instance, args.td, args.strategy, args.out, args.fallback_level,
                          args.samples, settings)]
    if args.command == "solve":
        return [run_solve(args.model, args.adapter)]
    if args.command == "oracle":
        return [run_oracle(args.instance, settings, force_grid=args.grid)]
    if args.command == "compare":
        options = dict(
            mode=args.mode, level=args.level, adapter=args.adapter, strategy=args.strategy,
            td_path=args.td, fallback_level=args.fallback_level,
        )
        return compare_batch(args.instances, settings, **options)
    return [run_witness()]


def gap_ok(reports: List[RunReport], tol: float) -> bool:
    for report in reports:
        if report.gap is None or abs(report.gap) > tol:
            return False
    return True


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    settings = load_settings()
    if args.seed is not None:
        settings.sample_seed = args.seed

    try:
        reports = dispatch(args, settings)
    except QPSocError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    invocation = shlex.join(["qpsoc", *argv])
    for report in reports:
        report.invocation = invocation

    offset = 1 if args.one_based else 0
    for report in reports:
        report = report.relabelled(offset)
        if args.json:
            print(render_json(report))
        else:
            print(render_text(report, settings.significant_digits))
    if args.csv:
        append_csv(reports, args.csv)

    if any(r.error for r in reports):
        return 2
    if args.command == "compare" and args.assert_gap is not None:
        if not gap_ok(reports, args.assert_gap):
            print(f"gap exceeds {args.assert_gap:g}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
