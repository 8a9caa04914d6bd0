"""Command-line driver.

Exit codes: 0 success, 2 input or usage error, 3 the intact system already
fails, 4 the evaluator failed (a partial report is still written).
"""

from __future__ import annotations

import argparse
import sys

from . import baselines, csilp
from .evaluator import BaseStateFailure
from .report import (
    Report,
    from_csilp,
    from_mcs,
    from_oracle,
    from_se,
    load_report,
    render_text,
    write_report,
)
from .system import SystemFileError, load_system

EXIT_OK, EXIT_INPUT, EXIT_BASE, EXIT_EVALUATOR = 0, 2, 3, 4


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _common(p: argparse.ArgumentParser, *, workers: bool = True) -> None:
    p.add_argument("--system", required=True, metavar="FILE",
                   help="system file, or the name of a bundled system")
    p.add_argument("--out", metavar="DIR", help="write results into DIR instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock fields (reports then differ between runs)")
    if workers:
        p.add_argument("--workers", type=_positive_int, default=1)


def _criteria_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-max", type=_non_negative_int, metavar="INT",
                   help="highest state level to search (default: all)")
    p.add_argument("--max-evals", type=_non_negative_int, metavar="INT",
                   help="evaluation budget")
    p.add_argument("--delta", type=_probability, metavar="FLOAT",
                   help="stop once upper - lower LOLP is at most this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticerel",
        description="Power-system reliability by lattice partition of the state space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="identify critical states and bound LOLP")
    _common(p)
    _criteria_flags(p)
    p.add_argument("--tight-upper", action="store_true",
                   help="also count known-normal cells in the upper bound")

    p = sub.add_parser("enumerate", help="state enumeration baseline")
    _common(p)
    _criteria_flags(p)

    p = sub.add_parser("mcs", help="Monte Carlo baseline")
    _common(p)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--cov", type=_positive_float, default=0.01,
                   help="target coefficient of variation")
    p.add_argument("--max-samples", type=_positive_int, default=1_000_000)

    p = sub.add_parser("oracle", help="exact LOLP and minimal cut sets by brute force")
    _common(p)

    p = sub.add_parser("report", help="print a saved JSON report")
    p.add_argument("file", metavar="REPORT")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    return parser


def _criteria(args: argparse.Namespace, n: int) -> csilp.Criteria:
    if args.k_max is None and args.max_evals is None and args.delta is None:
        return csilp.Criteria.complete(n)
    return csilp.Criteria(args.max_evals, args.delta, args.k_max)


def _emit(report: Report, args: argparse.Namespace) -> None:
    if args.out:
        for path in write_report(report, args.out, args.format):
            print(path)
        sys.stdout.write(render_text(report))
    elif args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.trace_csv() if report.trace else report.critical_csv())


def _run(args: argparse.Namespace) -> int:
    if args.command == "report":
        report = load_report(args.file)
        if args.format == "json":
            sys.stdout.write(report.to_json())
        elif args.format == "csv":
            sys.stdout.write(report.trace_csv())
        else:
            sys.stdout.write(render_text(report))
        return EXIT_OK

    system = load_system(args.system)
    if args.command == "assess":
        res = csilp.run(system, _criteria(args, system.n), workers=args.workers,
                        tight_upper=args.tight_upper)
        report = from_csilp(res, timing=args.timing)
    elif args.command == "enumerate":
        res = baselines.enumerate_assess(system, _criteria(args, system.n), workers=args.workers)
        report = from_se(res, timing=args.timing)
    elif args.command == "mcs":
        settings = baselines.McsSettings(seed=args.seed, max_samples=args.max_samples,
                                         target_cov=args.cov)
        res = baselines.monte_carlo_assess(system, settings, workers=args.workers)
        report = from_mcs(res, timing=args.timing)
    else:
        res = baselines.brute_force_oracle(system, workers=args.workers)
        report = from_oracle(res, timing=args.timing)
    _emit(report, args)
    if report.error:
        print(f"latticerel: evaluator error: {report.error}", file=sys.stderr)
        return EXIT_EVALUATOR
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except SystemFileError as exc:
        print(f"latticerel: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BaseStateFailure as exc:
        print(f"latticerel: {exc}", file=sys.stderr)
        return EXIT_BASE
    except (OSError, ValueError) as exc:
        print(f"latticerel: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
