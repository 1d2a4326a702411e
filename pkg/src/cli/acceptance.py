"""CLI entry point for the end-to-end acceptance report.

    python -m src.cli acceptance --out runs/acceptance
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from src.cli.common import EXIT_FAILED, EXIT_OK, guarded, setup_logging
from src.harness.acceptance import AcceptanceReport, evaluate


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, required=True, help="Directory for acceptance.json and trial artifacts")
    parser.add_argument("--preset", default="sim16", help="Preset to evaluate")
    parser.add_argument("--steps", type=int, default=1000, help="Steps per trial")
    parser.add_argument("--seeds", type=int, default=10, help="Seeds per learning rate")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default SWEEP_WORKERS)")
    parser.add_argument("--log-level", default=None, help="Logging level")


def print_summary(report: AcceptanceReport, outdir: Path) -> None:
    print("\n" + "=" * 60)
    print(f"ACCEPTANCE ({report.preset}, {report.n_steps} steps, {len(report.seeds)} seeds)")
    print("=" * 60)
    for criterion in report.criteria:
        print(f"  {'✓' if criterion.passed else '✗'} {criterion.id:>2}. {criterion.name}")
    print(f"\nReport saved to: {outdir / 'acceptance.json'}")
    print("=" * 60)


def execute(args: argparse.Namespace) -> int:
    setup_logging("acceptance", args.log_level)

    def action() -> int:
        report = evaluate(
            args.out,
            preset=args.preset,
            n_steps=args.steps,
            seeds=tuple(range(args.seeds)),
            workers=args.workers,
        )
        print_summary(report, args.out)
        return EXIT_OK if report.passed else EXIT_FAILED

    return guarded(action)


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="Evaluate the end-to-end acceptance criteria")
    add_arguments(parser)
    sys.exit(execute(parser.parse_args(argv)))


if __name__ == "__main__":
    main()
