"""CLI entry point for learning-rate / seed sweeps.

    python -m src.cli sweep --grid grids/sim16_eta.json --out runs/sim16_eta
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.cli.common import EXIT_FAILED, EXIT_OK, guarded, setup_logging
from src.config.presets import load_sweep_grid
from src.harness.sweep import SweepSummary, run_grid
from src.harness.trial import STATUS_OK

logger = logging.getLogger(__name__)


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", type=Path, required=True, help="SweepGrid JSON file")
    parser.add_argument("--out", type=Path, required=True, help="Directory for per-cell artifacts and sweep_summary.json")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default SWEEP_WORKERS)")
    parser.add_argument("--log-level", default=None, help="Logging level")


def print_summary(summary: SweepSummary, outdir: Path) -> None:
    print("\n" + "=" * 60)
    print(f"SWEEP SUMMARY ({summary.preset}, {summary.n_steps} steps)")
    print("=" * 60)
    if summary.reflex_baseline is not None:
        print(f"Reflex baseline mean |E_c|: {summary.reflex_baseline:.6f}")
    print(f"\n{'group':>10} {'ok':>6} {'rms median':>12} {'rms IQR':>24} {'success median':>15}")
    for group in summary.groups:
        iqr = f"[{group.rms_q1:.5f}, {group.rms_q3:.5f}]" if group.rms_q1 is not None else "n/a"
        rms = f"{group.rms_median:.6f}" if group.rms_median is not None else "n/a"
        success = f"{group.success_median:.1f}" if group.success_median is not None else "-"
        print(f"{group.group:>10} {group.n_ok:>3}/{group.n_cells:<2} {rms:>12} {iqr:>24} {success:>15}")

    failed = [c for c in summary.cells if c.status != STATUS_OK]
    if failed:
        print(f"\nAborted cells ({len(failed)}):")
        for cell in failed:
            print(f"  {cell.group}/seed{cell.seed}: {cell.status} ({cell.error})")
    print(f"\nResults saved to: {outdir}")
    print("=" * 60)


def execute(args: argparse.Namespace) -> int:
    setup_logging("sweep", args.log_level)

    def action() -> int:
        grid = load_sweep_grid(args.grid)
        summary = run_grid(grid, outdir=args.out, workers=args.workers)
        print_summary(summary, args.out)
        return EXIT_OK if all(c.status == STATUS_OK for c in summary.cells) else EXIT_FAILED

    return guarded(action)


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="Run a learning-rate / seed sweep")
    add_arguments(parser)
    sys.exit(execute(parser.parse_args(argv)))


if __name__ == "__main__":
    main()
