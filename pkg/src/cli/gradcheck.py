"""CLI entry point for the finite-difference gradient checks.

    python -m src.cli gradcheck --preset sim16 --seed 0
"""

import argparse
import sys
from typing import List, Optional

from src.cli.common import EXIT_FAILED, EXIT_OK, guarded, setup_logging
from src.config.presets import get_preset
from src.learning.gradcheck import GradcheckReport, run_gradcheck


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", default="sim16", help="Preset whose network shape is checked")
    parser.add_argument("--seed", type=int, default=0, help="Seed for weights and random test inputs")
    parser.add_argument("--trials", type=int, default=3, help="Random networks per check")
    parser.add_argument("--log-level", default=None, help="Logging level")


def print_summary(report: GradcheckReport) -> None:
    print("\n" + "=" * 60)
    print(f"GRADIENT CHECK (layers {report.layer_sizes}, seed {report.seed})")
    print("=" * 60)
    for result in report.results:
        mark = "✓" if result.passed else "✗"
        print(f"  {mark} {result.name:<32} {result.error:.3e}  (tol {result.tolerance:.0e})")
    print("=" * 60)


def execute(args: argparse.Namespace) -> int:
    setup_logging("gradcheck", args.log_level)

    def action() -> int:
        preset = get_preset(args.preset)
        report = run_gradcheck(
            seed=args.seed,
            n_inputs=preset.n_inputs,
            layer_sizes=preset.network.layer_sizes,
            output_gains=preset.network.output_gains,
            trials=args.trials,
        )
        print_summary(report)
        return EXIT_OK if report.passed else EXIT_FAILED

    return guarded(action)


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="Finite-difference checks of the learner's gradients")
    add_arguments(parser)
    sys.exit(execute(parser.parse_args(argv)))


if __name__ == "__main__":
    main()
