"""Command dispatcher: python -m src.cli {run,sweep,gradcheck,acceptance} [options]."""

import argparse
import sys

from src.cli import acceptance, gradcheck, run, sweep

COMMANDS = {
    "run": (run, "Run one closed-loop learning trial"),
    "sweep": (sweep, "Run a learning-rate / seed sweep from a grid file"),
    "gradcheck": (gradcheck, "Finite-difference checks of the learner's gradients"),
    "acceptance": (acceptance, "Evaluate the end-to-end acceptance criteria"),
}


def main() -> None:
    parser = argparse.ArgumentParser(prog="python -m src.cli", description="Closed-loop learning harness")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (module, help_text) in COMMANDS.items():
        module.add_arguments(subparsers.add_parser(name, help=help_text))
    args = parser.parse_args()
    module, _ = COMMANDS[args.command]
    sys.exit(module.execute(args))


if __name__ == "__main__":
    main()
