"""CLI entry point for a single line-follower trial.

    python -m src.cli run --preset sim16 --eta 1e-2 --seed 0 --steps 1000 --out runs/demo
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.cli.common import EXIT_OK, guarded, setup_logging
from src.config.presets import TrialConfig, load_trial_config
from src.config.settings import get_settings
from src.errors import ConfigError, LostLineError, NumericAbortError
from src.harness.artifacts import emit
from src.harness.trial import STATUS_LOST_LINE, STATUS_NUMERIC_ABORT, TrialLog, run_trial

logger = logging.getLogger(__name__)


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="TrialConfig JSON file (flags override it)")
    parser.add_argument("--preset", default=None, help="Preset name (sim16, cam6x16)")
    parser.add_argument("--eta", type=float, default=None, help="Learning rate")
    parser.add_argument("--seed", type=int, default=None, help="Network initialization seed")
    parser.add_argument("--steps", type=int, default=None, help="Number of control steps")
    parser.add_argument("--reflex-only", action="store_true", help="Disable learning and the predictive action")
    parser.add_argument("--override", default=None, help="JSON object merged onto the preset")
    parser.add_argument("--out", type=Path, default=None, help="Artifact directory (default OUTPUT_ROOT/<label>)")
    parser.add_argument("--log-level", default=None, help="Logging level")


def build_config(args: argparse.Namespace) -> TrialConfig:
    base = load_trial_config(args.config).model_dump() if args.config else {"preset": get_settings().default_preset}
    updates = {
        "preset": args.preset,
        "eta": args.eta,
        "seed": args.seed,
        "n_steps": args.steps,
    }
    base.update({key: value for key, value in updates.items() if value is not None})
    if args.reflex_only:
        base["reflex_only"] = True
    if args.override:
        try:
            base["overrides"] = {**base.get("overrides", {}), **json.loads(args.override)}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--override is not valid JSON: {exc}") from exc
    try:
        return TrialConfig.model_validate(base)
    except ValueError as exc:
        raise ConfigError(f"invalid trial configuration: {exc}") from exc


def print_summary(log: TrialLog, outdir: Optional[Path]) -> None:
    print("\n" + "=" * 60)
    print("TRIAL SUMMARY")
    print("=" * 60)
    print(f"Trial: {log.config.label}")
    print(f"Status: {log.status}")
    print(f"Steps completed: {log.n_steps_completed}/{log.config.n_steps}")
    if log.rms_error is not None:
        print(f"RMS(E_c): {log.rms_error:.6f}")
        print(f"mean |E_c|: {log.mean_abs_error:.6f}")
    if log.reflex_baseline is not None:
        print(f"Reflex baseline mean |E_c|: {log.reflex_baseline:.6f}")
    print(f"Success step: {log.success_step if log.success_step is not None else 'not reached'}")
    print(f"Elapsed: {log.elapsed_seconds:.2f}s")
    if log.error:
        print(f"\nError: {log.error}")
    if outdir is not None:
        print(f"\nArtifacts saved to: {outdir}")
    print("=" * 60)


def execute(args: argparse.Namespace) -> int:
    setup_logging("run", args.log_level)

    def action() -> int:
        config = build_config(args)
        outdir = args.out or Path(get_settings().output_root) / config.label.replace("/", "_")
        log = run_trial(config)
        written = outdir if log.steps else None
        if log.steps:
            emit(log, outdir)
        print_summary(log, written)
        if log.status == STATUS_LOST_LINE:
            return LostLineError.exit_code
        if log.status == STATUS_NUMERIC_ABORT:
            return NumericAbortError.exit_code
        return EXIT_OK

    return guarded(action)


def main(argv: Optional[List[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="Run one closed-loop learning trial")
    add_arguments(parser)
    sys.exit(execute(parser.parse_args(argv)))


if __name__ == "__main__":
    main()
