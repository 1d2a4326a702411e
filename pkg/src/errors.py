"""Exception hierarchy for the closed-loop learning harness.

Each error that can end a CLI command carries the exit code the command returns.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class IDLError(Exception):
    """Base class for all errors raised by this package."""

    exit_code: int = 1


class ConfigError(IDLError, ValueError):
    """Invalid preset, trial or grid configuration."""

    exit_code = 4


class LostLineError(IDLError):
    """The robot stayed off the line for longer than the configured limit."""

    exit_code = 2

    def __init__(self, step: int, off_track_steps: int) -> None:
        super().__init__(f"lost line at step {step} after {off_track_steps} consecutive off-track steps")
        self.step = step
        self.off_track_steps = off_track_steps


class NumericAbortError(IDLError, ArithmeticError):
    """A weight update or signal became non-finite."""

    exit_code = 3

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class WellPosednessError(IDLError, ValueError):
    """A feedback loop contains an algebraic loop that cannot be solved per step."""


class CompositionError(IDLError, ValueError):
    """Transfer-function composition produced a degenerate result."""


class ShapeError(IDLError, ValueError):
    """Vector or matrix dimensions do not match."""


class SignalError(IDLError, ValueError):
    """A learning signal is not finite."""


class FilterParameterError(IDLError, ValueError):
    """Low-pass filter parameters are outside the supported range."""


class ArtifactError(IDLError, OSError):
    """Writing or reading a trial artifact failed."""

    def __init__(self, path: Any, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = path
