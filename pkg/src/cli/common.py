"""Shared CLI plumbing: logging setup and error-to-exit-code mapping."""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

from src.config.settings import get_settings
from src.errors import IDLError

EXIT_OK = 0
EXIT_FAILED = 1


def setup_logging(command: str, level: Optional[str] = None) -> Path:
    """Configure file + stdout logging for a CLI command and return the log file path.

    Args:
        command: Command name used in the log file name
        level: Logging level (DEBUG, INFO, WARNING, ERROR); defaults to LOG_LEVEL
    """
    settings = get_settings()
    log_dir = Path(settings.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = log_dir / f"idl_{command}_{timestamp}.log"

    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stdout),
        ],
        force=True,
    )

    logger = logging.getLogger(__name__)
    logger.info("Logging initialized. Log file: %s", log_file)
    return log_file


def guarded(action: Callable[[], int]) -> int:
    """Run ``action`` and translate package errors into their exit codes."""
    logger = logging.getLogger(__name__)
    try:
        return action()
    except IDLError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"\n❌ {type(exc).__name__}: {exc}")
        return exc.exit_code
    except KeyboardInterrupt:
        print("\n\nInterrupted by user.")
        return 130
