"""Map the exception family to exit codes."""
import functools
import json
import logging
import sys
from typing import Callable

from pydantic import ValidationError

from advlin.errors import (
    ConfigurationError,
    DomainError,
    InvariantViolation,
    UnsupportedConfigurationError,
    UsageError,
)
from advlin.utils.logging_config import current_run_id

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_CHECKS_FAILED = 4

USAGE_ERRORS = (UsageError, ValidationError, DomainError, ConfigurationError, UnsupportedConfigurationError)


def _emit(error: str, message: str) -> None:
    print(json.dumps({"error": error, "message": message, "run_id": current_run_id()}), file=sys.stderr)


def handle_errors(fn: Callable[..., int]) -> Callable[..., int]:
    """Run a subcommand and turn its exceptions into an exit code and one JSON line on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs) -> int:
        try:
            return fn(*args, **kwargs)
        except USAGE_ERRORS as e:
            logger.error(f"Usage error: {str(e)}")
            _emit("usage_error", str(e))
            return EXIT_USAGE
        except InvariantViolation as e:
            logger.error(f"Invariant violation: {str(e)}")
            _emit("invariant_violation", str(e))
            return EXIT_INVARIANT
        except Exception as e:
            logger.error(f"Unexpected error: {str(e)}", exc_info=True)
            _emit("internal_error", "An unexpected error occurred; see the log for details.")
            return EXIT_UNEXPECTED

    return wrapper
