"""Logging configuration for structured JSON logging."""
import json
import logging
import sys
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

# Fields copied from ``extra={...}`` into the JSON record when present
EXTRA_FIELDS = ("run_id", "experiment", "epsilon", "loss", "seed")

_run_id: ContextVar[Optional[str]] = ContextVar("advlin_run_id", default=None)


class JSONFormatter(logging.Formatter):
    """Custom JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for field in EXTRA_FIELDS:
            value = getattr(record, field, None)
            if value is not None:
                log_data[field] = value

        return json.dumps(log_data)


class RunContextFilter(logging.Filter):
    """Attach the current run id to every record passing through the handler."""

    def filter(self, record: logging.LogRecord) -> bool:
        if getattr(record, "run_id", None) is None:
            record.run_id = _run_id.get()
        return True


def start_run(run_id: Optional[str] = None) -> str:
    """
    Bind a run id to the current context.

    Args:
        run_id: Explicit id to use (a fresh uuid4 otherwise)

    Returns:
        The bound run id
    """
    value = run_id or uuid.uuid4().hex
    _run_id.set(value)
    return value


def current_run_id() -> Optional[str]:
    """Return the run id bound to the current context, if any."""
    return _run_id.get()


def setup_logging(log_level: str = "INFO", json_output: bool = True) -> None:
    """
    Setup structured logging on stderr.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_output: Emit JSON records; plain text otherwise
    """
    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    handler.addFilter(RunContextFilter())

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level.upper())
    for existing in list(root_logger.handlers):
        if getattr(existing, "_advlin_handler", False):
            root_logger.removeHandler(existing)
    handler._advlin_handler = True  # type: ignore[attr-defined]
    root_logger.addHandler(handler)

    # Suppress noisy loggers
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
