"""Bounded pool for independent sweep points."""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from advlin.config import settings
from advlin.errors import UsageError

logger = logging.getLogger(__name__)

P = TypeVar("P")
R = TypeVar("R")


def run_tasks(fn: Callable[[P], R], payloads: Sequence[P], jobs: int = None) -> List[R]:
    """
    Run ``fn`` on every payload, at most ``jobs`` at a time.

    Results come back in payload order whatever order the workers finish in.
    With one job everything runs in this process.

    Args:
        fn: Picklable top-level function
        payloads: Picklable arguments, one per task
        jobs: Worker processes (settings default)

    Returns:
        One result per payload

    Raises:
        UsageError: If jobs < 1
    """
    if jobs is None:
        jobs = settings.ADVLIN_JOBS
    if jobs < 1:
        raise UsageError(f"--jobs must be >= 1, got {jobs}")
    name = getattr(fn, "__name__", repr(fn))
    logger.info(f"Running {len(payloads)} {name} tasks with {jobs} worker(s)")

    if jobs == 1 or len(payloads) <= 1:
        return [fn(payload) for payload in payloads]

    with ProcessPoolExecutor(max_workers=min(jobs, len(payloads))) as executor:
        return list(executor.map(fn, payloads))
