"""Command-line entry point."""
import argparse
import json
import logging
import sys
from typing import List, Optional

from advlin import __version__
from advlin.cli.commands import bayes, dynamics, intercept, sign_counts, train_100d
from advlin.cli.deps import build_spec
from advlin.cli.error_handler import EXIT_CHECKS_FAILED, EXIT_OK, handle_errors
from advlin.config import settings
from advlin.services.experiments import run_experiment
from advlin.utils.logging_config import setup_logging, start_run

logger = logging.getLogger(__name__)

COMMANDS = (bayes, dynamics, sign_counts, train_100d, intercept)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advlin",
        description="Adversarial training of linear classifiers on Gaussian data",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


@handle_errors
def run_command(args: argparse.Namespace) -> int:
    """Resolve the experiment, run it and print a summary on stdout."""
    spec = build_spec(args.kind, args, args.build_params(args))
    logger.info(f"Starting {spec.kind.value}", extra={"experiment": spec.kind.value, "seed": spec.seed})
    result = run_experiment(spec)
    print(json.dumps({
        "subcommand": spec.kind.value,
        "passed": result.passed,
        "files": [str(path) for path in result.files],
    }, indent=2))
    return EXIT_OK if result.passed else EXIT_CHECKS_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, set up logging and run one subcommand; returns the exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.ADVLIN_LOG_LEVEL, settings.ADVLIN_LOG_JSON)
    start_run()
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
