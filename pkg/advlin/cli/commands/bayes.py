"""``advlin bayes``: Bayes accuracy table."""
import argparse
from typing import Any, Dict

from advlin.cli.deps import add_common_arguments, parse_count, parse_real
from advlin.schemas.experiment import ExperimentKind

KIND = ExperimentKind.BAYES


def build_params(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    if args.mu is not None:
        params["mu"] = parse_real(args.mu)
    if args.sigma is not None:
        params["sigma"] = parse_real(args.sigma)
    if args.d is not None:
        params["d"] = parse_count(args.d, "--d")
    return params


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(KIND.value, help="Bayes accuracy for d = 1 .. --d")
    add_common_arguments(parser)
    parser.set_defaults(kind=KIND, build_params=build_params)
    return parser
