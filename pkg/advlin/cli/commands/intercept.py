"""``advlin intercept``: learned bias on shifted-mean data."""
import argparse
from typing import Any, Dict

from advlin.cli.deps import add_common_arguments, common_training_params, parse_count, parse_real
from advlin.errors import UsageError
from advlin.schemas.experiment import ExperimentKind

KIND = ExperimentKind.INTERCEPT


def build_params(args: argparse.Namespace) -> Dict[str, Any]:
    params = common_training_params(args)
    if params.pop("epsilons", None):
        raise UsageError("intercept trains without an adversary; drop --epsilon")
    if "mu" in params or "d" in params:
        raise UsageError("intercept is one-dimensional; use --mu1 and --mu2 instead of --mu and --d")
    for name in ("mu1", "mu2"):
        value = getattr(args, name)
        if value is not None:
            params[name] = parse_real(value)
    if args.steps is not None:
        params["steps"] = parse_count(args.steps, "--steps")
    return params


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(KIND.value, help="Linear against hinge0 with a learned bias")
    add_common_arguments(parser)
    parser.add_argument("--mu1", help="Mean of the +1 class (default: INTERCEPT_MU1)")
    parser.add_argument("--mu2", help="Mean of the -1 class (default: INTERCEPT_MU2)")
    parser.add_argument("--steps", help="Full-batch steps (default: INTERCEPT_STEPS)")
    parser.set_defaults(kind=KIND, build_params=build_params)
    return parser
