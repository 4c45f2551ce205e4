"""``advlin sign-counts``: 1-d streaming runs over an epsilon grid."""
import argparse
from typing import Any, Dict

from advlin.cli.deps import add_common_arguments, common_training_params, parse_count, parse_eps_grid
from advlin.config import settings
from advlin.schemas.experiment import ExperimentKind

KIND = ExperimentKind.SIGN_COUNTS


def build_params(args: argparse.Namespace) -> Dict[str, Any]:
    params = common_training_params(args)
    params.setdefault("epsilons", parse_eps_grid(settings.SIGN_COUNT_EPS_GRID))
    if args.iters is not None:
        params["iterations"] = parse_count(args.iters, "--iters")
    if args.repeats is not None:
        params["repeats"] = parse_count(args.repeats, "--repeats")
    if args.traces:
        params["traces"] = True
    return params


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(KIND.value, help="Positive and negative sign counts per epsilon")
    add_common_arguments(parser)
    parser.add_argument("--repeats", help="Runs per epsilon, seeded seed, seed + 1, ...")
    parser.add_argument("--traces", action="store_true", help="Write step,theta,sign per run")
    parser.set_defaults(kind=KIND, build_params=build_params)
    return parser
