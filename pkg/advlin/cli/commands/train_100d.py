"""``advlin train-100d``: epoch runs in 100 dimensions."""
import argparse
from typing import Any, Dict

from advlin.cli.deps import add_common_arguments, common_training_params, parse_count
from advlin.schemas.experiment import ExperimentKind
from advlin.services.experiments import PRESETS

KIND = ExperimentKind.TRAIN_100D


def build_params(args: argparse.Namespace) -> Dict[str, Any]:
    params = common_training_params(args)
    if args.epochs is not None:
        params["epochs"] = parse_count(args.epochs, "--epochs")
    params["preset"] = args.preset
    return params


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(KIND.value, help="Mean theta and test accuracy per epoch")
    add_common_arguments(parser)
    parser.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        default="high",
        help="Epsilon sweep in multiples of mu when no --epsilon is given",
    )
    parser.set_defaults(kind=KIND, build_params=build_params)
    return parser
