"""``advlin dynamics``: exact expected recurrence and its checks."""
import argparse
from typing import Any, Dict

from advlin.cli.deps import add_common_arguments, parse_count, parse_rational
from advlin.errors import UsageError
from advlin.schemas.experiment import ExperimentKind

KIND = ExperimentKind.DYNAMICS


def build_params(args: argparse.Namespace) -> Dict[str, Any]:
    """Rational parameters; defaults reproduce the period-6 example."""
    params: Dict[str, Any] = {"grid": args.grid}
    if args.eps_grid is not None:
        raise UsageError("dynamics takes a single --epsilon")
    if args.epsilon is not None:
        if len(args.epsilon) != 1:
            raise UsageError("dynamics takes a single --epsilon")
        params["epsilon"] = parse_rational(args.epsilon[0])
    for name in ("eta", "mu", "theta0", "t_bound"):
        value = getattr(args, name)
        if value is not None:
            params[name] = parse_rational(value)
    if args.horizon is not None:
        params["horizon"] = parse_count(args.horizon, "--horizon")
    if args.max_steps is not None:
        params["max_steps"] = parse_count(args.max_steps, "--max-steps")
    return params


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(KIND.value, help="Exact recurrence, cycle report and proposition checks")
    add_common_arguments(parser)
    parser.add_argument("--theta0", help="Start value (default: DYNAMICS_THETA0)")
    parser.add_argument("--horizon", help="Steps to simulate (default: DYNAMICS_HORIZON)")
    parser.add_argument("--t-bound", help="t with mu < epsilon < t mu for the consecutive-positives check")
    parser.add_argument("--max-steps", help="Cycle detection budget (default: DETECT_CYCLE_MAX_STEPS)")
    parser.add_argument("--grid", action="store_true", help="Run the checks over the parameter grid")
    parser.set_defaults(kind=KIND, build_params=build_params)
    return parser
