"""Shared argument parsing for the subcommands."""
import argparse
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from advlin.config import settings
from advlin.errors import DomainError, UsageError
from advlin.schemas.common import to_fraction
from advlin.schemas.experiment import ExperimentKind, ExperimentSpec
from advlin.schemas.training import LossKind


def parse_rational(text: str) -> Fraction:
    """
    Parse ``"3/2"``, ``"0.001"`` or ``"2"`` exactly.

    Raises:
        UsageError: If the text is not a rational number
    """
    try:
        return to_fraction(text)
    except DomainError as e:
        raise UsageError(str(e)) from e


def parse_real(text: str) -> float:
    """Parse a real number; fractions such as ``"1/2"`` are accepted."""
    return float(parse_rational(text))


def parse_count(text: str, name: str, minimum: int = 1) -> int:
    """
    Parse an integer flag value.

    Raises:
        UsageError: If it is not an integer or is below ``minimum``
    """
    try:
        value = int(text)
    except (TypeError, ValueError) as e:
        raise UsageError(f"{name} must be an integer, got {text!r}") from e
    if value < minimum:
        raise UsageError(f"{name} must be >= {minimum}, got {value}")
    return value


def parse_eps_grid(text: str) -> List[float]:
    """
    Expand ``a:b:step`` into a, a + step, ..., up to and including b.

    The grid is built in exact arithmetic, so ``0:20:0.5`` has 41 points and ends at 20.

    Raises:
        UsageError: For malformed text, step <= 0 or b < a
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"Expected a:b:step, got {text!r}")
    start, stop, step = (parse_rational(part) for part in parts)
    if step <= 0:
        raise UsageError(f"Grid step must be > 0, got {step}")
    if stop < start:
        raise UsageError(f"Grid end {stop} is below its start {start}")
    count = int((stop - start) / step)
    return [float(start + i * step) for i in range(count + 1)]


def parse_losses(tokens: Sequence[str]) -> List[str]:
    """
    Validate loss tokens and return their canonical spelling.

    Raises:
        UsageError: For an unknown token
    """
    try:
        return [LossKind.parse(token).token for token in tokens]
    except DomainError as e:
        raise UsageError(str(e)) from e


def resolve_seed(value: Optional[str]) -> int:
    """``--seed`` when given, otherwise ``ADVLIN_SEED``."""
    if value is None:
        return settings.ADVLIN_SEED
    return parse_count(value, "--seed", minimum=0)


def resolve_epsilons(args: argparse.Namespace) -> Optional[List[float]]:
    """The budgets from ``--epsilon`` or ``--eps-grid``, or None when neither is given."""
    if args.eps_grid is not None:
        return parse_eps_grid(args.eps_grid)
    if args.epsilon is not None:
        return [parse_real(value) for value in args.epsilon]
    return None


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand; values stay text until a subcommand converts them."""
    parser.add_argument("--eta", help="Learning rate")
    budgets = parser.add_mutually_exclusive_group()
    budgets.add_argument("--epsilon", nargs="+", help="Attack budget(s)")
    budgets.add_argument("--eps-grid", help="Attack budgets as a:b:step")
    parser.add_argument("--loss", nargs="+", help="linear, xent, hinge0 or hinge1")
    parser.add_argument("--iters", help="Streaming iterations")
    parser.add_argument("--epochs", help="Training epochs")
    parser.add_argument("--n-train", help="Training set size")
    parser.add_argument("--n-test", help="Test set size")
    parser.add_argument("--d", help="Dimension")
    parser.add_argument("--mu", help="Class mean per coordinate")
    parser.add_argument("--sigma", help="Noise standard deviation")
    parser.add_argument("--seed", help="Seed (default: ADVLIN_SEED)")
    parser.add_argument("--jobs", help="Parallel sweep points")
    parser.add_argument("--out", help="Output directory (default: ADVLIN_OUT_DIR)")
    parser.add_argument("--manifest", action="store_true", help="Write manifest.json")
    parser.add_argument("--log-level", help="Logging level (default: ADVLIN_LOG_LEVEL)")


def common_training_params(args: argparse.Namespace) -> Dict[str, Any]:
    """Real-valued and count flags shared by the training subcommands, omitting absent ones."""
    params: Dict[str, Any] = {}
    if args.eta is not None:
        params["eta"] = parse_real(args.eta)
    if args.mu is not None:
        params["mu"] = parse_real(args.mu)
    if args.sigma is not None:
        params["sigma"] = parse_real(args.sigma)
    if args.d is not None:
        params["d"] = parse_count(args.d, "--d")
    if args.n_test is not None:
        params["n_test"] = parse_count(args.n_test, "--n-test")
    if args.n_train is not None:
        params["n_train"] = parse_count(args.n_train, "--n-train")
    if args.loss is not None:
        params["loss"] = parse_losses(args.loss)
    epsilons = resolve_epsilons(args)
    if epsilons is not None:
        params["epsilons"] = epsilons
    return params


def build_spec(kind: ExperimentKind, args: argparse.Namespace, params: Dict[str, Any]) -> ExperimentSpec:
    """Combine subcommand parameters with the output, seed, jobs and manifest flags."""
    jobs = settings.ADVLIN_JOBS if args.jobs is None else parse_count(args.jobs, "--jobs")
    return ExperimentSpec(
        kind=kind,
        params=params,
        out_dir=Path(args.out or settings.ADVLIN_OUT_DIR),
        seed=resolve_seed(args.seed),
        jobs=jobs,
        manifest=args.manifest,
    )
