"""Experiment runners: one per subcommand, each writing its CSV, JSON and SVG files."""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from advlin.config import settings
from advlin.errors import UsageError
from advlin.models.trajectory import Trajectory
from advlin.schemas.common import to_fraction
from advlin.schemas.dynamics import RecurrenceParams, VerdictStatus
from advlin.schemas.experiment import ExperimentKind, ExperimentResult, ExperimentSpec
from advlin.schemas.gaussian import GaussianModel, ShiftedModel
from advlin.schemas.training import (
    EpochMode,
    FullBatchMode,
    LossKind,
    LossVariant,
    StreamingMode,
    TrainConfig,
)
from advlin.services import dynamics, gaussian_model
from advlin.services.trainer import export_run_stats_csv, trainer
from advlin.tasks import sweep_tasks
from advlin.tasks.worker_pool import run_tasks
from advlin.utils import plotting
from advlin.utils.artifacts import write_csv_atomic, write_json_atomic, write_manifest

logger = logging.getLogger(__name__)

# Attack budgets as multiples of mu
PRESETS = {
    "high": (1.5, 2.0, 4.0, 10.0),
    "medium": (0.75, 0.9, 1.0),
    "low": (0.0, 0.1, 0.25, 0.5),
}

SIGN_COUNT_EPS_MAX = 20.0
SIGN_COUNT_LOSSES = (LossVariant.LINEAR, LossVariant.CROSS_ENTROPY)
INTERCEPT_LOSSES = ("linear", "hinge0")


def preset_epsilons(name: str, mu: float) -> List[float]:
    """
    Attack budgets of a named sweep.

    Raises:
        UsageError: For an unknown preset
    """
    try:
        return [ratio * mu for ratio in PRESETS[name]]
    except KeyError as e:
        raise UsageError(f"Unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from e


def _param(spec: ExperimentSpec, name: str, default: Any) -> Any:
    value = spec.params.get(name)
    return default if value is None else value


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _finish(spec: ExperimentSpec, result: ExperimentResult) -> ExperimentResult:
    if spec.manifest:
        params = _jsonable({**spec.params, "seed": spec.seed, "jobs": spec.jobs})
        result.files.append(write_manifest(spec.out_dir, spec.kind.value, params, result.files))
    logger.info(
        f"{spec.kind.value} wrote {len(result.files)} files to {spec.out_dir}, passed={result.passed}",
        extra={"experiment": spec.kind.value, "seed": spec.seed},
    )
    return result


def _eps_label(eps: float) -> str:
    return f"{eps:g}"


def run_bayes(spec: ExperimentSpec) -> ExperimentResult:
    """
    Bayes accuracy for d = 1 .. d_max, plus the 1-d error in closed and integral form.

    Writes ``bayes.csv`` (d, bayes_accuracy) and ``bayes_summary.json``.
    """
    mu = float(_param(spec, "mu", settings.MU))
    sigma = float(_param(spec, "sigma", settings.SIGMA))
    d_max = int(_param(spec, "d", settings.DIMENSION))
    if d_max < 1:
        raise UsageError(f"--d must be >= 1, got {d_max}")

    rows = []
    for d in range(1, d_max + 1):
        model = GaussianModel.isotropic(d=d, mu=mu, sigma=sigma)
        rows.append([d, gaussian_model.bayes_accuracy_d(model)])
    csv_path = write_csv_atomic(spec.out_dir / "bayes.csv", ["d", "bayes_accuracy"], rows)

    error = gaussian_model.bayes_error_1d(mu, sigma)
    summary = {
        "mu": mu,
        "sigma": sigma,
        "bayes_error_1d": error,
        "bayes_accuracy_1d": 1.0 - error,
        "bayes_error_1d_quadrature": gaussian_model.bayes_error_quadrature(mu, sigma),
    }
    json_path = write_json_atomic(spec.out_dir / "bayes_summary.json", summary)
    return _finish(spec, ExperimentResult(files=[csv_path, json_path], summary=summary))


def run_dynamics(spec: ExperimentSpec) -> ExperimentResult:
    """
    Exact trajectory, cycle report and proposition verdicts for one triple, or the grid suite.

    Single mode writes ``trajectory.csv`` and ``dynamics_report.json``; grid mode
    writes ``dynamics_grid.csv`` and ``dynamics_report.json``. The result passes
    when no verdict is a failure.
    """
    theta0 = to_fraction(_param(spec, "theta0", settings.DYNAMICS_THETA0))
    horizon = int(_param(spec, "horizon", settings.DYNAMICS_HORIZON))
    if horizon < 1:
        raise UsageError(f"--horizon must be >= 1, got {horizon}")
    if _param(spec, "grid", False):
        return _run_dynamics_grid(spec, theta0, horizon)

    params = RecurrenceParams(
        eta=_param(spec, "eta", Fraction(1, 2)),
        mu=_param(spec, "mu", Fraction(1)),
        epsilon=_param(spec, "epsilon", Fraction(3, 2)),
    )
    t_bound = _param(spec, "t_bound", None)
    t_bound = to_fraction(t_bound) if t_bound is not None else dynamics.default_t_bound(params)

    trajectory = dynamics.simulate(theta0, params, horizon)
    csv_path = dynamics.export_trajectory_csv(trajectory, spec.out_dir / "trajectory.csv")

    verdicts = [
        dynamics.check_attraction(params, theta0, horizon),
        dynamics.check_next_is_pos(trajectory, params),
        dynamics.check_consecutive_pos(params, t_bound, trajectory),
        dynamics.check_oscillation(trajectory, params),
    ]
    cycle = dynamics.detect_cycle(theta0, params, int(_param(spec, "max_steps", settings.DETECT_CYCLE_MAX_STEPS)))
    cycle_census = None
    if cycle is not None:
        head = dynamics.simulate(theta0, params, cycle.preperiod + cycle.period)
        period_states = Trajectory(
            numerators=head.numerators[cycle.preperiod:cycle.preperiod + cycle.period], scale=head.scale
        )
        cycle_census = dynamics.sign_census(period_states)

    passed = not any(v.status == VerdictStatus.FAIL for v in verdicts)
    report = {
        "params": params.model_dump(mode="json"),
        "theta0": str(theta0),
        "horizon": horizon,
        "t_bound": str(t_bound),
        "s": dynamics.s_choice(t_bound) if t_bound > 1 else None,
        "census": dynamics.sign_census(trajectory).model_dump(),
        "census_majority": dynamics.census_majority(trajectory),
        "cycle": cycle.model_dump() if cycle is not None else None,
        "cycle_census": cycle_census.model_dump() if cycle_census is not None else None,
        "verdicts": [v.model_dump(mode="json") for v in verdicts],
        "passed": passed,
    }
    json_path = write_json_atomic(spec.out_dir / "dynamics_report.json", report)
    return _finish(spec, ExperimentResult(files=[csv_path, json_path], passed=passed, summary=report))


def _run_dynamics_grid(spec: ExperimentSpec, theta0: Fraction, horizon: int) -> ExperimentResult:
    payloads = [(p, theta0, horizon) for p in dynamics.grid_params()]
    rows = run_tasks(sweep_tasks.dynamics_triple, payloads, spec.jobs)
    csv_path = write_csv_atomic(
        spec.out_dir / "dynamics_grid.csv", dynamics.GRID_CSV_HEADER, dynamics.grid_csv_rows(rows)
    )
    failures = [row.params.label() for row in rows if row.failed]
    report = {
        "theta0": str(theta0),
        "horizon": horizon,
        "triples": len(rows),
        "failures": failures,
        "census_majority_findings": [row.params.label() for row in rows if not row.census_majority],
        "passed": not failures,
    }
    json_path = write_json_atomic(spec.out_dir / "dynamics_report.json", report)
    return _finish(spec, ExperimentResult(files=[csv_path, json_path], passed=not failures, summary=report))


def _losses(spec: ExperimentSpec, default: Sequence[str]) -> List[LossKind]:
    return [LossKind.parse(token) for token in _param(spec, "loss", list(default))]


def run_sign_counts(spec: ExperimentSpec) -> ExperimentResult:
    """
    One 1-d streaming run per (loss, epsilon, repeat), counting the signs of theta.

    Writes ``sign_counts.csv`` (loss, epsilon, seed, pos_count, neg_count,
    final_test_accuracy) and one ``sign_counts_<loss>.svg`` per loss. With
    ``traces`` each run also writes ``trace_<loss>_eps_<eps>_seed_<seed>.csv``
    (step, theta, sign).

    Raises:
        UsageError: For a budget outside [0, 20] or a loss other than linear and xent
    """
    kinds = _losses(spec, ["linear", "xent"])
    for kind in kinds:
        if kind.variant not in SIGN_COUNT_LOSSES:
            raise UsageError(f"sign-counts supports linear and xent, got {kind.token}")
    epsilons = [float(e) for e in _param(spec, "epsilons", [])]
    if not epsilons:
        raise UsageError("sign-counts needs at least one epsilon")
    for eps in epsilons:
        if not 0.0 <= eps <= SIGN_COUNT_EPS_MAX:
            raise UsageError(f"epsilon must lie in [0, {SIGN_COUNT_EPS_MAX:g}], got {eps}")

    model = GaussianModel.isotropic(
        d=int(_param(spec, "d", 1)),
        mu=float(_param(spec, "mu", settings.MU)),
        sigma=float(_param(spec, "sigma", settings.SIGMA)),
    )
    mode = StreamingMode(
        iterations=int(_param(spec, "iterations", settings.SIGN_COUNT_ITERATIONS)),
        n_test=int(_param(spec, "n_test", settings.SIGN_COUNT_N_TEST)),
    )
    seeds = [spec.seed + r for r in range(int(_param(spec, "repeats", 1)))]
    eta = float(_param(spec, "eta", settings.ETA))
    traces = bool(_param(spec, "traces", False))

    def trace_path(kind: LossKind, eps: float, seed: int):
        if not traces:
            return None
        return spec.out_dir / f"trace_{kind.token}_eps_{_eps_label(eps)}_seed_{seed}.csv"

    payloads = [
        (model, TrainConfig(eta=eta, epsilon=eps, loss=kind, mode=mode, seed=seed,
                            init_sigma=float(_param(spec, "init_sigma", settings.INIT_SIGMA))),
         trace_path(kind, eps, seed))
        for kind in kinds
        for eps in epsilons
        for seed in seeds
    ]
    points = run_tasks(sweep_tasks.streaming_point, payloads, spec.jobs)

    rows = []
    for (_, cfg, _), point in zip(payloads, points):
        accuracy = point["final_test_accuracy"]
        rows.append([
            cfg.loss.token, cfg.epsilon, cfg.seed, point["pos_count"], point["neg_count"],
            "" if accuracy is None else accuracy,
        ])
    files = [write_csv_atomic(
        spec.out_dir / "sign_counts.csv",
        ["loss", "epsilon", "seed", "pos_count", "neg_count", "final_test_accuracy"],
        rows,
    )]

    for kind in kinds:
        mine = [point for (_, cfg, _), point in zip(payloads, points) if cfg.loss == kind]
        pos = [float(np.mean([p["pos_count"] for p in mine if p["epsilon"] == e])) for e in epsilons]
        neg = [float(np.mean([p["neg_count"] for p in mine if p["epsilon"] == e])) for e in epsilons]
        files.append(plotting.plot_sign_counts(
            spec.out_dir / f"sign_counts_{kind.token}.svg", epsilons, pos, neg, title=f"{kind.token} loss"
        ))
    files.extend(path for _, _, path in payloads if path is not None)

    return _finish(spec, ExperimentResult(files=files, summary={"points": len(points)}))


def run_train_100d(spec: ExperimentSpec) -> ExperimentResult:
    """
    One epoch run per (loss, epsilon), recording mean theta and test accuracy per epoch.

    Writes ``train_100d_<loss>_eps_<eps>.csv`` (epoch, mean_theta, test_accuracy)
    per run and two SVGs per loss.
    """
    mu = float(_param(spec, "mu", settings.MU))
    kinds = _losses(spec, ["linear", "xent", f"hinge{settings.HINGE_MARGIN}"])
    epsilons = _param(spec, "epsilons", None)
    if not epsilons:
        epsilons = preset_epsilons(_param(spec, "preset", "high"), mu)
    epsilons = [float(e) for e in epsilons]

    model = GaussianModel.isotropic(
        d=int(_param(spec, "d", settings.DIMENSION)),
        mu=mu,
        sigma=float(_param(spec, "sigma", settings.SIGMA)),
    )
    mode = EpochMode(
        n_train=int(_param(spec, "n_train", settings.N_TRAIN)),
        n_test=int(_param(spec, "n_test", settings.N_TEST)),
        epochs=int(_param(spec, "epochs", settings.EPOCHS)),
    )
    eta = float(_param(spec, "eta", settings.ETA))
    payloads = [
        (model, TrainConfig(eta=eta, epsilon=eps, loss=kind, mode=mode, seed=spec.seed,
                            init_sigma=float(_param(spec, "init_sigma", settings.INIT_SIGMA))))
        for kind in kinds
        for eps in epsilons
    ]
    runs = run_tasks(sweep_tasks.epoch_point, payloads, spec.jobs)

    files = []
    summary: Dict[str, Any] = {}
    for kind in kinds:
        mean_curves, accuracy_curves = {}, {}
        for (_, cfg), stats in zip(payloads, runs):
            if cfg.loss != kind:
                continue
            label = _eps_label(cfg.epsilon)
            files.append(export_run_stats_csv(stats, spec.out_dir / f"train_100d_{kind.token}_eps_{label}.csv"))
            mean_curves[f"eps={label}"] = stats.per_epoch_mean_theta
            accuracy_curves[f"eps={label}"] = stats.per_epoch_test_accuracy
            summary[f"{kind.token}_eps_{label}"] = stats.per_epoch_test_accuracy[-1]
        files.append(plotting.plot_epoch_curves(
            spec.out_dir / f"train_100d_{kind.token}_mean_theta.svg",
            mean_curves, "mean theta", f"{kind.token} loss", reference=eta,
        ))
        files.append(plotting.plot_epoch_curves(
            spec.out_dir / f"train_100d_{kind.token}_accuracy.svg",
            accuracy_curves, "test accuracy", f"{kind.token} loss",
        ))
    return _finish(spec, ExperimentResult(files=files, summary=summary))


def run_intercept(spec: ExperimentSpec) -> ExperimentResult:
    """
    Full-batch training with a learned bias on shifted-mean data, linear against hinge0.

    Both losses see identical data and initialisation. Writes
    ``intercept_<loss>.csv`` (step, bias, theta, accuracy) and
    ``intercept_summary.json``.

    Raises:
        UsageError: Unless mu1 > mu2 > 0 and the losses are linear or hinge0
    """
    mu1 = float(_param(spec, "mu1", settings.INTERCEPT_MU1))
    mu2 = float(_param(spec, "mu2", settings.INTERCEPT_MU2))
    if not mu1 > mu2 > 0:
        raise UsageError(f"Need mu1 > mu2 > 0, got mu1={mu1}, mu2={mu2}")
    tokens = _param(spec, "loss", list(INTERCEPT_LOSSES))
    for token in tokens:
        if LossKind.parse(token).token not in INTERCEPT_LOSSES:
            raise UsageError(f"intercept supports linear and hinge0, got {token}")

    model = ShiftedModel.isotropic(
        d=1, mu1=mu1, mu2=mu2, sigma=float(_param(spec, "sigma", settings.INTERCEPT_SIGMA))
    )
    n = int(_param(spec, "n_train", settings.INTERCEPT_N))
    mode = FullBatchMode(
        n_train=n,
        n_test=int(_param(spec, "n_test", n)),
        steps=int(_param(spec, "steps", settings.INTERCEPT_STEPS)),
    )
    eta = float(_param(spec, "eta", settings.INTERCEPT_ETA))

    files = []
    summary: Dict[str, Any] = {
        "bayes_accuracy": gaussian_model.bayes_accuracy_shifted(model),
        "bayes_boundary": gaussian_model.bayes_boundary_shifted(model),
    }
    for token in tokens:
        kind = LossKind.parse(token)
        cfg = TrainConfig(eta=eta, epsilon=0.0, loss=kind, mode=mode, seed=spec.seed, learn_bias=True)
        stats = trainer.train_intercept(model, cfg)
        rows = [
            [step, bias, theta, accuracy]
            for step, (bias, theta, accuracy) in enumerate(
                zip(stats.bias_history, stats.theta_trace, stats.per_step_accuracy)
            )
        ]
        files.append(write_csv_atomic(
            spec.out_dir / f"intercept_{kind.token}.csv", ["step", "bias", "theta", "accuracy"], rows
        ))
        summary[kind.token] = {
            "initial_bias": stats.initial_bias,
            "final_bias": stats.final_bias,
            "max_bias_change": float(np.max(np.abs(np.array(stats.bias_history) - stats.initial_bias))),
            "final_accuracy": stats.final_test_accuracy,
            "boundary": stats.boundary,
        }
    if "linear" in summary and "hinge0" in summary:
        summary["accuracy_gap"] = summary["hinge0"]["final_accuracy"] - summary["linear"]["final_accuracy"]
    files.append(write_json_atomic(spec.out_dir / "intercept_summary.json", summary))
    return _finish(spec, ExperimentResult(files=files, summary=summary))


RUNNERS = {
    ExperimentKind.BAYES: run_bayes,
    ExperimentKind.DYNAMICS: run_dynamics,
    ExperimentKind.SIGN_COUNTS: run_sign_counts,
    ExperimentKind.TRAIN_100D: run_train_100d,
    ExperimentKind.INTERCEPT: run_intercept,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Dispatch to the runner for ``spec.kind``."""
    return RUNNERS[spec.kind](spec)
