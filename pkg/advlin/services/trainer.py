"""Stochastic adversarial training of the linear classifier."""
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from advlin.errors import ConfigurationError, DomainError, InvariantViolation
from advlin.models.dataset import Dataset
from advlin.models.hypothesis import LinearHypothesis
from advlin.schemas.dynamics import SignCensus
from advlin.schemas.gaussian import GaussianModel, ShiftedModel
from advlin.schemas.training import (
    AgreementReport,
    EpochMode,
    FullBatchMode,
    LossKind,
    LossVariant,
    RunStats,
    StreamingMode,
    TrainConfig,
)
from advlin.services import gaussian_model, losses
from advlin.utils.artifacts import write_csv_atomic

logger = logging.getLogger(__name__)

STREAMS = ("init", "train", "test", "shuffle")


def stream_seeds(seed: int) -> Dict[str, int]:
    """
    Independent integer seeds for initialisation, training data, test data and shuffling.

    They depend on ``seed`` only, so runs that differ in eps or loss see the
    same data.
    """
    if seed < 0:
        raise DomainError(f"Seed must be non-negative, got {seed}")
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: int(child.generate_state(1)[0]) for name, child in zip(STREAMS, children)}


class Trainer:
    """Training loops for the three run modes."""

    @staticmethod
    def init_hypothesis(d: int, cfg: TrainConfig) -> LinearHypothesis:
        """
        Draw theta_j ~ N(0, init_sigma^2) and, when the bias is learned, b ~ N(0, 1).

        Args:
            d: Dimension
            cfg: Training configuration (seed and init_sigma)

        Returns:
            Initial hypothesis

        Raises:
            DomainError: If d < 1
        """
        if d < 1:
            raise DomainError(f"Dimension must be >= 1, got {d}")
        rng = np.random.default_rng(stream_seeds(cfg.seed)["init"])
        theta = cfg.init_sigma * rng.standard_normal(d)
        b = float(rng.standard_normal()) if cfg.learn_bias else 0.0
        return LinearHypothesis(theta=theta, b=b)

    @staticmethod
    def evaluate_accuracy(h: LinearHypothesis, data: Dataset) -> float:
        """
        Fraction of samples with sign(theta^T x + b) = y; a zero decision value counts as +1.

        Raises:
            DomainError: If the dataset is empty or dimensions disagree
        """
        if data.n == 0:
            raise DomainError("Cannot evaluate on an empty dataset")
        if data.d != h.d:
            raise DomainError(f"Dimension mismatch: theta has {h.d} entries, x has {data.d}")
        predictions = np.where(h.decision_values(data.x) >= 0.0, 1, -1)
        return float(np.mean(predictions == data.y))

    @staticmethod
    def _sgd_step(
        kind: LossKind,
        theta: np.ndarray,
        b: float,
        x: np.ndarray,
        y: int,
        cfg: TrainConfig
    ):
        grad_theta, grad_b = losses.sample_gradient(kind, theta, b, x, y, cfg.epsilon)
        new_theta = theta - cfg.eta * grad_theta
        if cfg.verify_updates and kind.variant == LossVariant.LINEAR:
            expected = theta + cfg.eta * (y * x - cfg.epsilon * np.sign(theta))
            if not np.array_equal(new_theta, expected):
                raise InvariantViolation(
                    f"Linear update disagrees with theta + eta (y x - eps sign(theta)): "
                    f"{new_theta!r} != {expected!r}"
                )
        if cfg.learn_bias:
            b = b - cfg.eta * grad_b
        return new_theta, b

    def train_streaming(
        self,
        model: GaussianModel,
        cfg: TrainConfig,
        initial: Optional[LinearHypothesis] = None
    ) -> RunStats:
        """
        One fresh sample per iteration, recording the sign of every coordinate.

        The census includes the initial theta, so each coordinate's counts sum
        to iterations + 1.

        Args:
            model: Data model
            cfg: Configuration with a StreamingMode
            initial: Start hypothesis (drawn by :meth:`init_hypothesis` otherwise)

        Returns:
            RunStats with per-coordinate censuses, the coordinate-0 trace and
            the final test accuracy when ``n_test`` > 0

        Raises:
            ConfigurationError: If the mode is not streaming
        """
        if not isinstance(cfg.mode, StreamingMode):
            raise ConfigurationError(f"train_streaming needs a streaming mode, got {cfg.mode.kind}")
        seeds = stream_seeds(cfg.seed)
        h = initial if initial is not None else self.init_hypothesis(model.d, cfg)
        if h.d != model.d:
            raise DomainError(f"Dimension mismatch: theta has {h.d} entries, model has {model.d}")
        theta = np.array(h.theta)
        b = h.b

        positive = (theta > 0).astype(np.int64)
        negative = (theta < 0).astype(np.int64)
        trace = [float(theta[0])]

        for chunk in gaussian_model.sample_stream(model, seeds["train"], cfg.mode.iterations):
            for x, y in zip(chunk.x, chunk.y):
                theta, b = self._sgd_step(cfg.loss, theta, b, x, int(y), cfg)
                positive += theta > 0
                negative += theta < 0
                trace.append(float(theta[0]))

        total = cfg.mode.iterations + 1
        census = [
            SignCensus(positive=int(p), negative=int(n), zero=total - int(p) - int(n))
            for p, n in zip(positive, negative)
        ]
        final = LinearHypothesis(theta=theta, b=b)
        accuracy = None
        if cfg.mode.n_test > 0:
            test = gaussian_model.sample(model, seeds["test"], cfg.mode.n_test)
            accuracy = self.evaluate_accuracy(final, test)

        logger.info(
            f"Streaming run finished: {cfg.mode.iterations} iterations, theta_0={trace[-1]:.6g}",
            extra={"epsilon": cfg.epsilon, "loss": cfg.loss.token, "seed": cfg.seed},
        )
        return RunStats(
            mode=cfg.mode.kind,
            per_step_sign_counts=census,
            theta_trace=trace,
            final_theta=theta.tolist(),
            final_bias=b,
            initial_bias=h.b,
            final_test_accuracy=accuracy,
        )

    def train_epochs(self, model: GaussianModel, cfg: TrainConfig) -> RunStats:
        """
        Single-sample updates over a fixed training set for a number of epochs.

        After each epoch the mean of theta over coordinates and the clean test
        accuracy are recorded.

        Args:
            model: Data model
            cfg: Configuration with an EpochMode

        Returns:
            RunStats with per-epoch lists of length ``epochs``

        Raises:
            ConfigurationError: If the mode is not epochs
            InvariantViolation: If ``verify_updates`` catches a mismatched update
        """
        if not isinstance(cfg.mode, EpochMode):
            raise ConfigurationError(f"train_epochs needs an epoch mode, got {cfg.mode.kind}")
        seeds = stream_seeds(cfg.seed)
        train = gaussian_model.sample(model, seeds["train"], cfg.mode.n_train)
        test = gaussian_model.sample(model, seeds["test"], cfg.mode.n_test)
        shuffler = np.random.default_rng(seeds["shuffle"])

        h = self.init_hypothesis(model.d, cfg)
        theta = np.array(h.theta)
        b = h.b
        mean_theta, accuracy, robust, biases = [], [], [], []

        for epoch in range(cfg.mode.epochs):
            order = shuffler.permutation(train.n) if cfg.shuffle else np.arange(train.n)
            xs = train.x[order]
            ys = train.y[order]
            for x, y in zip(xs, ys):
                theta, b = self._sgd_step(cfg.loss, theta, b, x, int(y), cfg)
            current = LinearHypothesis(theta=theta, b=b)
            mean_theta.append(float(theta.mean()))
            accuracy.append(self.evaluate_accuracy(current, test))
            if cfg.track_robust_accuracy:
                robust.append(losses.robust_accuracy(current, test, cfg.epsilon))
            if cfg.learn_bias:
                biases.append(float(b))
            logger.debug(
                f"Epoch {epoch + 1}: mean theta {mean_theta[-1]:.6g}, test accuracy {accuracy[-1]:.4f}",
                extra={"epsilon": cfg.epsilon, "loss": cfg.loss.token},
            )

        logger.info(
            f"Epoch run finished: {cfg.mode.epochs} epochs, final accuracy {accuracy[-1]:.4f}",
            extra={"epsilon": cfg.epsilon, "loss": cfg.loss.token, "seed": cfg.seed},
        )
        return RunStats(
            mode=cfg.mode.kind,
            per_epoch_mean_theta=mean_theta,
            per_epoch_test_accuracy=accuracy,
            per_epoch_robust_accuracy=robust,
            per_epoch_bias=biases,
            final_theta=theta.tolist(),
            final_bias=b,
            initial_bias=h.b,
            final_test_accuracy=accuracy[-1],
        )

    def train_intercept(self, model: ShiftedModel, cfg: TrainConfig) -> RunStats:
        """
        Full-batch training of theta and b on label-balanced shifted-mean data.

        With the linear loss the bias gradient is -mean(y), which is exactly 0
        on a balanced batch; the margin-0 hinge moves b through misclassified points.

        Args:
            model: Shifted-mean model
            cfg: Configuration with a FullBatchMode and ``learn_bias``

        Returns:
            RunStats with ``bias_history`` and ``per_step_accuracy`` (steps + 1
            entries, initial first) and the boundary -b/theta when d = 1

        Raises:
            ConfigurationError: Without ``learn_bias``, with another loss or mode
        """
        if not cfg.learn_bias:
            raise ConfigurationError("The intercept experiment needs learn_bias")
        if cfg.loss not in (LossKind.linear(), LossKind.hinge(0.0)):
            raise ConfigurationError(f"The intercept experiment supports linear and hinge0, got {cfg.loss.token}")
        if not isinstance(cfg.mode, FullBatchMode):
            raise ConfigurationError(f"train_intercept needs a full-batch mode, got {cfg.mode.kind}")
        seeds = stream_seeds(cfg.seed)
        train = gaussian_model.sample_shifted(model, seeds["train"], cfg.mode.n_train, balanced=True)
        test = gaussian_model.sample_shifted(model, seeds["test"], cfg.mode.n_test)

        h = self.init_hypothesis(model.d, cfg)
        theta = np.array(h.theta)
        b = h.b
        bias_history = [b]
        trace = [float(theta[0])]
        accuracy = [self.evaluate_accuracy(h, test)]

        for _ in range(cfg.mode.steps):
            grad_theta, grad_b = losses.batch_adversarial_gradient(
                cfg.loss, theta, b, train.x, train.y, cfg.epsilon
            )
            theta = theta - cfg.eta * grad_theta
            b = b - cfg.eta * grad_b
            bias_history.append(b)
            trace.append(float(theta[0]))
            accuracy.append(self.evaluate_accuracy(LinearHypothesis(theta=theta, b=b), test))

        boundary = None
        if model.d == 1 and theta[0] != 0.0:
            boundary = -b / float(theta[0])
        logger.info(
            f"Intercept run finished: b {h.b:.6g} -> {b:.6g}, accuracy {accuracy[-1]:.4f}",
            extra={"loss": cfg.loss.token, "seed": cfg.seed},
        )
        return RunStats(
            mode=cfg.mode.kind,
            bias_history=bias_history,
            theta_trace=trace,
            per_step_accuracy=accuracy,
            final_theta=theta.tolist(),
            final_bias=b,
            initial_bias=h.b,
            final_test_accuracy=accuracy[-1],
            boundary=boundary,
        )

    def expected_trajectory_agreement(
        self,
        model: GaussianModel,
        cfg: TrainConfig,
        seeds: Sequence[int],
        steps: int,
        theta0: float = 1.0
    ) -> AgreementReport:
        """
        Average theta^k over seeded streaming runs started at the same theta0.

        Args:
            model: One-dimensional data model
            cfg: Template configuration; its seed and mode are replaced
            seeds: One run per seed
            steps: Iterations per run
            theta0: Common start value

        Returns:
            Mean and standard error of theta^k for k = 0 .. steps

        Raises:
            DomainError: If the model is not 1-d or fewer than two seeds are given
        """
        if model.d != 1:
            raise DomainError("Trajectory agreement is defined for d = 1")
        if len(seeds) < 2:
            raise DomainError("At least two seeds are needed for a standard error")
        start = LinearHypothesis(theta=np.array([theta0]))
        traces = []
        for seed in seeds:
            run_cfg = cfg.model_copy(update={"seed": seed, "mode": StreamingMode(iterations=steps)})
            traces.append(self.train_streaming(model, run_cfg, initial=start).theta_trace)
        matrix = np.array(traces)
        stderr = matrix.std(axis=0, ddof=1) / np.sqrt(len(seeds))
        return AgreementReport(
            steps=steps,
            n_runs=len(seeds),
            mean=matrix.mean(axis=0).tolist(),
            stderr=stderr.tolist(),
        )


trainer = Trainer()


def export_run_stats_csv(stats: RunStats, path: Path) -> Path:
    """
    Write a streaming or epoch run as CSV.

    Streaming runs give ``step,theta,sign`` for coordinate 0, step 0 being the
    initial theta. Epoch runs give ``epoch,mean_theta,test_accuracy`` plus a
    ``bias`` column when the bias was learned.

    Raises:
        ConfigurationError: For full-batch runs, which have their own layout
    """
    if stats.mode == "streaming":
        header = ["step", "theta", "sign"]
        rows = ([step, value, int(np.sign(value))] for step, value in enumerate(stats.theta_trace))
    elif stats.mode == "epochs":
        header = ["epoch", "mean_theta", "test_accuracy"]
        columns = [stats.per_epoch_mean_theta, stats.per_epoch_test_accuracy]
        if stats.per_epoch_bias:
            header.append("bias")
            columns.append(stats.per_epoch_bias)
        rows = ([epoch, *values] for epoch, values in enumerate(zip(*columns), start=1))
    else:
        raise ConfigurationError(f"No run-stats CSV layout for mode {stats.mode}")
    written = write_csv_atomic(path, header, rows)
    logger.info(f"Wrote {stats.mode} run stats to {written}")
    return written
