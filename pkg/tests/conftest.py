"""Test configuration and fixtures."""
from fractions import Fraction
from pathlib import Path

import pytest

from advlin.config import settings
from advlin.schemas.dynamics import RecurrenceParams
from advlin.schemas.gaussian import GaussianModel, ShiftedModel
from advlin.schemas.training import EpochMode, LossKind, StreamingMode, TrainConfig


@pytest.fixture(autouse=True)
def plain_settings(monkeypatch):
    """Pin settings that the environment could override."""
    monkeypatch.setattr(settings, "ADVLIN_SEED", 0)
    monkeypatch.setattr(settings, "ADVLIN_JOBS", 1)
    monkeypatch.setattr(settings, "ADVLIN_LOG_JSON", True)
    monkeypatch.setattr(settings, "CSV_SIGNIFICANT_DIGITS", 17)


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Empty output directory."""
    path = tmp_path / "results"
    path.mkdir()
    return path


@pytest.fixture
def unit_model() -> GaussianModel:
    """1-d model with mu = sigma = 1."""
    return GaussianModel.isotropic(d=1, mu=1.0, sigma=1.0)


@pytest.fixture
def model_100d() -> GaussianModel:
    """100-d model with mu_j = sigma = 1."""
    return GaussianModel.isotropic(d=100, mu=1.0, sigma=1.0)


@pytest.fixture
def shifted_model() -> ShiftedModel:
    """Shifted-mean model of the intercept experiment."""
    return ShiftedModel.isotropic(d=1, mu1=2.0, mu2=1.0, sigma=0.25)


@pytest.fixture
def example_params() -> RecurrenceParams:
    """eta = 1/2, mu = 1, eps = 3/2: the recurrence has a period-6 cycle."""
    return RecurrenceParams(eta=Fraction(1, 2), mu=Fraction(1), epsilon=Fraction(3, 2))


@pytest.fixture
def small_r() -> Fraction:
    """Negligible positive start value."""
    return Fraction(1, 1_000_000)


@pytest.fixture
def streaming_config() -> TrainConfig:
    """Linear-loss streaming run without an adversary."""
    return TrainConfig(
        eta=0.001,
        epsilon=0.0,
        loss=LossKind.linear(),
        mode=StreamingMode(iterations=2_000),
        seed=11,
    )


@pytest.fixture
def epoch_config() -> TrainConfig:
    """Short epoch run."""
    return TrainConfig(
        eta=0.001,
        epsilon=1.5,
        loss=LossKind.linear(),
        mode=EpochMode(n_train=500, n_test=500, epochs=3),
        seed=5,
    )
