"""Sampling and Bayes quantities for the Gaussian data models."""
import logging
import math
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy import integrate, stats

from advlin.errors import DomainError, UnsupportedConfigurationError
from advlin.models.dataset import Dataset
from advlin.schemas.gaussian import GaussianModel, ShiftedModel
from advlin.services import specfun
from advlin.utils.artifacts import format_float, read_csv, write_csv_atomic

logger = logging.getLogger(__name__)


def _generator(seed: int) -> np.random.Generator:
    """PCG64 generator; numpy's ziggurat normals make draws bit-reproducible per numpy version."""
    if seed < 0:
        raise DomainError(f"Seed must be non-negative, got {seed}")
    return np.random.default_rng(seed)


def _draw_labels(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.integers(0, 2, size=n, dtype=np.int8) * 2 - 1).astype(np.int8)


def _balanced_labels(rng: np.random.Generator, n: int) -> np.ndarray:
    if n % 2:
        raise DomainError(f"A balanced dataset needs an even size, got {n}")
    labels = np.repeat(np.array([1, -1], dtype=np.int8), n // 2)
    return labels[rng.permutation(n)]


def sample(model: GaussianModel, seed: int, n: int) -> Dataset:
    """
    Draw n samples: y uniform on {-1, +1}, then x ~ N(y mu, sigma^2 I).

    Labels for the whole dataset are drawn first, then the noise matrix.

    Raises:
        DomainError: If n < 1
    """
    if n < 1:
        raise DomainError(f"Sample size must be >= 1, got {n}")
    rng = _generator(seed)
    y = _draw_labels(rng, n)
    noise = rng.standard_normal((n, model.d))
    x = y[:, None] * model.mu_array[None, :] + model.sigma * noise
    return Dataset(x=x, y=y, seed=seed)


def sample_stream(model: GaussianModel, seed: int, n: int, chunk_size: int = 10_000) -> Iterator[Dataset]:
    """
    Draw n samples lazily, in chunks of at most ``chunk_size``.

    One generator feeds all chunks; within a chunk labels come first, then the noise.

    Raises:
        DomainError: If n < 1 or chunk_size < 1
    """
    if n < 1 or chunk_size < 1:
        raise DomainError(f"Sample size and chunk size must be >= 1, got {n} and {chunk_size}")
    rng = _generator(seed)
    remaining = n
    while remaining > 0:
        size = min(chunk_size, remaining)
        y = _draw_labels(rng, size)
        noise = rng.standard_normal((size, model.d))
        x = y[:, None] * model.mu_array[None, :] + model.sigma * noise
        yield Dataset(x=x, y=y, seed=seed)
        remaining -= size


def sample_shifted(model: ShiftedModel, seed: int, n: int, balanced: bool = False) -> Dataset:
    """
    Draw n samples from the shifted model: x ~ N(mu1, sigma^2 I) if y = +1 else N(mu2, sigma^2 I).

    Args:
        model: Shifted-mean model
        seed: Generator seed
        n: Number of samples
        balanced: Exactly n/2 samples per label, in seeded random order

    Raises:
        DomainError: If n < 1, or n is odd with ``balanced``
    """
    if n < 1:
        raise DomainError(f"Sample size must be >= 1, got {n}")
    rng = _generator(seed)
    y = _balanced_labels(rng, n) if balanced else _draw_labels(rng, n)
    noise = rng.standard_normal((n, model.d))
    means = np.where((y == 1)[:, None], model.mu1_array[None, :], model.mu2_array[None, :])
    x = means + model.sigma * noise
    return Dataset(x=x, y=y, seed=seed)


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def bayes_error_1d(mu: float, sigma: float) -> float:
    """
    Bayes error of the 1-d model: 1/2 (1 - erf(mu / (sqrt(2) sigma))).

    Computed as 1/2 erfc(...) so the tail stays accurate.

    Raises:
        DomainError: If mu or sigma is not positive
    """
    mu = _require_positive("mu", mu)
    sigma = _require_positive("sigma", sigma)
    return 0.5 * specfun.erfc(mu / (math.sqrt(2.0) * sigma))


def bayes_error_quadrature(mu: float, sigma: float) -> float:
    """
    Bayes error from its integral form, by adaptive quadrature.

    1/2 * P(x < 0 | y=+1) + 1/2 * P(x > 0 | y=-1), integrating both class densities.
    """
    mu = _require_positive("mu", mu)
    sigma = _require_positive("sigma", sigma)
    positive_mass, _ = integrate.quad(
        lambda x: stats.norm.pdf(x, loc=mu, scale=sigma), -np.inf, 0.0, epsabs=1e-13, epsrel=1e-12
    )
    negative_mass, _ = integrate.quad(
        lambda x: stats.norm.pdf(x, loc=-mu, scale=sigma), 0.0, np.inf, epsabs=1e-13, epsrel=1e-12
    )
    return 0.5 * positive_mass + 0.5 * negative_mass


def bayes_accuracy_d(model: GaussianModel) -> float:
    """
    Accuracy of any theta > 0 classifier in d dimensions: Phi(sqrt(d) mu / sigma).

    Raises:
        UnsupportedConfigurationError: If the mu_j are not all equal
    """
    if not model.has_equal_means:
        raise UnsupportedConfigurationError(
            "Bayes accuracy is only defined here for equal means mu_j = mu"
        )
    return specfun.phi(math.sqrt(model.d) * model.mu[0] / model.sigma)


def bayes_decision(x: Sequence[float], mu: Sequence[float], sigma: float) -> int:
    """
    Bayes decision sign(mu^T x); an exact tie resolves to +1.

    Raises:
        DomainError: On dimension mismatch or non-positive sigma
    """
    _require_positive("sigma", sigma)
    x_arr = np.asarray(x, dtype=np.float64)
    mu_arr = np.asarray(mu, dtype=np.float64)
    if x_arr.shape != mu_arr.shape or x_arr.ndim != 1:
        raise DomainError(f"Dimension mismatch: x {x_arr.shape} vs mu {mu_arr.shape}")
    return 1 if float(mu_arr @ x_arr) >= 0.0 else -1


def bayes_accuracy_shifted(model: ShiftedModel) -> float:
    """Accuracy of the midpoint hyperplane for the shifted model: Phi(||mu1 - mu2|| / (2 sigma))."""
    gap = float(np.linalg.norm(model.mu1_array - model.mu2_array))
    return specfun.phi(gap / (2.0 * model.sigma))


def bayes_boundary_shifted(model: ShiftedModel) -> float:
    """Bayes decision threshold (mu1 + mu2) / 2 of a 1-d shifted model."""
    if model.d != 1:
        raise DomainError("A scalar boundary only exists for d = 1")
    return 0.5 * (model.mu1[0] + model.mu2[0])


def export_dataset_csv(data: Dataset, path: Path) -> Path:
    """Write ``y,x_0,...,x_{d-1}`` with 17 significant digits."""
    header = ["y"] + [f"x_{j}" for j in range(data.d)]
    rows = ([int(label)] + [format_float(v) for v in row] for row, label in zip(data.x, data.y))
    written = write_csv_atomic(path, header, rows)
    logger.info(f"Wrote dataset with {data.n} samples to {written}")
    return written


def import_dataset_csv(path: Path, seed: int) -> Dataset:
    """Read a dataset written by :func:`export_dataset_csv`."""
    records = read_csv(path)
    if not records:
        raise DomainError(f"Dataset file {path} has no rows")
    d = len(records[0]) - 1
    y = np.array([int(r["y"]) for r in records], dtype=np.int8)
    x = np.array([[float(r[f"x_{j}"]) for j in range(d)] for r in records], dtype=np.float64)
    return Dataset(x=x, y=y, seed=seed)
