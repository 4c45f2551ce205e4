"""
Losses for linear hypotheses and the exact l-infinity inner maximization.

Every supported loss is a nonincreasing function of the margin m = y f(x), so
the worst l-infinity perturbation is the corner delta = -eps * y * sign(theta),
which lowers the margin by exactly eps * ||theta||_1. sign(0) is 0 throughout:
a zero coordinate gives the adversary nothing to first order.
"""
from typing import Tuple, Union

import math

import numpy as np
from scipy import special

from advlin.errors import DomainError
from advlin.models.dataset import Dataset, LabeledSample
from advlin.models.hypothesis import LinearHypothesis
from advlin.schemas.training import AttackBudget, LossKind, LossVariant

Budget = Union[AttackBudget, float]


def _epsilon(eps: Budget) -> float:
    value = eps.epsilon if isinstance(eps, AttackBudget) else float(eps)
    if not np.isfinite(value) or value < 0:
        raise DomainError(f"Attack budget must be finite and >= 0, got {value!r}")
    return value


def _check_dims(h: LinearHypothesis, s: LabeledSample) -> None:
    if s.d != h.d:
        raise DomainError(f"Dimension mismatch: theta has {h.d} entries, x has {s.d}")


def margin_loss(kind: LossKind, m):
    """Loss as a function of the margin m = y f(x); accepts scalars or arrays."""
    m = np.asarray(m, dtype=np.float64)
    if kind.variant == LossVariant.LINEAR:
        return -m
    if kind.variant == LossVariant.CROSS_ENTROPY:
        # log(1 + exp(-m)) without overflow for |m| in the hundreds
        return np.logaddexp(0.0, -m)
    return np.maximum(0.0, kind.margin - m)


def margin_derivative(kind: LossKind, m):
    """d loss / d margin; the hinge subgradient is 0 at the kink."""
    m = np.asarray(m, dtype=np.float64)
    if kind.variant == LossVariant.LINEAR:
        return np.full_like(m, -1.0)
    if kind.variant == LossVariant.CROSS_ENTROPY:
        return -special.expit(-m)
    return np.where(m < kind.margin, -1.0, 0.0)


def margin_slope(kind: LossKind, m: float) -> float:
    """Scalar form of :func:`margin_derivative` for the per-sample training loop."""
    if kind.variant == LossVariant.LINEAR:
        return -1.0
    if kind.variant == LossVariant.CROSS_ENTROPY:
        if m >= 0.0:
            e = math.exp(-m)
            return -e / (1.0 + e)
        return -1.0 / (1.0 + math.exp(m))
    return -1.0 if m < kind.margin else 0.0


def sample_gradient(
    kind: LossKind,
    theta: np.ndarray,
    b: float,
    x: np.ndarray,
    y: int,
    eps: float
) -> Tuple[np.ndarray, float]:
    """
    Adversarial gradient on raw arrays, without validation.

    The derivative of the attacked margin y <theta, x + delta*> + y b is
    y x - eps sign(theta) for theta and y for b.
    """
    sign_theta = np.sign(theta)
    direction = y * x - eps * sign_theta
    adv_margin = y * (float(theta @ x) + b) - eps * float(np.abs(theta).sum())
    slope = margin_slope(kind, adv_margin)
    return slope * direction, float(slope * y)


def batch_adversarial_gradient(
    kind: LossKind,
    theta: np.ndarray,
    b: float,
    x: np.ndarray,
    y: np.ndarray,
    eps: float
) -> Tuple[np.ndarray, float]:
    """
    Mean adversarial gradient over a batch (rows of x).

    Returns:
        Tuple of (grad_theta, grad_b)
    """
    y = np.asarray(y, dtype=np.float64)
    sign_theta = np.sign(theta)
    adv_margin = y * (x @ theta + b) - eps * float(np.abs(theta).sum())
    slope = margin_derivative(kind, adv_margin)
    directions = y[:, None] * x - eps * sign_theta[None, :]
    grad_theta = (slope[:, None] * directions).mean(axis=0)
    grad_b = float(np.mean(slope * y))
    return grad_theta, grad_b


def loss_value(kind: LossKind, h: LinearHypothesis, s: LabeledSample) -> float:
    """
    Clean loss of hypothesis h on sample s.

    Raises:
        DomainError: On dimension mismatch
    """
    _check_dims(h, s)
    margin = s.y * (float(h.theta @ s.x) + h.b)
    return float(margin_loss(kind, margin))


def worst_case_perturbation(
    kind: LossKind,
    h: LinearHypothesis,
    s: LabeledSample,
    eps: Budget
) -> np.ndarray:
    """
    Exact maximizer of the loss over the l-infinity ball of radius eps.

    Returns:
        delta with delta_j = -eps * y * sign(theta_j)

    Raises:
        DomainError: If eps < 0 or dimensions disagree
    """
    epsilon = _epsilon(eps)
    _check_dims(h, s)
    return -epsilon * s.y * np.sign(h.theta)


def adversarial_loss(
    kind: LossKind,
    h: LinearHypothesis,
    s: LabeledSample,
    eps: Budget
) -> float:
    """
    max over ||delta||_inf <= eps of the loss at x + delta.

    For the linear loss with b = 0 this is -y <theta, x> + eps ||theta||_1.
    """
    epsilon = _epsilon(eps)
    _check_dims(h, s)
    margin = s.y * (float(h.theta @ s.x) + h.b) - epsilon * float(np.abs(h.theta).sum())
    return float(margin_loss(kind, margin))


def adversarial_gradient(
    kind: LossKind,
    h: LinearHypothesis,
    s: LabeledSample,
    eps: Budget
) -> Tuple[np.ndarray, float]:
    """
    Gradient of the adversarial loss with respect to theta and b.

    The worst-case perturbation is held fixed (chain rule through delta*).
    Linear: grad_theta_j = -y x_j + eps sign(theta_j), grad_b = -y.

    Returns:
        Tuple of (grad_theta, grad_b)

    Raises:
        DomainError: If eps < 0 or dimensions disagree
    """
    epsilon = _epsilon(eps)
    _check_dims(h, s)
    return sample_gradient(kind, h.theta, h.b, s.x, s.y, epsilon)


def robust_accuracy(h: LinearHypothesis, data: Dataset, eps: Budget) -> float:
    """
    Fraction of samples still classified correctly after the worst-case perturbation.

    Raises:
        DomainError: If the dataset is empty or dimensions disagree
    """
    epsilon = _epsilon(eps)
    if data.n == 0:
        raise DomainError("Cannot evaluate on an empty dataset")
    if data.d != h.d:
        raise DomainError(f"Dimension mismatch: theta has {h.d} entries, x has {data.d}")
    y = data.y.astype(np.float64)
    attacked = data.x @ h.theta + h.b - epsilon * y * float(np.abs(h.theta).sum())
    predictions = np.where(attacked >= 0.0, 1, -1)
    return float(np.mean(predictions == data.y))
