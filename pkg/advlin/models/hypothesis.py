"""Linear hypothesis f(x) = <theta, x> + b."""
from dataclasses import dataclass

import numpy as np

from advlin.errors import DomainError


@dataclass(frozen=True, eq=False)
class LinearHypothesis:
    """Parameter vector theta and bias b (0 unless the bias is learned)."""

    theta: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64, copy=True)
        if theta.ndim != 1 or theta.shape[0] < 1:
            raise DomainError(f"theta must be a non-empty vector, got shape {theta.shape}")
        if not np.all(np.isfinite(theta)) or not np.isfinite(self.b):
            raise DomainError("theta and b must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "b", float(self.b))

    @property
    def d(self) -> int:
        return int(self.theta.shape[0])

    def decision_values(self, x: np.ndarray) -> np.ndarray:
        """f(x) for a single vector or each row of a matrix."""
        return np.asarray(x, dtype=np.float64) @ self.theta + self.b

    def __repr__(self):
        return f"<LinearHypothesis(d={self.d}, mean_theta={float(self.theta.mean()):.6g}, b={self.b:.6g})>"
