"""Gaussian data model schemas."""
import math
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class GaussianModel(BaseModel):
    """Symmetric two-class model: y uniform on {-1, +1}, x | y ~ N(y mu, sigma^2 I)."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, description="Dimension")
    mu: List[float] = Field(description="Class mean for y = +1, one positive entry per dimension")
    sigma: float = Field(gt=0, description="Shared isotropic standard deviation")

    @model_validator(mode="after")
    def validate_means(self) -> "GaussianModel":
        if len(self.mu) != self.d:
            raise ValueError(f"mu has {len(self.mu)} entries, expected d={self.d}")
        if not all(math.isfinite(m) and m > 0 for m in self.mu):
            raise ValueError("Every mu_j must be finite and > 0")
        if not math.isfinite(self.sigma):
            raise ValueError("sigma must be finite")
        return self

    @classmethod
    def isotropic(cls, d: int, mu: float = 1.0, sigma: float = 1.0) -> "GaussianModel":
        """Model with every mu_j equal to ``mu``."""
        return cls(d=d, mu=[float(mu)] * d, sigma=sigma)

    @property
    def mu_array(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=np.float64)

    @property
    def has_equal_means(self) -> bool:
        return all(m == self.mu[0] for m in self.mu)


class ShiftedModel(BaseModel):
    """Shifted-mean model: x | y=+1 ~ N(mu1, sigma^2 I), x | y=-1 ~ N(mu2, sigma^2 I)."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, description="Dimension")
    mu1: List[float] = Field(description="Class mean for y = +1")
    mu2: List[float] = Field(description="Class mean for y = -1")
    sigma: float = Field(gt=0, description="Shared isotropic standard deviation")

    @model_validator(mode="after")
    def validate_means(self) -> "ShiftedModel":
        if len(self.mu1) != self.d or len(self.mu2) != self.d:
            raise ValueError(f"mu1 and mu2 must have d={self.d} entries")
        for m1, m2 in zip(self.mu1, self.mu2):
            if not (math.isfinite(m1) and math.isfinite(m2) and 0 < m2 < m1):
                raise ValueError("Means must satisfy 0 < mu2_j < mu1_j componentwise")
        if not math.isfinite(self.sigma):
            raise ValueError("sigma must be finite")
        return self

    @classmethod
    def isotropic(cls, d: int, mu1: float, mu2: float, sigma: float) -> "ShiftedModel":
        return cls(d=d, mu1=[float(mu1)] * d, mu2=[float(mu2)] * d, sigma=sigma)

    @property
    def mu1_array(self) -> np.ndarray:
        return np.asarray(self.mu1, dtype=np.float64)

    @property
    def mu2_array(self) -> np.ndarray:
        return np.asarray(self.mu2, dtype=np.float64)
