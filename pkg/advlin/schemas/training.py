"""Loss, attack and training-run schemas."""
import enum
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from advlin.errors import DomainError
from advlin.schemas.common import Probability
from advlin.schemas.dynamics import SignCensus


class LossVariant(str, enum.Enum):
    """Loss function enumeration."""
    LINEAR = "linear"
    CROSS_ENTROPY = "cross_entropy"
    HINGE = "hinge"


SUPPORTED_HINGE_MARGINS = (0.0, 1.0)


class LossKind(BaseModel):
    """
    Tagged loss choice.

    Linear is -y f, CrossEntropy the binary logistic loss log(1 + exp(-y f)),
    Hinge(m) is max(0, m - y f) with m in {0, 1}.
    """

    model_config = ConfigDict(frozen=True)

    variant: LossVariant
    margin: float = 0.0

    @model_validator(mode="after")
    def validate_margin(self) -> "LossKind":
        if self.variant == LossVariant.HINGE:
            if self.margin not in SUPPORTED_HINGE_MARGINS:
                raise ValueError(f"Hinge margin must be 0 or 1, got {self.margin}")
        elif self.margin != 0.0:
            raise ValueError(f"Margin only applies to the hinge loss, not {self.variant.value}")
        return self

    @classmethod
    def linear(cls) -> "LossKind":
        return cls(variant=LossVariant.LINEAR)

    @classmethod
    def cross_entropy(cls) -> "LossKind":
        return cls(variant=LossVariant.CROSS_ENTROPY)

    @classmethod
    def hinge(cls, margin: float = 1.0) -> "LossKind":
        return cls(variant=LossVariant.HINGE, margin=margin)

    @classmethod
    def parse(cls, token: str) -> "LossKind":
        """Parse a command-line token: ``linear``, ``xent``, ``hinge0`` or ``hinge1``."""
        parsers = {
            "linear": cls.linear,
            "xent": cls.cross_entropy,
            "cross-entropy": cls.cross_entropy,
            "hinge0": lambda: cls.hinge(0.0),
            "hinge1": lambda: cls.hinge(1.0),
        }
        try:
            return parsers[token.strip().lower()]()
        except KeyError as e:
            raise DomainError(
                f"Unknown loss {token!r}; expected one of linear, xent, hinge0, hinge1"
            ) from e

    @property
    def token(self) -> str:
        if self.variant == LossVariant.LINEAR:
            return "linear"
        if self.variant == LossVariant.CROSS_ENTROPY:
            return "xent"
        return f"hinge{int(self.margin)}"


class AttackBudget(BaseModel):
    """l-infinity perturbation radius."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(ge=0, allow_inf_nan=False)


class StreamingMode(BaseModel):
    """A fresh sample per iteration."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["streaming"] = "streaming"
    iterations: int = Field(ge=1)
    n_test: int = Field(default=0, ge=0, description="Fresh test samples for the final accuracy (0: skip)")


class EpochMode(BaseModel):
    """Fixed train/test sets, single-sample updates over shuffled epochs."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["epochs"] = "epochs"
    n_train: int = Field(ge=1)
    n_test: int = Field(ge=1)
    epochs: int = Field(ge=1)


class FullBatchMode(BaseModel):
    """Label-balanced training set, one gradient step over the whole set per step."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["full_batch"] = "full_batch"
    n_train: int = Field(ge=2)
    n_test: int = Field(ge=1)
    steps: int = Field(ge=1)

    @field_validator("n_train")
    @classmethod
    def validate_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError("n_train must be even for label-balanced batches")
        return v


TrainMode = Annotated[Union[StreamingMode, EpochMode, FullBatchMode], Field(discriminator="kind")]


class TrainConfig(BaseModel):
    """All knobs of a training run."""

    model_config = ConfigDict(frozen=True)

    eta: float = Field(gt=0, allow_inf_nan=False, description="Learning rate")
    epsilon: float = Field(ge=0, allow_inf_nan=False, description="Attack budget")
    loss: LossKind
    mode: TrainMode
    seed: int = Field(ge=0)
    init_sigma: float = Field(default=1.0, gt=0, description="Scale of the Gaussian theta initialisation")
    learn_bias: bool = False
    shuffle: bool = True
    verify_updates: bool = Field(default=False, description="Cross-check each linear-loss update")
    track_robust_accuracy: bool = False


class RunStats(BaseModel):
    """Record of a training run."""

    mode: str
    per_step_sign_counts: List[SignCensus] = Field(default_factory=list)
    theta_trace: List[float] = Field(default_factory=list)
    per_epoch_mean_theta: List[float] = Field(default_factory=list)
    per_epoch_test_accuracy: List[Probability] = Field(default_factory=list)
    per_epoch_robust_accuracy: List[Probability] = Field(default_factory=list)
    per_epoch_bias: List[float] = Field(default_factory=list)
    per_step_accuracy: List[Probability] = Field(default_factory=list)
    bias_history: List[float] = Field(default_factory=list)
    final_theta: List[float]
    final_bias: float = 0.0
    initial_bias: float = 0.0
    final_test_accuracy: Optional[Probability] = None
    boundary: Optional[float] = None


class AgreementReport(BaseModel):
    """Mean and standard error of theta^k over seeded streaming runs."""

    steps: int
    n_runs: int
    mean: List[float]
    stderr: List[float]
