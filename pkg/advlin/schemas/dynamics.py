"""Schemas for the expected-gradient recurrence and its checks."""
import enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from advlin.schemas.common import Rational


class SignCensus(BaseModel):
    """Counts of positive, negative and zero parameter values."""

    positive: int = Field(default=0, ge=0)
    negative: int = Field(default=0, ge=0)
    zero: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return self.positive + self.negative + self.zero


class RecurrenceParams(BaseModel):
    """Learning rate, class mean and attack budget of the expected recurrence."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eta: Rational
    mu: Rational
    epsilon: Rational

    @model_validator(mode="after")
    def validate_signs(self) -> "RecurrenceParams":
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        return self

    @property
    def negative_increment(self):
        """Step taken from a negative iterate: eta (mu + eps)."""
        return self.eta * (self.mu + self.epsilon)

    @property
    def zero_increment(self):
        """Step taken from zero: eta mu."""
        return self.eta * self.mu

    @property
    def positive_increment(self):
        """Step taken from a positive iterate: eta (mu - eps)."""
        return self.eta * (self.mu - self.epsilon)

    def label(self) -> str:
        return f"eta={self.eta},mu={self.mu},epsilon={self.epsilon}"


class VerdictStatus(str, enum.Enum):
    """Outcome of a proposition check."""
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


class Verdict(BaseModel):
    """Result of a proposition check on a trajectory."""

    check: str
    status: VerdictStatus
    index: Optional[int] = Field(default=None, description="First negative index, or the violating index")
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == VerdictStatus.PASS

    @property
    def failed(self) -> bool:
        return self.status == VerdictStatus.FAIL


class CycleReport(BaseModel):
    """Exact cycle of the recurrence: theta^(preperiod + period) == theta^preperiod."""

    period: int = Field(ge=1)
    preperiod: int = Field(ge=0)


class GridRow(BaseModel):
    """All checks for one (eta, mu, epsilon) triple."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: RecurrenceParams
    attraction: Verdict
    next_is_pos: Verdict
    consecutive_pos: Verdict
    oscillation: Verdict
    census: SignCensus
    census_majority: bool

    @property
    def failed(self) -> bool:
        return any(v.failed for v in (self.attraction, self.next_is_pos, self.consecutive_pos, self.oscillation))
