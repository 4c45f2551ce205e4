"""Experiment request schema shared by the command line and the experiment services."""
import enum
from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field


class ExperimentKind(str, enum.Enum):
    """Subcommand enumeration."""
    BAYES = "bayes"
    DYNAMICS = "dynamics"
    SIGN_COUNTS = "sign-counts"
    TRAIN_100D = "train-100d"
    INTERCEPT = "intercept"


class ExperimentSpec(BaseModel):
    """A fully resolved experiment request."""

    model_config = ConfigDict(frozen=True)

    kind: ExperimentKind
    params: Dict[str, Any] = Field(default_factory=dict)
    out_dir: Path
    seed: int = Field(ge=0)
    jobs: int = Field(default=1, ge=1)
    manifest: bool = False


class ExperimentResult(BaseModel):
    """Files written by an experiment and whether its checks passed."""

    files: List[Path] = Field(default_factory=list)
    passed: bool = True
    summary: Dict[str, Any] = Field(default_factory=dict)
