"""Labeled samples and immutable datasets."""
from dataclasses import dataclass, field
from typing import Iterator, List

import numpy as np

from advlin.errors import DomainError


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """A feature vector with its label in {-1, +1}."""

    x: np.ndarray
    y: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 1:
            raise DomainError(f"x must be a vector, got shape {x.shape}")
        if self.y not in (-1, 1):
            raise DomainError(f"Label must be -1 or +1, got {self.y!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", int(self.y))

    @property
    def d(self) -> int:
        return int(self.x.shape[0])


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Seeded collection of labeled samples.

    Features are stored as a read-only ``(n, d)`` float64 array and labels as a
    read-only ``(n,)`` int8 array, so a built dataset can be shared freely.
    """

    x: np.ndarray
    y: np.ndarray
    seed: int
    _samples: List[LabeledSample] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.int8, copy=True)
        if x.ndim != 2:
            raise DomainError(f"x must have shape (n, d), got {x.shape}")
        if y.shape != (x.shape[0],):
            raise DomainError(f"y must have shape ({x.shape[0]},), got {y.shape}")
        if not np.all((y == 1) | (y == -1)):
            raise DomainError("Labels must be -1 or +1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])

    @property
    def samples(self) -> List[LabeledSample]:
        """Samples in order, materialised on first access."""
        if self._samples is None:
            built = [LabeledSample(x=row, y=int(label)) for row, label in zip(self.x, self.y)]
            object.__setattr__(self, "_samples", built)
        return self._samples

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[LabeledSample]:
        return iter(self.samples)

    def identical_to(self, other: "Dataset") -> bool:
        """Bitwise equality of features, labels and seed."""
        return (
            self.seed == other.seed
            and np.array_equal(self.y, other.y)
            and self.x.shape == other.x.shape
            and self.x.tobytes() == other.x.tobytes()
        )

    def __repr__(self):
        return f"<Dataset(n={self.n}, d={self.d}, seed={self.seed})>"
