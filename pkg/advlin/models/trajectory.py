"""Exact trajectories of the expected-gradient recurrence."""
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import List, Sequence

from advlin.errors import DomainError


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Iterates theta^0, theta^1, ..., theta^k held as integer numerators over one denominator.

    ``numerators[i] / scale`` is the exact value of theta^i. Any sign test or
    comparison against a multiple of ``1/scale`` is exact integer arithmetic.
    """

    numerators: Sequence[int]
    scale: int
    _values: List[Fraction] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError(f"Denominator must be positive, got {self.scale}")
        object.__setattr__(self, "numerators", tuple(self.numerators))

    @classmethod
    def from_values(cls, values: Sequence[Fraction]) -> "Trajectory":
        """Build from Fractions, choosing the lcm of their denominators as the scale."""
        scale = 1
        for value in values:
            scale = lcm(scale, Fraction(value).denominator)
        return cls(numerators=[int(Fraction(v) * scale) for v in values], scale=scale)

    @property
    def values(self) -> List[Fraction]:
        """The iterates as reduced Fractions."""
        if self._values is None:
            object.__setattr__(self, "_values", [Fraction(n, self.scale) for n in self.numerators])
        return self._values

    def __len__(self) -> int:
        return len(self.numerators)

    def __getitem__(self, index: int) -> Fraction:
        return Fraction(self.numerators[index], self.scale)

    def suffix(self, start: int) -> "Trajectory":
        return Trajectory(numerators=self.numerators[start:], scale=self.scale)

    def __repr__(self):
        return f"<Trajectory(length={len(self)}, scale={self.scale})>"
