"""Common schema types shared across modules."""
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BeforeValidator, Field, PlainSerializer

from advlin.errors import DomainError


def to_fraction(value: Any) -> Fraction:
    """
    Coerce ints, strings such as ``"3/2"`` or ``"0.001"``, and Fractions to a Fraction.

    Floats are accepted through their decimal representation, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"Not a rational number: {value!r}") from e
    raise DomainError(f"Not a rational number: {value!r}")


# Probability values: test accuracies, Bayes errors
Probability = Annotated[float, Field(ge=0.0, le=1.0)]

# Exact rational parameter; serialized as "num/den"
Rational = Annotated[Fraction, BeforeValidator(to_fraction), PlainSerializer(lambda v: str(v), return_type=str)]
