"""Error function and standard normal CDF used by the Bayes-error formulas."""
import math

from scipy import integrate

from advlin.errors import DomainError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)

# Series below this magnitude, continued fraction above
SERIES_CUTOFF = 3.0
# erf(x) is 1 to far below double precision past this point
ERF_SATURATION = 8.0
# erfc(x) underflows past this point
ERFC_UNDERFLOW = 27.0

_SERIES_TERMS = 120
_CF_MAX_TERMS = 500
_CF_TINY = 1e-300


def _require_finite(x: float) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise DomainError(f"Argument must be finite, got {x!r}")
    return value


def _erf_series(x: float) -> float:
    """erf(x) for 0 <= x < SERIES_CUTOFF from the all-positive-terms series."""
    x2 = x * x
    term = x
    total = x
    for n in range(1, _SERIES_TERMS):
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if term < total * 1e-17:
            break
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_continued_fraction(x: float) -> float:
    """erfc(x) for x >= SERIES_CUTOFF by the modified Lentz method."""
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    f = x
    c = x
    d = 0.0
    for k in range(1, _CF_MAX_TERMS):
        a = 0.5 * k
        d = x + a * d
        if d == 0.0:
            d = _CF_TINY
        c = x + a / c
        if c == 0.0:
            c = _CF_TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return _INV_SQRT_PI * math.exp(-x * x) / f


def erf(x: float) -> float:
    """
    Error function.

    Args:
        x: Finite real argument

    Returns:
        erf(x), with erf(-x) == -erf(x) exactly and +-1 for |x| >= 8

    Raises:
        DomainError: If x is not finite
    """
    value = _require_finite(x)
    magnitude = abs(value)
    if magnitude >= ERF_SATURATION:
        result = 1.0
    elif magnitude < SERIES_CUTOFF:
        result = _erf_series(magnitude)
    else:
        result = 1.0 - _erfc_continued_fraction(magnitude)
    return -result if value < 0 else result


def erfc(x: float) -> float:
    """
    Complementary error function, accurate in the upper tail.

    Raises:
        DomainError: If x is not finite
    """
    value = _require_finite(x)
    if value < 0:
        return 1.0 + erf(-value)
    if value < SERIES_CUTOFF:
        return 1.0 - _erf_series(value)
    if value >= ERFC_UNDERFLOW:
        return 0.0
    return _erfc_continued_fraction(value)


def phi(x: float) -> float:
    """
    Standard normal cumulative distribution function.

    Args:
        x: Finite real argument

    Returns:
        Phi(x) = 1/2 (1 + erf(x / sqrt(2))), evaluated through erfc for tail accuracy

    Raises:
        DomainError: If x is not finite
    """
    value = _require_finite(x)
    return 0.5 * erfc(-value / math.sqrt(2.0))


def erf_oracle(x: float, tol: float) -> float:
    """
    erf(x) by adaptive quadrature of (2/sqrt(pi)) * integral_0^x exp(-t^2) dt.

    Only used to validate :func:`erf`.

    Args:
        x: Finite real argument
        tol: Absolute tolerance handed to the quadrature

    Returns:
        Quadrature estimate of erf(x)

    Raises:
        DomainError: If x is not finite or tol <= 0
    """
    value = _require_finite(x)
    if not tol > 0:
        raise DomainError(f"Tolerance must be positive, got {tol!r}")
    if value == 0.0:
        return 0.0
    integral, _ = integrate.quad(
        lambda t: math.exp(-t * t),
        0.0,
        value,
        epsabs=tol,
        epsrel=tol,
        limit=200
    )
    return _TWO_OVER_SQRT_PI * integral
