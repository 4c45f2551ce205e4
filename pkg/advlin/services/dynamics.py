"""
Expected-gradient recurrence in exact rational arithmetic, and checks of its properties.

theta -> theta + eta (mu + eps)   if theta < 0
theta -> theta + eta mu           if theta = 0
theta -> theta + eta (mu - eps)   if theta > 0

Trajectories are integer numerators over one denominator chosen so that every
increment is an integer multiple of it; each step is then a single int add.
"""
import logging
import math
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from advlin.config import settings
from advlin.errors import DomainError
from advlin.models.trajectory import Trajectory
from advlin.schemas.common import to_fraction
from advlin.schemas.dynamics import (
    CycleReport,
    GridRow,
    RecurrenceParams,
    SignCensus,
    Verdict,
    VerdictStatus,
)
from advlin.utils.artifacts import format_float, write_csv_atomic

logger = logging.getLogger(__name__)

# Grid behind the proposition suite: 4 x 3 x 9 = 108 triples
DEFAULT_GRID_ETAS = (Fraction(1, 1000), Fraction(1, 100), Fraction(1, 10), Fraction(1, 2))
DEFAULT_GRID_MUS = (Fraction(1, 2), Fraction(1), Fraction(2))
DEFAULT_GRID_RATIOS = (
    Fraction(11, 10), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3),
    Fraction(4), Fraction(5), Fraction(7), Fraction(10),
)

CENSUS_BURN_IN = 100


class RecurrenceStepper:
    """
    Integer form of the recurrence for one parameter triple and start value.

    State n stands for n / scale. The three increments are exact integers.
    """

    def __init__(self, p: RecurrenceParams, theta0: Fraction):
        theta0 = to_fraction(theta0)
        self.p = p
        self.scale = lcm(
            theta0.denominator,
            p.negative_increment.denominator,
            p.zero_increment.denominator,
            p.positive_increment.denominator,
        )
        self.start = int(theta0 * self.scale)
        self.up_from_negative = int(p.negative_increment * self.scale)
        self.up_from_zero = int(p.zero_increment * self.scale)
        self.up_from_positive = int(p.positive_increment * self.scale)

    def step(self, n: int) -> int:
        if n < 0:
            return n + self.up_from_negative
        if n == 0:
            return n + self.up_from_zero
        return n + self.up_from_positive

    def run(self, k: int) -> List[int]:
        """Numerators of theta^0 .. theta^k."""
        states = [self.start]
        n = self.start
        neg, zero, pos = self.up_from_negative, self.up_from_zero, self.up_from_positive
        for _ in range(k):
            if n > 0:
                n += pos
            elif n < 0:
                n += neg
            else:
                n += zero
            states.append(n)
        return states


def expected_step(theta: Fraction, p: RecurrenceParams) -> Fraction:
    """
    One step of the expected recurrence.

    Args:
        theta: Current iterate
        p: Recurrence parameters

    Returns:
        Next iterate, exact
    """
    theta = to_fraction(theta)
    if theta < 0:
        return theta + p.negative_increment
    if theta == 0:
        return theta + p.zero_increment
    return theta + p.positive_increment


def simulate(theta0: Fraction, p: RecurrenceParams, k: int) -> Trajectory:
    """
    Iterate the recurrence k times from theta0.

    Returns:
        Trajectory of length k + 1 with theta0 first

    Raises:
        DomainError: If k < 1
    """
    if k < 1:
        raise DomainError(f"Number of steps must be >= 1, got {k}")
    stepper = RecurrenceStepper(p, theta0)
    return Trajectory(numerators=stepper.run(k), scale=stepper.scale)


def sign_census(t: Trajectory) -> SignCensus:
    """Count positive, negative and zero entries of a trajectory."""
    positive = sum(1 for n in t.numerators if n > 0)
    negative = sum(1 for n in t.numerators if n < 0)
    return SignCensus(positive=positive, negative=negative, zero=len(t) - positive - negative)


def _first_sign_flip(t: Trajectory) -> Optional[int]:
    """Index of the first negative entry that comes after a positive one."""
    seen_positive = False
    for i, n in enumerate(t.numerators):
        if n > 0:
            seen_positive = True
        elif n < 0 and seen_positive:
            return i
    return None


def check_attraction(p: RecurrenceParams, theta0: Fraction, horizon: int) -> Verdict:
    """
    Look for the first n >= 1 with theta^n < 0 when eps > mu.

    Returns:
        PASS with ``index`` set to that n, FAIL if the horizon runs out first,
        NOT_APPLICABLE when eps <= mu
    """
    if p.epsilon <= p.mu:
        return Verdict(
            check="attraction",
            status=VerdictStatus.NOT_APPLICABLE,
            detail=f"epsilon={p.epsilon} <= mu={p.mu}",
        )
    if horizon < 1:
        raise DomainError(f"Horizon must be >= 1, got {horizon}")
    stepper = RecurrenceStepper(p, theta0)
    n = stepper.start
    for index in range(1, horizon + 1):
        n = stepper.step(n)
        if n < 0:
            return Verdict(
                check="attraction",
                status=VerdictStatus.PASS,
                index=index,
                detail=f"theta^{index} = {Fraction(n, stepper.scale)}",
            )
    logger.warning(f"No negative iterate within {horizon} steps for {p.label()}")
    return Verdict(
        check="attraction",
        status=VerdictStatus.FAIL,
        detail=f"no negative iterate within {horizon} steps",
    )


def check_next_is_pos(t: Trajectory, p: RecurrenceParams) -> Verdict:
    """
    After the first positive-then-negative pattern, every negative is followed by a value > 2 eta mu.

    Returns:
        PASS with ``index`` at the first post-pattern negative, FAIL with the
        violating index, or NOT_APPLICABLE without such a pattern
    """
    start = _first_sign_flip(t)
    if start is None:
        return Verdict(
            check="next_is_pos",
            status=VerdictStatus.NOT_APPLICABLE,
            detail="no negative iterate after a positive one",
        )
    bound = 2 * p.eta * p.mu
    # n / scale > a / b  <=>  n * b > a * scale
    lhs_factor, rhs = bound.denominator, bound.numerator * t.scale
    numerators = t.numerators
    for i in range(start, len(numerators) - 1):
        if numerators[i] < 0 and not numerators[i + 1] * lhs_factor > rhs:
            return Verdict(
                check="next_is_pos",
                status=VerdictStatus.FAIL,
                index=i,
                detail=f"theta^{i + 1} = {t[i + 1]} is not > {bound}",
            )
    return Verdict(check="next_is_pos", status=VerdictStatus.PASS, index=start)


def s_choice(t: Fraction) -> int:
    """
    Even window length for the consecutive-positives bound.

    Returns:
        ceil(t) if it is even, else ceil(t) + 1

    Raises:
        DomainError: If t <= 1
    """
    t = to_fraction(t)
    if t <= 1:
        raise DomainError(f"t must be > 1, got {t}")
    ceiling = math.ceil(t)
    return ceiling if ceiling % 2 == 0 else ceiling + 1


def check_consecutive_pos(p: RecurrenceParams, t_bound: Fraction, trajectory: Trajectory) -> Verdict:
    """
    Every negative after the first sign flip is followed by two consecutive positives within s + 1 steps.

    For a negative at n some k with n < k and k + 1 <= n + s + 1 must have
    theta^k > 0 and theta^(k+1) > 0, where s = s_choice(t_bound). Negatives
    whose window runs past the end of the trajectory are skipped.

    Returns:
        PASS, FAIL with the violating index, or NOT_APPLICABLE unless
        mu < eps < t_bound mu
    """
    t_bound = to_fraction(t_bound)
    if t_bound <= 1 or not (p.mu < p.epsilon < t_bound * p.mu):
        return Verdict(
            check="consecutive_pos",
            status=VerdictStatus.NOT_APPLICABLE,
            detail=f"requires mu < epsilon < {t_bound} mu",
        )
    start = _first_sign_flip(trajectory)
    if start is None:
        return Verdict(
            check="consecutive_pos",
            status=VerdictStatus.NOT_APPLICABLE,
            detail="no negative iterate after a positive one",
        )
    s = s_choice(t_bound)
    numerators = trajectory.numerators
    last = len(numerators) - 1
    for n in range(start, last + 1):
        if numerators[n] >= 0:
            continue
        window_end = n + s + 1
        if window_end > last:
            break
        if not any(numerators[k] > 0 and numerators[k + 1] > 0 for k in range(n + 1, window_end)):
            return Verdict(
                check="consecutive_pos",
                status=VerdictStatus.FAIL,
                index=n,
                detail=f"no consecutive positives within {s + 1} steps of theta^{n}",
            )
    return Verdict(check="consecutive_pos", status=VerdictStatus.PASS, index=start, detail=f"s={s}")


def check_oscillation(trajectory: Trajectory, p: RecurrenceParams) -> Verdict:
    """Both signs occur in theta^2 .. theta^H when eps > mu."""
    if p.epsilon <= p.mu:
        return Verdict(
            check="oscillation",
            status=VerdictStatus.NOT_APPLICABLE,
            detail=f"epsilon={p.epsilon} <= mu={p.mu}",
        )
    tail = trajectory.numerators[2:]
    has_positive = any(n > 0 for n in tail)
    has_negative = any(n < 0 for n in tail)
    if has_positive and has_negative:
        return Verdict(check="oscillation", status=VerdictStatus.PASS)
    return Verdict(
        check="oscillation",
        status=VerdictStatus.FAIL,
        detail=f"positive={has_positive}, negative={has_negative} after step 2",
    )


def census_majority(trajectory: Trajectory, burn_in: int = CENSUS_BURN_IN) -> bool:
    """
    Whether positives outnumber negatives after discarding the first ``burn_in`` steps.

    A False result is logged as a finding; it is not a failed check.
    """
    census = sign_census(trajectory.suffix(burn_in))
    if census.positive <= census.negative:
        logger.warning(
            f"Sign census without majority after burn-in {burn_in}: "
            f"positive={census.positive}, negative={census.negative}"
        )
        return False
    return True


def detect_cycle(t0: Fraction, p: RecurrenceParams, max_steps: Optional[int] = None) -> Optional[CycleReport]:
    """
    Brent cycle detection on the exact states.

    Args:
        t0: Start value
        p: Recurrence parameters
        max_steps: Step budget for finding the period (settings default)

    Returns:
        CycleReport with theta^(preperiod + period) == theta^preperiod, or None

    Raises:
        DomainError: If max_steps < 1
    """
    if max_steps is None:
        max_steps = settings.DETECT_CYCLE_MAX_STEPS
    if max_steps < 1:
        raise DomainError(f"max_steps must be >= 1, got {max_steps}")
    stepper = RecurrenceStepper(p, t0)
    step = stepper.step

    power = period = 1
    tortoise = stepper.start
    hare = step(tortoise)
    steps = 1
    while tortoise != hare:
        if steps >= max_steps:
            return None
        if power == period:
            tortoise = hare
            power *= 2
            period = 0
        hare = step(hare)
        period += 1
        steps += 1

    tortoise = hare = stepper.start
    for _ in range(period):
        hare = step(hare)
    preperiod = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        preperiod += 1
    return CycleReport(period=period, preperiod=preperiod)


def default_t_bound(p: RecurrenceParams) -> Fraction:
    """Smallest integer t with eps < t mu."""
    return Fraction(math.floor(p.epsilon / p.mu) + 1)


def check_triple(
    p: RecurrenceParams,
    theta0: Fraction,
    horizon: int,
    t_bound: Optional[Fraction] = None
) -> GridRow:
    """Run every check on one parameter triple over one trajectory."""
    trajectory = simulate(theta0, p, horizon)
    if t_bound is None:
        t_bound = default_t_bound(p)
    return GridRow(
        params=p,
        attraction=check_attraction(p, theta0, horizon),
        next_is_pos=check_next_is_pos(trajectory, p),
        consecutive_pos=check_consecutive_pos(p, t_bound, trajectory),
        oscillation=check_oscillation(trajectory, p),
        census=sign_census(trajectory),
        census_majority=census_majority(trajectory),
    )


def grid_params(
    etas: Iterable[Fraction] = DEFAULT_GRID_ETAS,
    mus: Iterable[Fraction] = DEFAULT_GRID_MUS,
    ratios: Iterable[Fraction] = DEFAULT_GRID_RATIOS
) -> List[RecurrenceParams]:
    """All (eta, mu, ratio * mu) triples in a fixed order."""
    mus = list(mus)
    ratios = list(ratios)
    return [
        RecurrenceParams(eta=eta, mu=mu, epsilon=to_fraction(ratio) * to_fraction(mu))
        for eta in etas
        for mu in mus
        for ratio in ratios
    ]


def check_grid(
    etas: Iterable[Fraction] = DEFAULT_GRID_ETAS,
    mus: Iterable[Fraction] = DEFAULT_GRID_MUS,
    ratios: Iterable[Fraction] = DEFAULT_GRID_RATIOS,
    horizon: Optional[int] = None,
    theta0: Optional[Fraction] = None
) -> List[GridRow]:
    """
    Run the proposition suite on every triple of a parameter grid.

    Args:
        etas: Learning rates
        mus: Class means
        ratios: Values of eps / mu
        horizon: Steps per trajectory (settings default)
        theta0: Start value (settings default)

    Returns:
        One GridRow per triple, in grid order

    Raises:
        DomainError: If horizon < 1
    """
    if horizon is None:
        horizon = settings.DYNAMICS_HORIZON
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    theta0 = to_fraction(theta0 if theta0 is not None else settings.DYNAMICS_THETA0)
    rows = [check_triple(p, theta0, horizon) for p in grid_params(etas, mus, ratios)]
    failures = sum(1 for row in rows if row.failed)
    logger.info(f"Checked {len(rows)} parameter triples over {horizon} steps, {failures} failures")
    return rows


def export_trajectory_csv(t: Trajectory, path: Path) -> Path:
    """Write ``step,theta_num,theta_den,theta_float`` with reduced fractions."""
    def rows():
        for step, value in enumerate(t.values):
            yield [step, value.numerator, value.denominator, format_float(float(value))]

    written = write_csv_atomic(path, ["step", "theta_num", "theta_den", "theta_float"], rows())
    logger.info(f"Wrote trajectory with {len(t)} states to {written}")
    return written


def grid_csv_rows(rows: Sequence[GridRow]):
    """Flatten grid results for ``dynamics_grid.csv``."""
    for row in rows:
        yield [
            str(row.params.eta),
            str(row.params.mu),
            str(row.params.epsilon),
            row.attraction.status.value,
            "" if row.attraction.index is None else row.attraction.index,
            row.next_is_pos.status.value,
            row.consecutive_pos.status.value,
            row.oscillation.status.value,
            row.census.positive,
            row.census.negative,
            row.census.zero,
            int(row.census_majority),
        ]


GRID_CSV_HEADER = [
    "eta", "mu", "epsilon", "attraction", "first_negative", "next_is_pos",
    "consecutive_pos", "oscillation", "pos_count", "neg_count", "zero_count", "census_majority",
]
