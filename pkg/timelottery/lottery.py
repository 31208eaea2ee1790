"""
Growth-rate functionals over time lotteries.

``time_growth`` is the rate realised by repeating a lottery sequentially for
ever: expected payment over expected waiting time. ``ensemble_growth`` is the
probability-weighted mean of the per-outcome rates, i.e. the rate seen across
many simultaneous copies. It coincides with expected discounted utility under
linear utility and hyperbolic discounting.
"""

import itertools
from collections.abc import Iterable

from timelottery.errors import ValidationError
from timelottery.logger import logger
from timelottery.models import (
    BinaryTimeLottery,
    GeneralLottery,
    GrowthSummary,
    KunstgriffRow,
    KunstgriffSweep,
    Outcome,
    TimedPayment,
)
from timelottery.numeric import Number, NumericMode, coerce, one, total, zero

LotteryLike = GeneralLottery | BinaryTimeLottery | TimedPayment


def as_lottery(value: LotteryLike) -> GeneralLottery:
    if isinstance(value, GeneralLottery):
        return value
    if isinstance(value, (BinaryTimeLottery, TimedPayment)):
        return value.to_lottery()
    raise ValidationError(f"Expected a lottery or timed payment, got {type(value).__name__}")


def check_compatible(a: GeneralLottery, b: GeneralLottery) -> None:
    if a.unit != b.unit:
        raise ValidationError(f"Unit mismatch: '{a.unit}' vs '{b.unit}'")
    if a.mode is not b.mode:
        raise ValidationError(f"Numeric mode mismatch: {a.mode.value} vs {b.mode.value}")


def degenerate_of(lottery: BinaryTimeLottery) -> TimedPayment:
    """The riskless payment of the same amount at the expected time."""
    return TimedPayment(
        lottery.amount, lottery.expected_time(), unit=lottery.unit, mode=lottery.mode
    )


def timed_payment_growth(tp: TimedPayment) -> Number:
    return tp.amount / tp.time


def ensemble_growth(lottery: LotteryLike) -> Number:
    lottery = as_lottery(lottery)
    return total((o.prob * o.amount / o.time for o in lottery.outcomes), lottery.mode)


def time_growth(lottery: LotteryLike) -> Number:
    lottery = as_lottery(lottery)
    return lottery.expected_amount() / lottery.expected_time()


def growth_summary(lottery: LotteryLike) -> GrowthSummary:
    lottery = as_lottery(lottery)
    time_avg = time_growth(lottery)
    ensemble_avg = ensemble_growth(lottery)
    gap = ensemble_avg - time_avg
    # Jensen's inequality makes a negative gap pure float rounding.
    if lottery.mode is NumericMode.FLOAT and gap < 0:
        gap = 0.0
    return GrowthSummary(time_avg=time_avg, ensemble_avg=ensemble_avg, jensen_gap=gap)


def mix(a: LotteryLike, b: LotteryLike, theta: Number) -> GeneralLottery:
    """
    The combined lottery θ·a + (1−θ)·b.

    Branches with the same (amount, time) are merged by adding probabilities
    and zero-probability branches are dropped, so mix(a, a, θ) is a again.
    """
    a, b = as_lottery(a), as_lottery(b)
    check_compatible(a, b)
    mode = a.mode
    theta = coerce(theta, mode)
    if not 0 <= theta <= 1:
        raise ValidationError(f"Mixing weight must lie in [0, 1], got {theta}")

    weighted = [(o, theta * o.prob) for o in a.outcomes]
    weighted += [(o, (1 - theta) * o.prob) for o in b.outcomes]

    merged: list[Outcome] = []
    for outcome, prob in weighted:
        if prob == 0:
            continue
        for i, existing in enumerate(merged):
            if existing.same_payment(outcome, mode):
                merged[i] = Outcome(existing.amount, existing.time, existing.prob + prob)
                break
        else:
            merged.append(Outcome(outcome.amount, outcome.time, prob))

    return GeneralLottery(tuple(merged), unit=a.unit, mode=mode)


def effective_time(lottery: BinaryTimeLottery) -> Number:
    """Time at which growth at the ensemble-average rate would deliver the payment."""
    t1, t2, p = lottery.t1, lottery.t2, lottery.p
    if t1 == t2:
        return t1
    return t1 * t2 / (t1 + p * (t2 - t1))


def kunstgriff_factor(
    t1: Number, t2: Number, p: Number, mode: NumericMode = NumericMode.FLOAT
) -> Number:
    """
    Multiplier a wealth-only utility increment would need so that expected
    utility growth equals the time-average rate; equals ḡ/⟨g⟩.

    It depends on (t1, t2, p) and not on wealth, which is why no utility
    function can reconcile the two averages for time lotteries.
    """
    t1, t2, p = coerce(t1, mode), coerce(t2, mode), coerce(p, mode)
    if t1 <= 0 or t2 <= 0:
        raise ValidationError(f"Times must be > 0, got t1={t1}, t2={t2}")
    if not 0 <= p <= 1:
        raise ValidationError(f"Probability must lie in [0, 1], got {p}")
    if t1 == t2 or p == 0 or p == 1:
        return one(mode)
    return t1 * t2 / ((p * t1 + (1 - p) * t2) * (p * t2 + (1 - p) * t1))


def kunstgriff_sweep(
    grid: Iterable[tuple[Number, Number, Number]],
    mode: NumericMode = NumericMode.FLOAT,
) -> KunstgriffSweep:
    rows = tuple(
        KunstgriffRow(
            coerce(t1, mode), coerce(t2, mode), coerce(p, mode), kunstgriff_factor(t1, t2, p, mode)
        )
        for t1, t2, p in grid
    )
    if not rows:
        raise ValidationError("Kunstgriff sweep needs a nonempty grid")
    factors = [row.factor for row in rows]
    min_factor, max_factor = min(factors), max(factors)
    logger.debug(
        f"[Lottery] Kunstgriff sweep over {len(rows)} setups: factor in [{min_factor}, {max_factor}]"
    )
    return KunstgriffSweep(
        rows=rows,
        min_factor=min_factor,
        max_factor=max_factor,
        setup_dependent=max_factor - min_factor > zero(mode),
    )


def kunstgriff_grid(
    t1s: Iterable[Number], t2s: Iterable[Number], ps: Iterable[Number]
) -> list[tuple[Number, Number, Number]]:
    """Cartesian grid of (t1, t2, p), skipping combinations with t1 > t2."""
    return [(t1, t2, p) for t1, t2, p in itertools.product(t1s, t2s, ps) if t1 <= t2]
