"""
Choice problems on which the time and ensemble approaches predict opposite
choices.

Adjusting times: pay the lottery's amount for certain at a time strictly
between the effective time and the expected time. The time approach then
prefers the certain payment and the ensemble approach the lottery.

Adjusting amounts: pay a scaled amount for certain at the expected time. The
time approach prefers the certain payment iff the ratio exceeds 1; the
ensemble approach still prefers the lottery while the ratio stays below
⟨g⟩·⟨t⟩/Δx.
"""

from timelottery.errors import EmptyIntervalError, ValidationError
from timelottery.logger import logger
from timelottery.lottery import effective_time, ensemble_growth
from timelottery.models import Approach, BinaryTimeLottery, DesignedPair, TimedPayment
from timelottery.numeric import Number, coerce, one
from timelottery.preference import compare


def _require_risky(tl: BinaryTimeLottery) -> None:
    if tl.is_degenerate():
        raise EmptyIntervalError(
            f"A degenerate lottery (t1={tl.t1}, t2={tl.t2}, p={tl.p}) has no disagreement window"
        )


def _designed_pair(tl: BinaryTimeLottery, riskless: TimedPayment) -> DesignedPair:
    by_time = compare(tl, riskless, Approach.TIME)
    by_ensemble = compare(tl, riskless, Approach.ENSEMBLE)
    disagree = (
        by_time.is_strict
        and by_ensemble.is_strict
        and by_time.relation is not by_ensemble.relation
    )
    return DesignedPair(
        risky=tl,
        riskless=riskless,
        prediction_time=by_time,
        prediction_ensemble=by_ensemble,
        disagree=disagree,
    )


def disagreement_interval(tl: BinaryTimeLottery) -> tuple[Number, Number]:
    """Open interval (effective time, ⟨t⟩) of riskless payment times that split the approaches."""
    _require_risky(tl)
    return effective_time(tl), tl.expected_time()


def design_adjust_times(tl: BinaryTimeLottery, placement: Number = 0.5) -> DesignedPair:
    placement = coerce(placement, tl.mode)
    if not 0 < placement < 1:
        raise ValidationError(f"Placement must lie strictly inside (0, 1), got {placement}")
    t_lo, t_hi = disagreement_interval(tl)
    riskless = TimedPayment(
        tl.amount, t_lo + placement * (t_hi - t_lo), unit=tl.unit, mode=tl.mode
    )
    pair = _designed_pair(tl, riskless)
    if not pair.disagree:
        logger.warning(
            f"[Design] Predictions tie at t_TP={riskless.time}; the window is too narrow for this mode"
        )
    logger.debug(f"[Design] Adjusted times: riskless payment at {riskless.time}")
    return pair


def amount_ratio_window(tl: BinaryTimeLottery) -> tuple[Number, Number]:
    """Open range of amount ratios on which the approaches disagree; the upper end is 1/kunstgriff factor."""
    _require_risky(tl)
    return one(tl.mode), ensemble_growth(tl) * tl.expected_time() / tl.amount


def design_adjust_amounts(tl: BinaryTimeLottery, amount_ratio: Number) -> DesignedPair:
    amount_ratio = coerce(amount_ratio, tl.mode)
    if amount_ratio <= 0:
        raise ValidationError(f"Amount ratio must be > 0, got {amount_ratio}")
    if amount_ratio == 1:
        raise ValidationError("Amount ratio 1 leaves the time approach indifferent")
    _require_risky(tl)
    riskless = TimedPayment(
        amount_ratio * tl.amount, tl.expected_time(), unit=tl.unit, mode=tl.mode
    )
    pair = _designed_pair(tl, riskless)
    logger.debug(
        f"[Design] Adjusted amounts: ratio {amount_ratio}, disagree={pair.disagree}"
    )
    return pair
