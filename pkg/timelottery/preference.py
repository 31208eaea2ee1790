"""
Growth-optimal preferences over time lotteries.

A decision maker prefers the lottery with the higher scalar growth rate, where
the scalar is the time-average rate or the ensemble-average rate depending on
the approach. Indifference is exact in exact mode and a 1e-9 relative
tolerance in float mode, which is a practical rather than axiomatic relation:
tolerance-based indifference is not transitive.
"""

from timelottery.errors import DegenerateOrderingError, ValidationError
from timelottery.logger import logger
from timelottery.lottery import (
    LotteryLike,
    as_lottery,
    check_compatible,
    degenerate_of,
    ensemble_growth,
    mix,
    time_growth,
)
from timelottery.models import (
    Approach,
    BinaryTimeLottery,
    IndependenceReport,
    PreferenceOutcome,
    Relation,
    RiskClass,
)
from timelottery.numeric import Number, NumericMode, coerce, rates_equal


def growth_rate(lottery: LotteryLike, approach: Approach) -> Number:
    if approach is Approach.TIME:
        return time_growth(lottery)
    return ensemble_growth(lottery)


def order_rates(g_first: Number, g_second: Number, mode: NumericMode) -> PreferenceOutcome:
    if rates_equal(g_first, g_second, mode):
        relation = Relation.INDIFFERENT
    elif g_first > g_second:
        relation = Relation.PREFERS_FIRST
    else:
        relation = Relation.PREFERS_SECOND
    return PreferenceOutcome(relation=relation, g_first=g_first, g_second=g_second)


def compare(a: LotteryLike, b: LotteryLike, approach: Approach) -> PreferenceOutcome:
    a, b = as_lottery(a), as_lottery(b)
    check_compatible(a, b)
    return order_rates(growth_rate(a, approach), growth_rate(b, approach), a.mode)


def classify_pair(tl: BinaryTimeLottery, approach: Approach) -> RiskClass:
    """
    Risk attitude predicted by the approach: the lottery against its degenerate twin.

    A forced choice under indifference is not resolved; it stays RNTL.
    """
    outcome = compare(tl, degenerate_of(tl), approach)
    if outcome.relation is Relation.INDIFFERENT:
        return RiskClass.RNTL
    if outcome.relation is Relation.PREFERS_FIRST:
        return RiskClass.RSTL
    return RiskClass.RATL


def continuity_weight(
    a: LotteryLike, b: LotteryLike, c: LotteryLike, approach: Approach
) -> Number:
    """
    Weight θ with θ·a + (1−θ)·c indifferent to b, for a ⪯ b ⪯ c and a ≺ c.

    The ensemble rate is linear in θ, so θ = (g_c − g_b)/(g_c − g_a). The time
    rate of the mixture is (θΔx_a + (1−θ)Δx_c)/(θ⟨t_a⟩ + (1−θ)⟨t_c⟩), which
    is solved for the value g_b in closed form.
    """
    a, b, c = as_lottery(a), as_lottery(b), as_lottery(c)
    check_compatible(a, b)
    check_compatible(b, c)
    mode = a.mode
    g_a, g_b, g_c = (growth_rate(x, approach) for x in (a, b, c))

    if rates_equal(g_a, g_c, mode):
        raise DegenerateOrderingError(
            f"Continuity needs a strictly worse than c, got g_a={g_a}, g_c={g_c}"
        )
    if (
        order_rates(g_a, g_b, mode).relation is Relation.PREFERS_FIRST
        or order_rates(g_b, g_c, mode).relation is Relation.PREFERS_FIRST
    ):
        raise ValidationError(
            f"Continuity needs a ⪯ b ⪯ c, got rates {g_a}, {g_b}, {g_c}"
        )

    if approach is Approach.ENSEMBLE:
        theta = (g_c - g_b) / (g_c - g_a)
    else:
        dx_a, t_a = a.expected_amount(), a.expected_time()
        dx_b, t_b = b.expected_amount(), b.expected_time()
        dx_c, t_c = c.expected_amount(), c.expected_time()
        theta = (dx_c * t_b - t_c * dx_b) / (t_b * (dx_c - dx_a) + dx_b * (t_a - t_c))

    if mode is NumericMode.FLOAT:
        theta = min(max(theta, 0.0), 1.0)
    logger.debug(f"[Preference] Continuity weight ({approach.value}): θ={theta}")
    return theta


def independence_threshold(
    a: LotteryLike, b: LotteryLike, c: LotteryLike
) -> Number | None:
    """
    Time approach only: for a ≺ b, the weight θ* at or below which
    θ·b + (1−θ)·c fails to beat θ·a + (1−θ)·c, or None when no θ in (0, 1] fails.

    The mixture ordering reduces to θ·D + (1−θ)·E < 0 with
    D = Δx_a⟨t_b⟩ − Δx_b⟨t_a⟩ (negative because a ≺ b) and
    E = ⟨t_c⟩(Δx_a − Δx_b) + Δx_c(⟨t_b⟩ − ⟨t_a⟩). It fails only when E > 0.
    """
    a, b, c = as_lottery(a), as_lottery(b), as_lottery(c)
    dx_a, t_a = a.expected_amount(), a.expected_time()
    dx_b, t_b = b.expected_amount(), b.expected_time()
    dx_c, t_c = c.expected_amount(), c.expected_time()
    d = dx_a * t_b - dx_b * t_a
    e = t_c * (dx_a - dx_b) + dx_c * (t_b - t_a)
    if e <= 0:
        return None
    return e / (e - d)


def independence_check(
    a: LotteryLike,
    b: LotteryLike,
    c: LotteryLike,
    theta: Number,
    approach: Approach,
) -> IndependenceReport:
    a, b, c = as_lottery(a), as_lottery(b), as_lottery(c)
    check_compatible(a, b)
    check_compatible(b, c)
    mode = a.mode
    theta = coerce(theta, mode)
    if not 0 < theta <= 1:
        raise ValidationError(f"Independence weight must lie in (0, 1], got {theta}")
    if compare(a, b, approach).relation is not Relation.PREFERS_SECOND:
        raise ValidationError("Independence check needs a strictly worse than b")

    g_mix_ab = growth_rate(mix(a, c, theta), approach)
    g_mix_cb = growth_rate(mix(b, c, theta), approach)
    holds = order_rates(g_mix_cb, g_mix_ab, mode).relation is Relation.PREFERS_FIRST
    threshold = independence_threshold(a, b, c) if approach is Approach.TIME else None

    if not holds:
        logger.debug(
            f"[Preference] Independence violated at θ={theta}: {g_mix_ab} vs {g_mix_cb}"
        )
    return IndependenceReport(
        holds=holds,
        theta=theta,
        g_mix_ab=g_mix_ab,
        g_mix_cb=g_mix_cb,
        triple=(a, b, c),
        approach=approach,
        threshold=threshold,
    )
