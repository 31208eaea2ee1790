from dataclasses import replace
from fractions import Fraction

import pytest

from timelottery.axioms import LotterySampler
from timelottery.errors import DegenerateOrderingError, ValidationError
from timelottery.lottery import mix, time_growth
from timelottery.models import (
    Approach,
    BinaryTimeLottery,
    Relation,
    RiskClass,
    SamplerConfig,
    TimedPayment,
)
from timelottery.numeric import NumericMode
from timelottery.preference import (
    classify_pair,
    compare,
    continuity_weight,
    growth_rate,
    independence_check,
    independence_threshold,
)

EXACT = NumericMode.EXACT


@pytest.fixture
def counterexample():
    """a ≺ b under the time approach, and a common lottery c that reverses the mixtures."""
    return (
        BinaryTimeLottery(t1=1, t2=2, p=0.5, amount=10, mode=EXACT),
        BinaryTimeLottery(t1=0.5, t2=2, p=0.7, amount=8, mode=EXACT),
        BinaryTimeLottery(t1=2, t2=4, p=0.3, amount=2, mode=EXACT),
    )


def test_compare_lottery_with_its_degenerate_twin():
    """
    시간 접근은 복권과 대응 확정 지급을 무차별로, 앙상블 접근은 복권을 선호하는지 테스트합니다.
    """
    # given
    tl = BinaryTimeLottery(t1=1, t2=2, p=0.5, amount=10)
    tp = TimedPayment(amount=10, time=1.5)

    # when
    by_time = compare(tl, tp, Approach.TIME)
    by_ensemble = compare(tl, tp, Approach.ENSEMBLE)

    # then
    assert by_time.relation is Relation.INDIFFERENT
    assert not by_time.is_strict
    assert by_ensemble.relation is Relation.PREFERS_FIRST
    assert by_ensemble.g_first == pytest.approx(7.5)
    assert by_ensemble.g_second == pytest.approx(6.6667, abs=1e-4)


def test_compare_rejects_mixed_units_and_modes():
    """
    단위나 수치 모드가 다른 두 복권의 비교가 ValidationError 를 일으키는지 테스트합니다.
    """
    # given
    a = TimedPayment(amount=10, time=1)
    b = TimedPayment(amount=10, time=1, unit="$/wk")
    c = TimedPayment(amount=10, time=1, mode=EXACT)

    # when & then
    with pytest.raises(ValidationError):
        compare(a, b, Approach.TIME)
    with pytest.raises(ValidationError):
        compare(a, c, Approach.TIME)


def test_classify_pair_predictions():
    """
    시간 접근은 RNTL, 앙상블 접근은 RSTL, 퇴화 복권은 두 접근 모두 RNTL 로 분류하는지 테스트합니다.
    """
    # given
    tl = BinaryTimeLottery(t1=1, t2=2, p=0.5, amount=10, mode=EXACT)
    degenerate = BinaryTimeLottery(t1=3, t2=3, p=0.5, amount=10, mode=EXACT)

    # then
    assert classify_pair(tl, Approach.TIME) is RiskClass.RNTL
    assert classify_pair(tl, Approach.ENSEMBLE) is RiskClass.RSTL
    assert classify_pair(degenerate, Approach.ENSEMBLE) is RiskClass.RNTL


def test_continuity_weight_time_and_ensemble():
    """
    두 접근에서 θ·a + (1−θ)·c ~ b 를 만족하는 연속성 가중치를 정확히 구하는지 테스트합니다.
    """
    # given
    a = TimedPayment(amount=10, time=2, mode=EXACT)
    b = TimedPayment(amount=10, time="3/2", mode=EXACT)
    c = TimedPayment(amount=10, time=1, mode=EXACT)

    # when
    theta_time = continuity_weight(a, b, c, Approach.TIME)
    theta_ensemble = continuity_weight(a, b, c, Approach.ENSEMBLE)

    # then
    assert theta_time == Fraction(1, 2)
    assert theta_ensemble == Fraction(2, 3)
    for approach, theta in ((Approach.TIME, theta_time), (Approach.ENSEMBLE, theta_ensemble)):
        mixed = mix(a, c, theta)
        assert compare(mixed, b, approach).relation is Relation.INDIFFERENT


def test_continuity_weight_is_one_when_b_equals_a():
    """
    b 가 a 와 같으면 연속성 가중치가 1 인지 테스트합니다.
    """
    # given
    a = TimedPayment(amount=10, time=2, mode=EXACT)
    c = TimedPayment(amount=10, time=1, mode=EXACT)

    # then
    assert continuity_weight(a, a, c, Approach.TIME) == 1
    assert continuity_weight(a, a, c, Approach.ENSEMBLE) == 1


def test_continuity_weight_errors():
    """
    a ~ c 이면 DegenerateOrderingError, 순서가 어긋나면 ValidationError 가 발생하는지 테스트합니다.
    """
    # given
    a = TimedPayment(amount=10, time=2, mode=EXACT)
    b = TimedPayment(amount=10, time=1, mode=EXACT)
    c = TimedPayment(amount=20, time=4, mode=EXACT)

    # when & then
    with pytest.raises(DegenerateOrderingError):
        continuity_weight(a, a, c, Approach.TIME)
    with pytest.raises(ValidationError):
        continuity_weight(b, a, TimedPayment(amount=10, time="1/2", mode=EXACT), Approach.TIME)


def test_independence_violated_in_time_approach(counterexample):
    """
    시간 접근에서 θ=0.1 일 때 독립성 공리가 깨지고 임계값 θ* ≈ 0.695 가 보고되는지 테스트합니다.
    """
    # given
    a, b, c = counterexample
    assert compare(a, b, Approach.TIME).relation is Relation.PREFERS_SECOND

    # when
    report = independence_check(a, b, c, "0.1", Approach.TIME)

    # then
    assert not report.holds
    assert float(report.g_mix_ab) == pytest.approx(0.872, abs=0.001)
    assert float(report.g_mix_cb) == pytest.approx(0.824, abs=0.001)
    assert report.threshold == Fraction(57, 82)
    assert float(report.threshold) == pytest.approx(0.695, abs=0.001)


def test_independence_holds_above_threshold(counterexample):
    """
    임계값보다 큰 θ 에서는 시간 접근에서도 독립성이 성립하는지 테스트합니다.
    """
    # given
    a, b, c = counterexample

    # when
    report = independence_check(a, b, c, "0.7", Approach.TIME)

    # then
    assert report.holds


def test_independence_holds_in_ensemble_approach(counterexample):
    """
    앙상블 접근에서는 같은 삼중항에 대해 독립성이 성립하고 임계값이 없는지 테스트합니다.
    """
    # given
    a, b, c = counterexample

    # when
    report = independence_check(a, b, c, "0.1", Approach.ENSEMBLE)

    # then
    assert report.holds
    assert report.threshold is None
    assert report.approach is Approach.ENSEMBLE


def test_independence_holds_with_equal_payments():
    """
    세 복권의 지급액이 같으면 시간 접근에서도 독립성이 성립하는지 테스트합니다.
    """
    # given
    a = BinaryTimeLottery(t1=2, t2=4, p="1/2", amount=5, mode=EXACT)
    b = BinaryTimeLottery(t1=1, t2=2, p="1/2", amount=5, mode=EXACT)
    c = BinaryTimeLottery(t1="1/2", t2=8, p="9/10", amount=5, mode=EXACT)

    # when
    report = independence_check(a, b, c, "1/10", Approach.TIME)

    # then
    assert report.holds
    assert independence_threshold(a, b, c) is None


def test_independence_check_preconditions(counterexample):
    """
    θ 가 (0, 1] 밖이거나 a ≺ b 가 아니면 ValidationError 가 발생하는지 테스트합니다.
    """
    # given
    a, b, c = counterexample

    # when & then
    with pytest.raises(ValidationError):
        independence_check(a, b, c, 0, Approach.TIME)
    with pytest.raises(ValidationError):
        independence_check(b, a, c, "0.5", Approach.TIME)


def test_growth_rate_dispatches_on_approach():
    """
    growth_rate 가 접근 방식에 따라 시간평균 또는 앙상블평균 성장률을 돌려주는지 테스트합니다.
    """
    # given
    tl = BinaryTimeLottery(t1=1, t2=2, p="1/2", amount=10, mode=EXACT)

    # then
    assert growth_rate(tl, Approach.TIME) == Fraction(20, 3)
    assert growth_rate(tl, Approach.ENSEMBLE) == Fraction(15, 2)


@pytest.mark.parametrize("approach", list(Approach))
def test_float_and_exact_backends_order_random_pairs_alike(approach):
    """
    무작위 독립 복권 쌍 5000 개에서 float 모드와 exact 모드의 비교 결과가 같은지 테스트합니다.
    """
    # given
    sampler = LotterySampler(SamplerConfig(mode=EXACT), seed=99)

    # when & then
    for _ in range(5000):
        a, b = sampler.pair()
        exact = compare(a, b, approach).relation
        floating = compare(
            replace(a, mode=NumericMode.FLOAT), replace(b, mode=NumericMode.FLOAT), approach
        ).relation
        assert floating is exact


def test_continuity_weight_matches_bisection(counterexample):
    """
    반례 세 복권 (c, a, b) 의 연속성 가중치가 정확히 5/67 이고, 시간평균 성장률에 대한
    이분법으로 구한 θ 와 일치하는지 테스트합니다.
    """
    # given
    a, b, c = counterexample
    worst, middle, best = (replace(x, mode=NumericMode.FLOAT) for x in (c, a, b))
    target = time_growth(middle)
    low, high = 0.0, 1.0

    # when
    theta = continuity_weight(c, a, b, Approach.TIME)
    for _ in range(100):
        mid = (low + high) / 2
        if time_growth(mix(worst, best, mid)) > target:
            low = mid
        else:
            high = mid

    # then
    assert theta == Fraction(5, 67)
    assert float(theta) == pytest.approx((low + high) / 2, abs=1e-12)
