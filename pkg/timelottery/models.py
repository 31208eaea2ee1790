# timelottery/models.py
from dataclasses import dataclass, field
from enum import Enum

from timelottery.errors import ValidationError
from timelottery.numeric import (
    Number,
    NumericMode,
    coerce,
    keys_equal,
    one,
    sums_to_one,
    total,
)

DEFAULT_UNIT = "unit/time"


def _check_positive(name: str, value: Number, owner: str) -> None:
    try:
        positive = value > 0
    except TypeError as e:
        raise ValidationError(f"{owner} {name} must be a number, got {value!r}") from e
    if not positive:
        raise ValidationError(f"{owner} {name} must be > 0, got {value}")


def _check_probability(name: str, value: Number, owner: str) -> None:
    try:
        in_range = 0 <= value <= 1
    except TypeError as e:
        raise ValidationError(f"{owner} {name} must be a number, got {value!r}") from e
    if not in_range:
        raise ValidationError(f"{owner} {name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class TimedPayment:
    """
    A certain amount paid at a certain time after t0 = 0.
    """

    amount: Number
    time: Number
    unit: str = DEFAULT_UNIT
    mode: NumericMode = NumericMode.FLOAT

    def __post_init__(self):
        amount = coerce(self.amount, self.mode)
        time = coerce(self.time, self.mode)
        _check_positive("amount", amount, "Timed payment")
        _check_positive("time", time, "Timed payment")
        object.__setattr__(self, "amount", amount)
        object.__setattr__(self, "time", time)

    def to_lottery(self) -> "GeneralLottery":
        return GeneralLottery(
            (Outcome(self.amount, self.time, one(self.mode)),),
            unit=self.unit,
            mode=self.mode,
        )


@dataclass(frozen=True)
class BinaryTimeLottery:
    """
    Pays ``amount`` at ``t1`` with probability ``p`` and at ``t2`` otherwise.
    """

    t1: Number
    t2: Number
    p: Number
    amount: Number
    unit: str = DEFAULT_UNIT
    mode: NumericMode = NumericMode.FLOAT

    def __post_init__(self):
        t1 = coerce(self.t1, self.mode)
        t2 = coerce(self.t2, self.mode)
        p = coerce(self.p, self.mode)
        amount = coerce(self.amount, self.mode)
        _check_positive("t1", t1, "Time lottery")
        _check_positive("amount", amount, "Time lottery")
        _check_probability("p", p, "Time lottery")
        if t1 > t2:
            raise ValidationError(f"Time lottery needs t1 <= t2, got t1={t1}, t2={t2}")
        object.__setattr__(self, "t1", t1)
        object.__setattr__(self, "t2", t2)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "amount", amount)

    def expected_time(self) -> Number:
        return self.p * self.t1 + (1 - self.p) * self.t2

    def is_degenerate(self) -> bool:
        return self.t1 == self.t2 or self.p == 0 or self.p == 1

    def to_lottery(self) -> "GeneralLottery":
        """Equivalent general lottery; zero-probability branches are dropped and equal times merged."""
        if self.t1 == self.t2:
            outcomes = (Outcome(self.amount, self.t1, one(self.mode)),)
        else:
            outcomes = tuple(
                Outcome(self.amount, t, prob)
                for t, prob in ((self.t1, self.p), (self.t2, 1 - self.p))
                if prob > 0
            )
        return GeneralLottery(outcomes, unit=self.unit, mode=self.mode)


@dataclass(frozen=True)
class Outcome:
    amount: Number
    time: Number
    prob: Number

    def __post_init__(self):
        _check_positive("amount", self.amount, "Outcome")
        _check_positive("time", self.time, "Outcome")
        _check_probability("prob", self.prob, "Outcome")

    def rate(self) -> Number:
        return self.amount / self.time

    def same_payment(self, other: "Outcome", mode: NumericMode) -> bool:
        return keys_equal(self.amount, other.amount, mode) and keys_equal(
            self.time, other.time, mode
        )


@dataclass(frozen=True)
class GeneralLottery:
    """
    A finite distribution over (amount, time) payments.

    Outcomes are coerced to the lottery's numeric mode on construction and
    their probabilities must sum to one (exactly, or within 1e-12 for floats).
    """

    outcomes: tuple[Outcome, ...]
    unit: str = DEFAULT_UNIT
    mode: NumericMode = NumericMode.FLOAT

    def __post_init__(self):
        outcomes = tuple(
            Outcome(
                coerce(o.amount, self.mode),
                coerce(o.time, self.mode),
                coerce(o.prob, self.mode),
            )
            for o in self.outcomes
        )
        if not outcomes:
            raise ValidationError("A lottery needs at least one outcome")
        prob_sum = total((o.prob for o in outcomes), self.mode)
        if not sums_to_one(prob_sum, self.mode):
            raise ValidationError(f"Outcome probabilities must sum to 1, got {prob_sum}")
        object.__setattr__(self, "outcomes", outcomes)

    def expected_amount(self) -> Number:
        return total((o.prob * o.amount for o in self.outcomes), self.mode)

    def expected_time(self) -> Number:
        return total((o.prob * o.time for o in self.outcomes), self.mode)

    def rates(self) -> tuple[Number, ...]:
        return tuple(o.rate() for o in self.outcomes if o.prob > 0)

    def is_degenerate(self) -> bool:
        """True when every realisable outcome grows at the same rate."""
        rates = self.rates()
        return all(keys_equal(r, rates[0], self.mode) for r in rates[1:])


@dataclass(frozen=True)
class GrowthSummary:
    time_avg: Number
    ensemble_avg: Number
    jensen_gap: Number


@dataclass(frozen=True)
class KunstgriffRow:
    t1: Number
    t2: Number
    p: Number
    factor: Number


@dataclass(frozen=True)
class KunstgriffSweep:
    rows: tuple[KunstgriffRow, ...]
    min_factor: Number
    max_factor: Number
    setup_dependent: bool


class Approach(str, Enum):
    TIME = "time"
    ENSEMBLE = "ensemble"


class Relation(str, Enum):
    PREFERS_FIRST = "prefers_first"
    INDIFFERENT = "indifferent"
    PREFERS_SECOND = "prefers_second"


@dataclass(frozen=True)
class PreferenceOutcome:
    relation: Relation
    g_first: Number
    g_second: Number

    @property
    def is_strict(self) -> bool:
        return self.relation is not Relation.INDIFFERENT


class RiskClass(str, Enum):
    RATL = "RATL"
    RNTL = "RNTL"
    RSTL = "RSTL"


@dataclass(frozen=True)
class IndependenceReport:
    """
    Outcome of one independence check for a ≺ b, weight θ and common lottery c.

    ``g_mix_ab`` is the rate of θ·a + (1−θ)·c and ``g_mix_cb`` the rate of
    θ·b + (1−θ)·c. ``threshold`` is set in the time approach when independence
    fails for every θ below it.
    """

    holds: bool
    theta: Number
    g_mix_ab: Number
    g_mix_cb: Number
    triple: tuple[GeneralLottery, GeneralLottery, GeneralLottery]
    approach: Approach = Approach.TIME
    threshold: Number | None = None


@dataclass(frozen=True)
class AxiomResult:
    name: str
    passed: int
    failed: int
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0


@dataclass(frozen=True)
class AxiomSuiteReport:
    approach: Approach
    sample_size: int
    seed: int
    equal_payments: bool
    results: tuple[AxiomResult, ...]
    violations: tuple[IndependenceReport, ...] = ()

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def result(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


class SimMode(str, Enum):
    SEQUENTIAL = "sequential"
    ENSEMBLE = "ensemble"


@dataclass(frozen=True)
class SimConfig:
    seed: int
    count: int
    mode: SimMode = SimMode.SEQUENTIAL
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.count < 1:
            raise ValidationError(f"Simulation count must be >= 1, got {self.count}")
        if self.shards < 1 or self.workers < 1:
            raise ValidationError("shards and workers must be >= 1")


@dataclass(frozen=True)
class SimResult:
    empirical_rate: float
    analytic_target: float
    abs_error: float
    rel_error: float
    tallies: tuple[int, ...]
    count: int
    mode: SimMode


@dataclass(frozen=True)
class ConvergencePoint:
    count: int
    empirical_rate: float


class Schema(str, Enum):
    RATES = "rates"
    LOTTERIES = "lotteries"


@dataclass(frozen=True)
class ChoiceProblemRecord:
    """
    One row of a reanalysed experiment: option I is the less risky option.

    ``exp_t`` and ``dx`` are present only when the source gives the raw
    expected time and payment of option II.
    """

    label: str
    g_ens_i: float
    g_ens_ii: float
    g_time: float
    gap: float
    ratl_fraction: float
    unit_label: str = DEFAULT_UNIT
    exp_t: float | None = None
    dx: float | None = None

    def __post_init__(self):
        if not 0 <= self.ratl_fraction <= 100:
            raise ValidationError(
                f"RATL fraction of '{self.label}' must lie in [0, 100], got {self.ratl_fraction}"
            )


class Severity(str, Enum):
    ROUNDING = "rounding"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class AuditFinding:
    label: str
    field_name: str
    stated: float
    recomputed: float
    severity: Severity


@dataclass(frozen=True)
class OLSFit:
    slope: float
    intercept: float
    r_squared: float
    residual_std: float
    n: int
    x_mean: float
    s_xx: float

    def predict(self, x: float) -> float:
        return self.intercept + self.slope * x


@dataclass(frozen=True)
class BandPoint:
    x: float
    y_hat: float
    half_width: float

    @property
    def lower(self) -> float:
        return self.y_hat - self.half_width

    @property
    def upper(self) -> float:
        return self.y_hat + self.half_width


@dataclass(frozen=True)
class DesignedPair:
    """
    A choice between a risky time lottery and a timed payment.

    Predictions compare (risky, riskless); margins are g_risky − g_riskless.
    """

    risky: BinaryTimeLottery
    riskless: TimedPayment
    prediction_time: PreferenceOutcome
    prediction_ensemble: PreferenceOutcome
    disagree: bool
    margin_time: Number = field(init=False)
    margin_ensemble: Number = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "margin_time",
            self.prediction_time.g_first - self.prediction_time.g_second,
        )
        object.__setattr__(
            self,
            "margin_ensemble",
            self.prediction_ensemble.g_first - self.prediction_ensemble.g_second,
        )


@dataclass(frozen=True)
class SamplerConfig:
    """
    Ranges for random binary lotteries. Times and amounts are drawn
    log-uniformly, probabilities uniformly; every draw is rounded to six
    significant digits so it is exact in both numeric modes.
    """

    t_range: tuple[float, float] = (0.1, 100.0)
    dx_range: tuple[float, float] = (0.1, 1000.0)
    p_range: tuple[float, float] = (0.01, 0.99)
    equal_payments: bool = False
    degenerate_share: float = 0.0
    mode: NumericMode = NumericMode.EXACT
    unit: str = DEFAULT_UNIT
    # fixed (a, b, c) triples served before any random draw
    include: tuple[tuple[BinaryTimeLottery, BinaryTimeLottery, BinaryTimeLottery], ...] = ()

    def __post_init__(self):
        for name, (low, high) in (("t_range", self.t_range), ("dx_range", self.dx_range)):
            if not 0 < low <= high:
                raise ValidationError(f"{name} must satisfy 0 < low <= high, got {(low, high)}")
        low, high = self.p_range
        if not 0 <= low <= high <= 1:
            raise ValidationError(f"p_range must lie within [0, 1], got {self.p_range}")
        if not 0 <= self.degenerate_share <= 1:
            raise ValidationError(
                f"degenerate_share must lie in [0, 1], got {self.degenerate_share}"
            )
