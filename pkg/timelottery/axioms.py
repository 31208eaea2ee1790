"""
Random verification of the von Neumann–Morgenstern axioms for growth-optimal
preferences, and a random search for independence counterexamples in the
time approach.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from timelottery.errors import TimeLotteryError, ValidationError
from timelottery.logger import logger
from timelottery.lottery import as_lottery, mix
from timelottery.models import (
    Approach,
    AxiomResult,
    AxiomSuiteReport,
    BinaryTimeLottery,
    IndependenceReport,
    Relation,
    SamplerConfig,
)
from timelottery.numeric import Number, NumericMode, coerce
from timelottery.preference import (
    compare,
    continuity_weight,
    growth_rate,
    independence_check,
    order_rates,
)
from timelottery.streams import make_rng, split_count

DEFAULT_THETAS = (0.1, 0.5, 0.9)
SIGNIFICANT_DIGITS = 6

AXIOMS = ("completeness", "transitivity", "continuity", "independence")


class LotterySampler:
    """Seeded source of binary time lotteries, pairs and triples."""

    def __init__(self, config: SamplerConfig, seed: int, stream: int = 0):
        self.config = config
        self._rng = make_rng(seed, stream)
        self._included = list(config.include)

    def _number(self, value: float) -> Number:
        return coerce(f"{value:.{SIGNIFICANT_DIGITS}g}", self.config.mode)

    def _log_uniform(self, low: float, high: float) -> float:
        return float(np.exp(self._rng.uniform(np.log(low), np.log(high))))

    def amount(self) -> float:
        return self._log_uniform(*self.config.dx_range)

    def binary(self, amount: float | None = None) -> BinaryTimeLottery:
        config = self.config
        if amount is None:
            amount = self.amount()
        if self._rng.random() < config.degenerate_share:
            t1 = t2 = self._log_uniform(*config.t_range)
        else:
            t1, t2 = sorted(self._log_uniform(*config.t_range) for _ in range(2))
        p = self._rng.uniform(*config.p_range)
        return BinaryTimeLottery(
            t1=self._number(t1),
            t2=self._number(t2),
            p=self._number(p),
            amount=self._number(amount),
            unit=config.unit,
            mode=config.mode,
        )

    def pair(self) -> tuple[BinaryTimeLottery, BinaryTimeLottery]:
        amount = self.amount() if self.config.equal_payments else None
        return self.binary(amount), self.binary(amount)

    def triple(self) -> tuple[BinaryTimeLottery, BinaryTimeLottery, BinaryTimeLottery]:
        if self._included:
            a, b, c = self._included.pop(0)
            return tuple(replace(x, mode=self.config.mode) for x in (a, b, c))
        amount = self.amount() if self.config.equal_payments else None
        return self.binary(amount), self.binary(amount), self.binary(amount)

    def theta(self) -> Number:
        """Mixing weight in (0, 1]."""
        return self._number(1.0 - self._rng.random())


def _ordered_pair(a, b, approach: Approach):
    """(worse, better) or None when the two are indifferent."""
    relation = compare(a, b, approach).relation
    if relation is Relation.INDIFFERENT:
        return None
    return (a, b) if relation is Relation.PREFERS_SECOND else (b, a)


def _search_shard(
    config: SamplerConfig,
    budget: int,
    seed: int,
    shard: int,
    thetas: tuple[Number, ...],
    approach: Approach,
) -> list[IndependenceReport]:
    if shard > 0:
        config = replace(config, include=())
    sampler = LotterySampler(config, seed, stream=shard)
    violations = []
    for _ in range(budget):
        a, b, c = sampler.triple()
        ordered = _ordered_pair(a, b, approach)
        if ordered is None:
            continue
        worse, better = ordered
        for theta in thetas:
            report = independence_check(worse, better, c, theta, approach)
            if not report.holds:
                violations.append(report)
    return violations


def independence_counterexample_search(
    config: SamplerConfig,
    budget: int,
    seed: int,
    thetas: tuple[Number, ...] = DEFAULT_THETAS,
    approach: Approach = Approach.TIME,
    shards: int = 1,
    workers: int = 1,
) -> list[IndependenceReport]:
    """
    Samples ``budget`` triples and returns every (triple, θ) that violates
    independence. Triples listed in ``config.include`` are checked first and
    count against the budget.

    Shard k draws from substream (seed, k); results are concatenated in shard
    order, so the output depends on ``shards`` but not on ``workers``.
    """
    if budget < 1:
        raise ValidationError(f"Search budget must be >= 1, got {budget}")
    if shards < 1 or workers < 1:
        raise ValidationError("shards and workers must be >= 1")

    counts = split_count(budget, shards)
    args = [(config, count, seed, shard, tuple(thetas), approach) for shard, count in enumerate(counts)]
    logger.info(
        f"[Axioms] Searching {budget} triples for independence violations "
        f"({approach.value} approach, {shards} shard(s))"
    )
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_shard, *zip(*args)))
    else:
        results = [_search_shard(*arg) for arg in args]

    violations = list(itertools.chain.from_iterable(results))
    logger.info(f"[Axioms] Found {len(violations)} violation(s)")
    return violations


def _transitive(triple, approach: Approach) -> bool:
    """Weak preference ⪰ must be transitive over every ordering of the triple."""
    mode = triple[0].mode
    rates = [growth_rate(x, approach) for x in triple]

    def weakly_prefers(i: int, j: int) -> bool:
        return order_rates(rates[i], rates[j], mode).relation is not Relation.PREFERS_SECOND

    for x, y, z in itertools.permutations(range(3)):
        if weakly_prefers(x, y) and weakly_prefers(y, z) and not weakly_prefers(x, z):
            return False
    return True


def _continuous(triple, approach: Approach) -> bool | None:
    """None when the triple is not strictly ordered."""
    low, mid, high = sorted(triple, key=lambda x: growth_rate(x, approach))
    if (
        compare(low, mid, approach).relation is not Relation.PREFERS_SECOND
        or compare(mid, high, approach).relation is not Relation.PREFERS_SECOND
    ):
        return None
    theta = continuity_weight(low, mid, high, approach)
    if not 0 <= theta <= 1:
        return False
    return compare(mix(low, high, theta), mid, approach).relation is Relation.INDIFFERENT


def axiom_suite(
    sample_size: int,
    seed: int,
    approach: Approach,
    config: SamplerConfig | None = None,
) -> AxiomSuiteReport:
    """
    Checks completeness, transitivity, continuity and independence on
    ``sample_size`` random triples.

    Sampling always runs in exact mode: tolerance-based float indifference is
    not an axiomatic relation.
    """
    if sample_size < 1:
        raise ValidationError(f"Sample size must be >= 1, got {sample_size}")
    config = config or SamplerConfig()
    if config.mode is not NumericMode.EXACT:
        logger.warning("[Axioms] Axiom suite switches the sampler to exact mode")
        config = replace(config, mode=NumericMode.EXACT)

    sampler = LotterySampler(config, seed)
    counts = {name: [0, 0, 0] for name in AXIOMS}  # passed, failed, skipped
    violations: list[IndependenceReport] = []

    def tally(name: str, verdict: bool | None) -> None:
        counts[name][0 if verdict else 1 if verdict is False else 2] += 1

    logger.info(
        f"[Axioms] Running {sample_size} samples ({approach.value} approach, "
        f"{'equal' if config.equal_payments else 'unequal'} payments, seed {seed})"
    )
    for _ in range(sample_size):
        triple = tuple(as_lottery(x) for x in sampler.triple())
        a, b, c = triple

        try:
            compare(a, b, approach)
            tally("completeness", True)
        except TimeLotteryError:
            tally("completeness", False)

        tally("transitivity", _transitive(triple, approach))
        tally("continuity", _continuous(triple, approach))

        ordered = _ordered_pair(a, b, approach)
        if ordered is None:
            tally("independence", None)
            continue
        report = independence_check(*ordered, c, sampler.theta(), approach)
        tally("independence", report.holds)
        if not report.holds:
            violations.append(report)

    results = tuple(AxiomResult(name, *counts[name]) for name in AXIOMS)
    for result in results:
        logger.debug(
            f"[Axioms] {result.name}: {result.passed} passed, {result.failed} failed, "
            f"{result.skipped} skipped"
        )
    return AxiomSuiteReport(
        approach=approach,
        sample_size=sample_size,
        seed=seed,
        equal_payments=config.equal_payments,
        results=results,
        violations=tuple(violations),
    )
