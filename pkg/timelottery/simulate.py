"""
Monte Carlo realisation of the two growth rates.

Repeating a lottery one round after another realises the time-average rate
(total payment over total elapsed time); running many copies side by side
realises the ensemble-average rate (mean of the per-copy rates). Draws are
reduced to per-outcome tallies, and both estimators are formed exactly from
the tallies and rounded once, so results are independent of summation order.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import BinaryIO

import numpy as np
import pandas as pd

from timelottery.errors import ValidationError
from timelottery.logger import logger
from timelottery.lottery import LotteryLike, as_lottery, ensemble_growth, time_growth
from timelottery.models import (
    ConvergencePoint,
    GeneralLottery,
    SimConfig,
    SimMode,
    SimResult,
)
from timelottery.streams import make_rng, split_count

CHUNK_SIZE = 1 << 20
CONVERGENCE_COLUMNS = ["count", "empirical_rate"]


class _Drawer:
    """Maps uniform draws onto outcome indices of one lottery."""

    def __init__(self, lottery: GeneralLottery):
        probs = np.array([float(o.prob) for o in lottery.outcomes])
        self.cumulative = np.cumsum(probs)
        self.last = int(np.flatnonzero(probs > 0)[-1])

    def tallies(self, rng: np.random.Generator, count: int) -> np.ndarray:
        tallies = np.zeros(len(self.cumulative), dtype=np.int64)
        remaining = count
        while remaining > 0:
            size = min(remaining, CHUNK_SIZE)
            index = np.searchsorted(self.cumulative, rng.random(size), side="right")
            np.minimum(index, self.last, out=index)
            tallies += np.bincount(index, minlength=len(self.cumulative))
            remaining -= size
        return tallies


def _empirical_rate(lottery: GeneralLottery, tallies, mode: SimMode) -> float:
    counts = [int(n) for n in tallies]
    if mode is SimMode.SEQUENTIAL:
        paid = sum(n * Fraction(o.amount) for n, o in zip(counts, lottery.outcomes))
        elapsed = sum(n * Fraction(o.time) for n, o in zip(counts, lottery.outcomes))
        return float(paid / elapsed)
    rates = sum(n * Fraction(o.rate()) for n, o in zip(counts, lottery.outcomes))
    return float(rates / sum(counts))


def _analytic_target(lottery: GeneralLottery, mode: SimMode) -> float:
    if mode is SimMode.SEQUENTIAL:
        return float(time_growth(lottery))
    return float(ensemble_growth(lottery))


def _run(lottery: LotteryLike, cfg: SimConfig) -> SimResult:
    lottery = as_lottery(lottery)
    drawer = _Drawer(lottery)
    counts = split_count(cfg.count, cfg.shards)

    def draw(shard: int) -> np.ndarray:
        return drawer.tallies(make_rng(cfg.seed, shard), counts[shard])

    if cfg.workers > 1 and cfg.shards > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            shard_tallies = list(pool.map(draw, range(cfg.shards)))
    else:
        shard_tallies = [draw(shard) for shard in range(cfg.shards)]
    tallies = np.sum(shard_tallies, axis=0)

    empirical = _empirical_rate(lottery, tallies, cfg.mode)
    target = _analytic_target(lottery, cfg.mode)
    abs_error = abs(empirical - target)
    logger.info(
        f"[Simulate] {cfg.mode.value}: {cfg.count} draws, empirical {empirical:.6g} "
        f"vs analytic {target:.6g}"
    )
    return SimResult(
        empirical_rate=empirical,
        analytic_target=target,
        abs_error=abs_error,
        rel_error=abs_error / abs(target),
        tallies=tuple(int(n) for n in tallies),
        count=cfg.count,
        mode=cfg.mode,
    )


def simulate_sequential(lottery: LotteryLike, cfg: SimConfig) -> SimResult:
    """Repeats the lottery ``cfg.count`` times; the estimate is Σ amounts / Σ times."""
    if cfg.mode is not SimMode.SEQUENTIAL:
        raise ValidationError(f"simulate_sequential needs sequential mode, got {cfg.mode.value}")
    return _run(lottery, cfg)


def simulate_ensemble(lottery: LotteryLike, cfg: SimConfig) -> SimResult:
    """Realises ``cfg.count`` copies at once; the estimate is the mean of amount/time."""
    if cfg.mode is not SimMode.ENSEMBLE:
        raise ValidationError(f"simulate_ensemble needs ensemble mode, got {cfg.mode.value}")
    return _run(lottery, cfg)


def simulate(lottery: LotteryLike, cfg: SimConfig) -> SimResult:
    if cfg.mode is SimMode.SEQUENTIAL:
        return simulate_sequential(lottery, cfg)
    return simulate_ensemble(lottery, cfg)


def convergence_series(
    lottery: LotteryLike, mode: SimMode, checkpoints: list[int], seed: int
) -> list[ConvergencePoint]:
    """
    Running estimate at each checkpoint from a single pass over stream (seed, 0).

    The last point equals an unsharded run of the same length and seed.
    """
    if not checkpoints:
        raise ValidationError("Convergence series needs at least one checkpoint")
    if checkpoints[0] < 1 or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValidationError(
            f"Checkpoints must be strictly ascending counts >= 1, got {checkpoints}"
        )
    SimConfig(seed=seed, count=checkpoints[-1], mode=mode)  # validates the seed

    lottery = as_lottery(lottery)
    drawer = _Drawer(lottery)
    rng = make_rng(seed, 0)
    tallies = np.zeros(len(lottery.outcomes), dtype=np.int64)
    series = []
    drawn = 0
    for checkpoint in checkpoints:
        tallies += drawer.tallies(rng, checkpoint - drawn)
        drawn = checkpoint
        series.append(ConvergencePoint(checkpoint, _empirical_rate(lottery, tallies, mode)))
    logger.debug(f"[Simulate] Convergence series with {len(series)} checkpoints")
    return series


def write_convergence_csv(series: list[ConvergencePoint], sink: BinaryIO) -> None:
    """One ``count,empirical_rate`` row per checkpoint."""
    frame = pd.DataFrame(
        [{"count": point.count, "empirical_rate": point.empirical_rate} for point in series],
        columns=CONVERGENCE_COLUMNS,
    )
    sink.write(frame.to_csv(index=False, lineterminator="\n").encode("utf-8"))
