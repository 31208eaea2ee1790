import io
import json
from pathlib import Path

from timelottery.axioms import (
    DEFAULT_THETAS,
    LotterySampler,
    axiom_suite,
    independence_counterexample_search,
)
from timelottery.design import (
    amount_ratio_window,
    design_adjust_amounts,
    design_adjust_times,
    disagreement_interval,
)
from timelottery.empirics import (
    Dataset,
    audit,
    band_grid,
    confidence_band,
    dump_dataset,
    load_dataset,
    load_shipped,
    ols_fit,
)
from timelottery.errors import (
    DegenerateOrderingError,
    DegenerateRegressionError,
    EmptyIntervalError,
    TimeLotteryError,
    ValidationError,
)
from timelottery.figure import FigureFormat, emit_figure
from timelottery.logger import logger
from timelottery.lottery import (
    effective_time,
    ensemble_growth,
    growth_summary,
    kunstgriff_factor,
    kunstgriff_grid,
    kunstgriff_sweep,
    mix,
    time_growth,
)
from timelottery.models import (
    AuditFinding,
    AxiomSuiteReport,
    BinaryTimeLottery,
    ChoiceProblemRecord,
    ConvergencePoint,
    GeneralLottery,
    Outcome,
    SamplerConfig,
    Schema,
    SimConfig,
    SimResult,
    TimedPayment,
)
from timelottery.numeric import NumericMode, coerce
from timelottery.preference import (
    classify_pair,
    compare,
    continuity_weight,
    independence_check,
    independence_threshold,
)
from timelottery.simulate import convergence_series, simulate

__all__ = [
    "load_lottery_file",
    "load_records",
    "audit_records",
    "reproduce_figure",
    "run_simulation",
    "run_axiom_suite",
    "search_independence",
    "BinaryTimeLottery",
    "GeneralLottery",
    "TimedPayment",
    "NumericMode",
    "Dataset",
    "FigureFormat",
    "Schema",
    "SimConfig",
    "SamplerConfig",
    "LotterySampler",
    "TimeLotteryError",
    "ValidationError",
    "DegenerateOrderingError",
    "DegenerateRegressionError",
    "EmptyIntervalError",
    "time_growth",
    "ensemble_growth",
    "growth_summary",
    "mix",
    "effective_time",
    "kunstgriff_factor",
    "kunstgriff_sweep",
    "kunstgriff_grid",
    "compare",
    "classify_pair",
    "continuity_weight",
    "independence_check",
    "independence_threshold",
    "axiom_suite",
    "independence_counterexample_search",
    "simulate",
    "convergence_series",
    "load_dataset",
    "dump_dataset",
    "load_shipped",
    "audit",
    "ols_fit",
    "confidence_band",
    "emit_figure",
    "disagreement_interval",
    "design_adjust_times",
    "design_adjust_amounts",
    "amount_ratio_window",
]


def load_lottery_file(path: str, mode: NumericMode = NumericMode.FLOAT) -> GeneralLottery:
    """
    Reads a general lottery from JSON:
    ``{"unit": "...", "outcomes": [{"amount": .., "time": .., "prob": ..}, ...]}``.
    Numbers may be JSON numbers or strings such as "1/3".
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"Lottery file '{path}' is not valid JSON: {e}") from e
    if not isinstance(document, dict) or not isinstance(document.get("outcomes"), list):
        raise ValidationError(f"Lottery file '{path}' needs an 'outcomes' list")

    outcomes = []
    for i, item in enumerate(document["outcomes"], start=1):
        try:
            fields = {key: coerce(item[key], mode) for key in ("amount", "time", "prob")}
        except (KeyError, TypeError) as e:
            raise ValidationError(f"Outcome {i} in '{path}' needs amount, time and prob") from e
        outcomes.append(Outcome(**fields))
    lottery = GeneralLottery(
        tuple(outcomes), unit=document.get("unit", "unit/time"), mode=mode
    )
    logger.debug(f"[Library] Loaded lottery with {len(lottery.outcomes)} outcomes from '{path}'")
    return lottery


def load_records(
    dataset: Dataset | None = None,
    path: str | None = None,
    schema: Schema = Schema.RATES,
) -> list[ChoiceProblemRecord]:
    """Records of a shipped dataset, or of a CSV file when ``path`` is given."""
    if path is not None:
        with open(path, "rb") as f:
            return load_dataset(f, schema)
    return load_shipped(dataset or Dataset.DEJARNETTE)


def reproduce_figure(
    records: list[ChoiceProblemRecord],
    fmt: FigureFormat = FigureFormat.SVG,
    sigma: float = 1.0,
    title: str | None = None,
) -> bytes:
    """Fits the records and renders the scatter, fit line and band."""
    logger.info(f"[Library] Reproducing figure from {len(records)} records")
    fit = ols_fit(records)
    band = confidence_band(fit, band_grid(records), sigma=sigma)
    sink = io.BytesIO()
    emit_figure(records, fit, band, sink, fmt=fmt, title=title)
    return sink.getvalue()


def run_simulation(
    lottery: GeneralLottery | BinaryTimeLottery,
    cfg: SimConfig,
    checkpoints: list[int] | None = None,
) -> tuple[SimResult, list[ConvergencePoint]]:
    result = simulate(lottery, cfg)
    series = convergence_series(lottery, cfg.mode, checkpoints, cfg.seed) if checkpoints else []
    return result, series


def run_axiom_suite(
    approach, sample_size: int, seed: int, equal_payments: bool, exact: bool = True
) -> AxiomSuiteReport:
    mode = NumericMode.EXACT if exact else NumericMode.FLOAT
    config = SamplerConfig(equal_payments=equal_payments, mode=mode)
    report = axiom_suite(sample_size, seed, approach, config)
    status = "all axioms hold" if report.ok else "axiom failures present"
    logger.info(f"[Library] Axiom suite finished: {status}")
    return report


def search_independence(
    budget: int,
    seed: int,
    approach,
    thetas=DEFAULT_THETAS,
    shards: int = 1,
    workers: int = 1,
    equal_payments: bool = False,
):
    config = SamplerConfig(equal_payments=equal_payments)
    return independence_counterexample_search(
        config,
        budget,
        seed,
        thetas=tuple(thetas),
        approach=approach,
        shards=shards,
        workers=workers,
    )


def audit_records(records: list[ChoiceProblemRecord]) -> list[AuditFinding]:
    findings = audit(records)
    logger.info(f"[Library] Audit of {len(records)} records: {len(findings)} finding(s)")
    return findings
