"""
Reanalysis of published time-lottery experiments.

Datasets are CSV files with a ``# unit: <label>`` comment line followed by a
header. The "rates" schema transcribes printed growth-rate columns; the
"lotteries" schema gives the raw (t1, t2, p, Δx) of both options and derives
the rates.
"""

import io
import math
from enum import Enum
from importlib import resources
from typing import BinaryIO

import numpy as np
import pandas as pd

from timelottery.errors import DegenerateRegressionError, ValidationError
from timelottery.logger import logger
from timelottery.lottery import ensemble_growth, time_growth
from timelottery.models import (
    DEFAULT_UNIT,
    AuditFinding,
    BandPoint,
    BinaryTimeLottery,
    ChoiceProblemRecord,
    OLSFit,
    Schema,
    Severity,
)

RATES_COLUMNS = ("label", "g_ens_i", "g_ens_ii", "g_time", "ratl_pct")
RATES_OPTIONAL_COLUMNS = ("gap", "exp_t", "dx")
LOTTERIES_COLUMNS = (
    "label",
    "t1_i",
    "t2_i",
    "p_i",
    "dx_i",
    "t1_ii",
    "t2_ii",
    "p_ii",
    "dx_ii",
    "ratl_pct",
)

# Tables print one decimal: each printed operand may be off by half a unit.
HALF_UNIT = 0.05
PRINTED_SLACK = 0.1
_EPS = 1e-9


class Dataset(str, Enum):
    DEJARNETTE = "dejarnette"
    ONAY = "onay"


# R² reported with each dataset's original fit
PUBLISHED_R_SQUARED = {Dataset.DEJARNETTE: 0.67, Dataset.ONAY: 0.76}


def _read_bytes(source: bytes | BinaryIO) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    return source.read()


def _split_unit(text: str) -> tuple[str, str]:
    """Strips leading comment lines; returns (unit label, CSV body)."""
    unit = DEFAULT_UNIT
    lines = text.splitlines(keepends=True)
    body_start = 0
    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped.startswith("#"):
            body_start = i
            break
        key, _, value = stripped.lstrip("#").partition(":")
        if key.strip().lower() == "unit" and value.strip():
            unit = value.strip()
    else:
        body_start = len(lines)
    return unit, "".join(lines[body_start:])


def _numeric_column(
    frame: pd.DataFrame, column: str, required: bool = True
) -> list[float | None]:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce")
    for i, (cell, value) in enumerate(zip(raw, values), start=1):
        blank = cell is None or (isinstance(cell, float) and math.isnan(cell)) or str(cell).strip() == ""
        if blank:
            if required:
                raise ValidationError("Missing value", row=i, column=column)
            continue
        if pd.isna(value) or not math.isfinite(value):
            raise ValidationError(f"Not a finite number: {cell!r}", row=i, column=column)
    return [None if pd.isna(v) else float(v) for v in values]


def _check_positive(values: list[float | None], column: str) -> None:
    for i, value in enumerate(values, start=1):
        if value is not None and value <= 0:
            raise ValidationError(f"Must be > 0, got {value}", row=i, column=column)


def _check_range(values: list[float | None], column: str, low: float, high: float) -> None:
    for i, value in enumerate(values, start=1):
        if value is not None and not low <= value <= high:
            raise ValidationError(
                f"Must lie in [{low:g}, {high:g}], got {value}", row=i, column=column
            )


def _rates_records(frame: pd.DataFrame, unit: str) -> list[ChoiceProblemRecord]:
    columns = {c: _numeric_column(frame, c) for c in RATES_COLUMNS[1:]}
    for c in RATES_OPTIONAL_COLUMNS:
        columns[c] = (
            _numeric_column(frame, c, required=False) if c in frame.columns else [None] * len(frame)
        )
    for c in ("g_ens_i", "g_ens_ii", "g_time", "exp_t", "dx"):
        _check_positive(columns[c], c)
    _check_range(columns["ratl_pct"], "ratl_pct", 0.0, 100.0)

    records = []
    for i, label in enumerate(frame["label"]):
        gap = columns["gap"][i]
        if gap is None:
            gap = columns["g_ens_ii"][i] - columns["g_time"][i]
        records.append(
            ChoiceProblemRecord(
                label=str(label).strip(),
                g_ens_i=columns["g_ens_i"][i],
                g_ens_ii=columns["g_ens_ii"][i],
                g_time=columns["g_time"][i],
                gap=gap,
                ratl_fraction=columns["ratl_pct"][i],
                unit_label=unit,
                exp_t=columns["exp_t"][i],
                dx=columns["dx"][i],
            )
        )
    return records


def _lotteries_records(frame: pd.DataFrame, unit: str) -> list[ChoiceProblemRecord]:
    columns = {c: _numeric_column(frame, c) for c in LOTTERIES_COLUMNS[1:]}
    for option in ("i", "ii"):
        _check_positive(columns[f"t1_{option}"], f"t1_{option}")
        _check_positive(columns[f"t2_{option}"], f"t2_{option}")
        _check_positive(columns[f"dx_{option}"], f"dx_{option}")
        _check_range(columns[f"p_{option}"], f"p_{option}", 0.0, 1.0)
        for i, (t1, t2) in enumerate(zip(columns[f"t1_{option}"], columns[f"t2_{option}"]), start=1):
            if t1 > t2:
                raise ValidationError(f"Needs t1 <= t2, got {t1} > {t2}", row=i, column=f"t2_{option}")
    _check_range(columns["ratl_pct"], "ratl_pct", 0.0, 100.0)

    records = []
    for i, label in enumerate(frame["label"]):
        option_i, option_ii = (
            BinaryTimeLottery(
                t1=columns[f"t1_{o}"][i],
                t2=columns[f"t2_{o}"][i],
                p=columns[f"p_{o}"][i],
                amount=columns[f"dx_{o}"][i],
                unit=unit,
            )
            for o in ("i", "ii")
        )
        g_time = float(time_growth(option_ii))
        if not math.isclose(float(time_growth(option_i)), g_time, rel_tol=1e-9):
            logger.warning(
                f"[Empirics] Row {i + 1} ('{label}'): options differ in time-average rate; "
                "using option II"
            )
        g_ens_ii = float(ensemble_growth(option_ii))
        records.append(
            ChoiceProblemRecord(
                label=str(label).strip(),
                g_ens_i=float(ensemble_growth(option_i)),
                g_ens_ii=g_ens_ii,
                g_time=g_time,
                gap=g_ens_ii - g_time,
                ratl_fraction=columns["ratl_pct"][i],
                unit_label=unit,
                exp_t=float(option_ii.expected_time()),
                dx=float(option_ii.amount),
            )
        )
    return records


def load_dataset(source: bytes | BinaryIO, schema: Schema) -> list[ChoiceProblemRecord]:
    """
    Parses and validates a dataset.

    Raises ValidationError naming the row and column of the first bad cell.
    """
    try:
        text = _read_bytes(source).decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise ValidationError(f"Dataset is not valid UTF-8: {e}") from e
    unit, body = _split_unit(text)
    if not body.strip():
        raise ValidationError("Dataset has no header line")
    try:
        frame = pd.read_csv(
            io.StringIO(body), dtype=str, keep_default_na=False, skipinitialspace=True
        )
    except pd.errors.ParserError as e:
        raise ValidationError(f"Malformed CSV: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]

    required = RATES_COLUMNS if schema is Schema.RATES else LOTTERIES_COLUMNS
    for column in required:
        if column not in frame.columns:
            raise ValidationError("Missing column", column=column)

    if schema is Schema.RATES:
        records = _rates_records(frame, unit)
    else:
        records = _lotteries_records(frame, unit)
    logger.debug(f"[Empirics] Loaded {len(records)} records ({schema.value} schema, unit {unit})")
    return records


def load_shipped(dataset: Dataset) -> list[ChoiceProblemRecord]:
    data = resources.files("timelottery").joinpath("data", f"{dataset.value}.csv").read_bytes()
    return load_dataset(data, Schema.RATES)


def dump_dataset(records: list[ChoiceProblemRecord], sink: BinaryIO) -> None:
    """Writes records in the "rates" schema; load_dataset reads them back unchanged."""
    if not records:
        raise ValidationError("No records to write")
    units = {r.unit_label for r in records}
    if len(units) > 1:
        raise ValidationError(f"Records mix unit labels: {sorted(units)}")

    frame = pd.DataFrame(
        {
            "label": [r.label for r in records],
            "g_ens_i": [r.g_ens_i for r in records],
            "g_ens_ii": [r.g_ens_ii for r in records],
            "g_time": [r.g_time for r in records],
            "gap": [r.gap for r in records],
            "ratl_pct": [r.ratl_fraction for r in records],
        }
    )
    if any(r.exp_t is not None or r.dx is not None for r in records):
        frame["exp_t"] = [r.exp_t for r in records]
        frame["dx"] = [r.dx for r in records]
    text = f"# unit: {units.pop()}\n" + frame.to_csv(index=False, lineterminator="\n")
    sink.write(text.encode("utf-8"))


def _classify(
    label: str, field_name: str, stated: float, recomputed: float, printed_operands: int
) -> AuditFinding | None:
    tolerance = HALF_UNIT * (1 + printed_operands)
    difference = abs(stated - recomputed)
    if difference <= tolerance + _EPS:
        return None
    severity = (
        Severity.ROUNDING if difference <= tolerance + PRINTED_SLACK + _EPS else Severity.INCONSISTENT
    )
    return AuditFinding(
        label=label,
        field_name=field_name,
        stated=stated,
        recomputed=recomputed,
        severity=severity,
    )


def audit(records: list[ChoiceProblemRecord]) -> list[AuditFinding]:
    """
    Recomputes ḡ = Δx/⟨t⟩ where the raw fields exist and the gap ⟨g⟩^II − ḡ.

    Every printed operand of a recomputation widens the no-finding tolerance
    by half a printed unit (0.05); mismatches within a further 0.1 are
    rounding, anything beyond is inconsistent. The gap check uses the
    recomputed ḡ when it is available.
    """
    findings = []
    for record in records:
        g_time_reference = record.g_time
        printed_operands = 2
        if record.exp_t is not None and record.dx is not None:
            recomputed = record.dx / record.exp_t
            finding = _classify(record.label, "g_time", record.g_time, recomputed, 0)
            if finding:
                findings.append(finding)
            g_time_reference = recomputed
            printed_operands = 1
        finding = _classify(
            record.label,
            "gap",
            record.gap,
            record.g_ens_ii - g_time_reference,
            printed_operands,
        )
        if finding:
            findings.append(finding)

    for finding in findings:
        logger.info(
            f"[Empirics] {finding.label}: {finding.field_name} stated {finding.stated} "
            f"vs recomputed {finding.recomputed:.4g} ({finding.severity.value})"
        )
    return findings


def ols_fit(records: list[ChoiceProblemRecord]) -> OLSFit:
    """Unweighted least squares of the RATL percentage on the Jensen gap."""
    n = len(records)
    if n < 3:
        raise ValidationError(f"OLS fit needs at least 3 records, got {n}")
    x = np.array([r.gap for r in records], dtype=float)
    y = np.array([r.ratl_fraction for r in records], dtype=float)

    x_mean = float(x.mean())
    s_xx = float(np.sum((x - x_mean) ** 2))
    if s_xx == 0.0:
        raise DegenerateRegressionError("All gap values are equal; the slope is undefined")

    design = np.column_stack([np.ones(n), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ np.array([intercept, slope])
    sse = float(residuals @ residuals)
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst > 0:
        r_squared = min(max(1.0 - sse / sst, 0.0), 1.0)
    else:
        r_squared = 1.0

    fit = OLSFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        residual_std=math.sqrt(sse / (n - 2)),
        n=n,
        x_mean=x_mean,
        s_xx=s_xx,
    )
    logger.debug(
        f"[Empirics] OLS fit: slope {fit.slope:.4g}, intercept {fit.intercept:.4g}, R² {fit.r_squared:.4f}"
    )
    return fit


def confidence_band(fit: OLSFit, xs, sigma: float = 1.0) -> list[BandPoint]:
    """
    Pointwise band for the fitted mean.

    ``sigma`` multiplies the standard error; 1.0 gives the 1σ (68%) band
    under normal errors. Pass a t-quantile for small-sample coverage.
    """
    return [
        BandPoint(
            x=float(x),
            y_hat=fit.predict(float(x)),
            half_width=sigma
            * fit.residual_std
            * math.sqrt(1.0 / fit.n + (float(x) - fit.x_mean) ** 2 / fit.s_xx),
        )
        for x in xs
    ]


def band_grid(records: list[ChoiceProblemRecord], points: int = 50) -> list[float]:
    gaps = [r.gap for r in records]
    return [float(x) for x in np.linspace(min(gaps), max(gaps), points)]
