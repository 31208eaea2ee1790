import io
from enum import Enum
from typing import Annotated, Optional

import typer
from rich.table import Table

from timelottery import (
    Dataset,
    FigureFormat,
    Schema,
    SimConfig,
    audit_records,
    load_lottery_file,
    load_records,
    reproduce_figure,
    run_axiom_suite,
    run_simulation,
    search_independence,
)
from timelottery.design import design_adjust_amounts, design_adjust_times
from timelottery.empirics import PUBLISHED_R_SQUARED, dump_dataset
from timelottery.file_writer import dumps_json, render_table, to_jsonable, write_output
from timelottery.logger import logger, set_verbose
from timelottery.lottery import (
    as_lottery,
    effective_time,
    growth_summary,
    kunstgriff_factor,
    kunstgriff_grid,
    kunstgriff_sweep,
    mix,
)
from timelottery.models import (
    DEFAULT_UNIT,
    Approach,
    BinaryTimeLottery,
    ChoiceProblemRecord,
    ConvergencePoint,
    Severity,
    SimMode,
)
from timelottery.numeric import NumericMode, coerce, format_number
from timelottery.preference import classify_pair
from timelottery.simulate import write_convergence_csv

DEFAULT_SEED = 42
EXIT_FINDINGS = 2

app = typer.Typer(
    name="tlot",
    help="tlot (time lotteries): growth rates, preferences and experiment reanalysis for time lotteries.",
    add_completion=False,
)
reproduce_app = typer.Typer(help="Regenerates the growth-rate tables and the RATL figure from shipped data.")
design_app = typer.Typer(help="Builds choice problems on which the two approaches disagree.")
app.add_typer(reproduce_app, name="reproduce")
app.add_typer(design_app, name="design")


class OutputFormat(str, Enum):
    JSON = "json"
    TABLE = "table"


class SimulateFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class TablesFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


# Options shared by the commands that take one lottery.
T1Option = Annotated[Optional[str], typer.Option("--t1", help="Earlier payment time.")]
T2Option = Annotated[Optional[str], typer.Option("--t2", help="Later payment time.")]
POption = Annotated[Optional[str], typer.Option("--p", help="Probability of the earlier time.")]
DxOption = Annotated[Optional[str], typer.Option("--dx", help="Payment amount.")]
LotteryFileOption = Annotated[
    Optional[str],
    typer.Option("--lottery", "-l", help="JSON file with a general lottery (instead of --t1/--t2/--p/--dx)."),
]
UnitOption = Annotated[str, typer.Option("--unit", "-u", help="Unit label of growth rates.")]
ExactOption = Annotated[
    bool, typer.Option("--exact", help="Use exact rational arithmetic instead of float64.")
]
OutOption = Annotated[
    Optional[str], typer.Option("--out", "-o", help="Write output to this file instead of stdout.")
]
SeedOption = Annotated[
    int,
    typer.Option("--seed", "-s", help="Random seed.", envvar="TLOT_SEED"),
]
DatasetOption = Annotated[
    Dataset, typer.Option("--dataset", "-d", help="Shipped dataset.")
]


def _mode(exact: bool) -> NumericMode:
    return NumericMode.EXACT if exact else NumericMode.FLOAT


def _binary(t1, t2, p, dx, unit: str, exact: bool) -> BinaryTimeLottery:
    if None in (t1, t2, p, dx):
        raise typer.BadParameter("--t1, --t2, --p and --dx are all required")
    return BinaryTimeLottery(t1=t1, t2=t2, p=p, amount=dx, unit=unit, mode=_mode(exact))


def _lottery(t1, t2, p, dx, lottery_file, unit: str, exact: bool):
    if lottery_file:
        return load_lottery_file(lottery_file, _mode(exact))
    return _binary(t1, t2, p, dx, unit, exact)


def _cell(value) -> str:
    value = format_number(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _key_value_table(title: str, rows: dict) -> str:
    table = Table(title=title)
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    for key, value in rows.items():
        table.add_row(key, _cell(value))
    return render_table(table)


@app.callback()
def cli_main(
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log debug detail to stderr.")
    ] = False,
):
    set_verbose(verbose)


@app.command(name="eval", help="Evaluates the time-average and ensemble-average growth rates.")
def cli_eval(
    t1: T1Option = None,
    t2: T2Option = None,
    p: POption = None,
    dx: DxOption = None,
    lottery_file: LotteryFileOption = None,
    unit: UnitOption = DEFAULT_UNIT,
    exact: ExactOption = False,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format.")] = OutputFormat.JSON,
    out: OutOption = None,
):
    logger.debug("CLI: 'eval' command invoked.")
    lottery = _lottery(t1, t2, p, dx, lottery_file, unit, exact)
    summary = growth_summary(lottery)
    payload = {
        "unit": as_lottery(lottery).unit,
        "mode": lottery.mode.value,
        "time_avg": summary.time_avg,
        "ensemble_avg": summary.ensemble_avg,
        "jensen_gap": summary.jensen_gap,
        "expected_time": as_lottery(lottery).expected_time(),
    }
    if isinstance(lottery, BinaryTimeLottery):
        payload["effective_time"] = effective_time(lottery)
        payload["kunstgriff_factor"] = kunstgriff_factor(
            lottery.t1, lottery.t2, lottery.p, lottery.mode
        )
    if fmt is OutputFormat.TABLE:
        write_output(_key_value_table("Growth rates", payload), out)
    else:
        write_output(dumps_json(payload), out)


@app.command(name="classify", help="Predicts the risk attitude (RATL/RNTL/RSTL) per approach.")
def cli_classify(
    t1: T1Option = None,
    t2: T2Option = None,
    p: POption = None,
    dx: DxOption = None,
    unit: UnitOption = DEFAULT_UNIT,
    exact: ExactOption = False,
    approach: Annotated[
        Optional[Approach],
        typer.Option("--approach", "-a", help="Only this approach (default: both)."),
    ] = None,
    out: OutOption = None,
):
    logger.debug("CLI: 'classify' command invoked.")
    tl = _binary(t1, t2, p, dx, unit, exact)
    approaches = [approach] if approach else list(Approach)
    payload = {a.value: classify_pair(tl, a) for a in approaches}
    write_output(dumps_json(payload), out)


@app.command(name="mix", help="Combines two lotteries with weight θ on the first.")
def cli_mix(
    first: Annotated[str, typer.Option("--first", help="JSON file of the first lottery.")],
    second: Annotated[str, typer.Option("--second", help="JSON file of the second lottery.")],
    theta: Annotated[str, typer.Option("--theta", help="Weight of the first lottery, in [0, 1].")],
    exact: ExactOption = False,
    out: OutOption = None,
):
    logger.debug("CLI: 'mix' command invoked.")
    mode = _mode(exact)
    combined = mix(load_lottery_file(first, mode), load_lottery_file(second, mode), theta)
    summary = growth_summary(combined)
    payload = {
        "lottery": combined,
        "time_avg": summary.time_avg,
        "ensemble_avg": summary.ensemble_avg,
        "jensen_gap": summary.jensen_gap,
    }
    write_output(dumps_json(payload), out)


def _parse_checkpoints(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise typer.BadParameter(f"Checkpoints must be comma-separated integers, got '{text}'") from e


@app.command(name="simulate", help="Monte Carlo estimate of the time (sequential) or ensemble rate.")
def cli_simulate(
    t1: T1Option = None,
    t2: T2Option = None,
    p: POption = None,
    dx: DxOption = None,
    lottery_file: LotteryFileOption = None,
    unit: UnitOption = DEFAULT_UNIT,
    exact: ExactOption = False,
    mode: Annotated[SimMode, typer.Option("--mode", "-m", help="Repetition scheme.")] = SimMode.SEQUENTIAL,
    n: Annotated[int, typer.Option("--n", "-n", help="Number of rounds or copies.")] = 100_000,
    seed: SeedOption = DEFAULT_SEED,
    shards: Annotated[int, typer.Option("--shards", help="Independent substreams.")] = 1,
    workers: Annotated[int, typer.Option("--workers", help="Worker threads for shards.")] = 1,
    checkpoints: Annotated[
        Optional[str],
        typer.Option("--checkpoints", help="Comma-separated counts for a convergence series."),
    ] = None,
    fmt: Annotated[
        SimulateFormat,
        typer.Option("--format", "-f", help="JSON result, or CSV convergence series."),
    ] = SimulateFormat.JSON,
    out: OutOption = None,
):
    logger.debug(f"CLI: 'simulate' command invoked (seed {seed}).")
    lottery = _lottery(t1, t2, p, dx, lottery_file, unit, exact)
    cfg = SimConfig(seed=seed, count=n, mode=mode, shards=shards, workers=workers)
    result, series = run_simulation(lottery, cfg, _parse_checkpoints(checkpoints))
    if fmt is SimulateFormat.CSV:
        # without checkpoints the series is the final estimate alone
        sink = io.BytesIO()
        write_convergence_csv(series or [ConvergencePoint(result.count, result.empirical_rate)], sink)
        write_output(sink.getvalue(), out)
        return
    payload = to_jsonable(result)
    payload["seed"] = seed
    if series:
        payload["convergence"] = to_jsonable(series)
    write_output(dumps_json(payload), out)


@app.command(name="axioms", help="Checks the vNM axioms on random triples (exact arithmetic).")
def cli_axioms(
    approach: Annotated[Approach, typer.Option("--approach", "-a", help="Growth-rate criterion.")] = Approach.TIME,
    samples: Annotated[int, typer.Option("--samples", "-n", help="Number of sampled triples.")] = 10_000,
    seed: SeedOption = DEFAULT_SEED,
    equal_payments: Annotated[
        bool, typer.Option("--equal-payments", help="Sample triples with one common amount.")
    ] = False,
    exact: Annotated[
        bool,
        typer.Option("--exact/--no-exact", help="Exact rational arithmetic; the suite always runs exact."),
    ] = True,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format.")] = OutputFormat.TABLE,
    out: OutOption = None,
):
    logger.debug("CLI: 'axioms' command invoked.")
    report = run_axiom_suite(approach, samples, seed, equal_payments, exact)
    if fmt is OutputFormat.JSON:
        payload = to_jsonable(report)
        payload["violations"] = len(report.violations)
        write_output(dumps_json(payload), out)
    else:
        table = Table(
            title=f"vNM axioms, {approach.value} approach, {samples} samples, seed {seed}"
        )
        for column in ("Axiom", "Passed", "Failed", "Skipped", "Status"):
            table.add_column(column, justify="left" if column == "Axiom" else "right")
        for result in report.results:
            table.add_row(
                result.name,
                str(result.passed),
                str(result.failed),
                str(result.skipped),
                "ok" if result.ok else "FAIL",
            )
        write_output(render_table(table), out)
    if not report.ok:
        raise typer.Exit(code=EXIT_FINDINGS)


@app.command(name="independence", help="Searches random triples for independence violations.")
def cli_independence(
    budget: Annotated[int, typer.Option("--budget", "-b", help="Number of sampled triples.")] = 10_000,
    seed: SeedOption = DEFAULT_SEED,
    approach: Annotated[Approach, typer.Option("--approach", "-a", help="Growth-rate criterion.")] = Approach.TIME,
    theta: Annotated[
        Optional[list[float]], typer.Option("--theta", help="Mixing weight; repeat for several.")
    ] = None,
    shards: Annotated[int, typer.Option("--shards", help="Independent substreams.")] = 1,
    workers: Annotated[int, typer.Option("--workers", help="Worker processes for shards.")] = 1,
    equal_payments: Annotated[
        bool, typer.Option("--equal-payments", help="Sample triples with one common amount.")
    ] = False,
    limit: Annotated[int, typer.Option("--limit", help="Violations to list in the output.")] = 10,
    out: OutOption = None,
):
    logger.debug("CLI: 'independence' command invoked.")
    kwargs = {"thetas": tuple(theta)} if theta else {}
    violations = search_independence(
        budget, seed, approach, shards=shards, workers=workers, equal_payments=equal_payments, **kwargs
    )
    payload = {
        "approach": approach.value,
        "budget": budget,
        "seed": seed,
        "violation_count": len(violations),
        "violations": [
            {
                "theta": v.theta,
                "g_mix_ab": v.g_mix_ab,
                "g_mix_cb": v.g_mix_cb,
                "threshold": v.threshold,
                "triple": v.triple,
            }
            for v in violations[:limit]
        ],
    }
    write_output(dumps_json(payload), out)


@app.command(name="kunstgriff", help="Sweeps the utility multiplier that reconciles the two rates.")
def cli_kunstgriff(
    t1: Annotated[list[str], typer.Option("--t1", help="Earlier time; repeat for a grid.")],
    t2: Annotated[list[str], typer.Option("--t2", help="Later time; repeat for a grid.")],
    p: Annotated[list[str], typer.Option("--p", help="Probability; repeat for a grid.")],
    exact: ExactOption = False,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format.")] = OutputFormat.JSON,
    out: OutOption = None,
):
    logger.debug("CLI: 'kunstgriff' command invoked.")
    mode = _mode(exact)
    t1s, t2s, ps = ([coerce(v, mode) for v in values] for values in (t1, t2, p))
    sweep = kunstgriff_sweep(kunstgriff_grid(t1s, t2s, ps), mode)
    if fmt is OutputFormat.JSON:
        write_output(dumps_json(sweep), out)
        return
    table = Table(title=f"Kunstgriff factor (setup dependent: {sweep.setup_dependent})")
    for column in ("t1", "t2", "p", "factor"):
        table.add_column(column, justify="right")
    for row in sweep.rows:
        table.add_row(_cell(row.t1), _cell(row.t2), _cell(row.p), _cell(row.factor))
    write_output(render_table(table), out)


def _tables_view(records: list[ChoiceProblemRecord]) -> str:
    unit = records[0].unit_label
    raw = all(r.exp_t is not None and r.dx is not None for r in records)
    table = Table(title=f"Growth rates ({unit})")
    if raw:
        columns = ("Case", "⟨t⟩", "Δx", "⟨g⟩", "ḡ", "⟨g⟩ − ḡ", "RATL (%)")
    else:
        columns = ("Question", "⟨g⟩ I", "⟨g⟩ II", "ḡ", "⟨g⟩ II − ḡ", "RATL (%)")
    for i, column in enumerate(columns):
        table.add_column(column, justify="left" if i == 0 else "right")
    for r in records:
        if raw:
            values = (r.exp_t, r.dx, r.g_ens_ii, r.g_time, r.gap, r.ratl_fraction)
        else:
            values = (r.g_ens_i, r.g_ens_ii, r.g_time, r.gap, r.ratl_fraction)
        table.add_row(r.label, *(f"{v:g}" for v in values))
    return render_table(table)


@reproduce_app.command(name="tables", help="Prints a dataset's growth-rate table.")
def cli_reproduce_tables(
    dataset: DatasetOption = Dataset.DEJARNETTE,
    fmt: Annotated[TablesFormat, typer.Option("--format", "-f", help="Output format.")] = TablesFormat.TABLE,
    out: OutOption = None,
):
    logger.debug(f"CLI: 'reproduce tables' command invoked for {dataset.value}.")
    records = load_records(dataset)
    if fmt is TablesFormat.CSV:
        sink = io.BytesIO()
        dump_dataset(records, sink)
        write_output(sink.getvalue(), out)
    elif fmt is TablesFormat.JSON:
        write_output(dumps_json(records), out)
    else:
        write_output(_tables_view(records), out)


@reproduce_app.command(name="figure", help="Renders the RATL-versus-gap figure with OLS fit and band.")
def cli_reproduce_figure(
    dataset: DatasetOption = Dataset.DEJARNETTE,
    fmt: Annotated[FigureFormat, typer.Option("--format", "-f", help="Output format.")] = FigureFormat.SVG,
    sigma: Annotated[float, typer.Option("--sigma", help="Band half-width in standard errors.")] = 1.0,
    out: OutOption = None,
):
    logger.debug(f"CLI: 'reproduce figure' command invoked for {dataset.value}.")
    title = f"{dataset.value} (published fit: R² = {PUBLISHED_R_SQUARED[dataset]:.2f})"
    write_output(reproduce_figure(load_records(dataset), fmt=fmt, sigma=sigma, title=title), out)


@app.command(name="audit", help="Cross-checks printed growth rates against their definitions.")
def cli_audit(
    dataset: DatasetOption = Dataset.DEJARNETTE,
    file: Annotated[
        Optional[str], typer.Option("--file", help="Audit this CSV instead of a shipped dataset.")
    ] = None,
    schema: Annotated[Schema, typer.Option("--schema", help="Schema of --file.")] = Schema.RATES,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format.")] = OutputFormat.TABLE,
    out: OutOption = None,
):
    logger.debug("CLI: 'audit' command invoked.")
    findings = audit_records(load_records(dataset, path=file, schema=schema))
    if fmt is OutputFormat.JSON:
        write_output(dumps_json(findings), out)
    else:
        table = Table(title=f"Audit findings ({len(findings)})")
        for column in ("Label", "Field", "Stated", "Recomputed", "Severity"):
            table.add_column(column)
        for f in findings:
            table.add_row(f.label, f.field_name, f"{f.stated:g}", f"{f.recomputed:.4g}", f.severity.value)
        write_output(render_table(table), out)
    if any(f.severity is Severity.INCONSISTENT for f in findings):
        raise typer.Exit(code=EXIT_FINDINGS)


@design_app.command(name="times", help="Riskless payment of the same amount inside the disagreement interval.")
def cli_design_times(
    t1: T1Option = None,
    t2: T2Option = None,
    p: POption = None,
    dx: DxOption = None,
    unit: UnitOption = DEFAULT_UNIT,
    exact: ExactOption = False,
    placement: Annotated[
        str, typer.Option("--placement", help="Position inside the interval, in (0, 1).")
    ] = "0.5",
    out: OutOption = None,
):
    logger.debug("CLI: 'design times' command invoked.")
    pair = design_adjust_times(_binary(t1, t2, p, dx, unit, exact), placement)
    write_output(dumps_json(pair), out)


@design_app.command(name="amounts", help="Riskless payment at the expected time with a scaled amount.")
def cli_design_amounts(
    ratio: Annotated[str, typer.Option("--ratio", help="Riskless amount over lottery amount.")],
    t1: T1Option = None,
    t2: T2Option = None,
    p: POption = None,
    dx: DxOption = None,
    unit: UnitOption = DEFAULT_UNIT,
    exact: ExactOption = False,
    out: OutOption = None,
):
    logger.debug("CLI: 'design amounts' command invoked.")
    pair = design_adjust_amounts(_binary(t1, t2, p, dx, unit, exact), ratio)
    write_output(dumps_json(pair), out)


if __name__ == "__main__":
    app()
