import io
import math

import numpy as np
import pytest

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
from timelottery.errors import DegenerateRegressionError, ValidationError
from timelottery.lottery import ensemble_growth, time_growth
from timelottery.models import (
    BinaryTimeLottery,
    ChoiceProblemRecord,
    Schema,
    Severity,
)

LOTTERIES_CSV = (
    "# unit: $/wk\n"
    "label,t1_i,t2_i,p_i,dx_i,t1_ii,t2_ii,p_ii,dx_ii,ratl_pct\n"
    "Q1,1.5,1.5,0.5,10,1,2,0.5,10,60\n"
    "Q2,2,3,0.4,20,1,4,0.5,20,45.5\n"
)


def _record(label, gap, ratl):
    return ChoiceProblemRecord(
        label=label,
        g_ens_i=1.0,
        g_ens_ii=1.0 + gap,
        g_time=1.0,
        gap=gap,
        ratl_fraction=ratl,
    )


def test_shipped_dejarnette_dataset():
    """
    DeJarnette 데이터셋이 10 개 레코드로 로드되고 격차가 ⟨g⟩^II − ḡ 와 ±0.1 이내로 일치하는지 테스트합니다.
    """
    # when
    records = load_shipped(Dataset.DEJARNETTE)

    # then
    assert len(records) == 10
    assert records[0].label == "Q1 long"
    assert {r.unit_label for r in records} == {"$/wk"}
    for record in records:
        assert abs(record.gap - (record.g_ens_ii - record.g_time)) <= 0.1


def test_shipped_onay_dataset():
    """
    Onay 데이터셋이 6 개 레코드로 로드되고 2–6 번 사례의 ḡ 가 Δx/⟨t⟩ 와 ±0.1 이내인지 테스트합니다.
    """
    # when
    records = load_shipped(Dataset.ONAY)

    # then
    assert len(records) == 6
    assert records[0].unit_label == "NTL/mth"
    for record in records[1:]:
        assert abs(record.g_time - record.dx / record.exp_t) <= 0.1


def test_audit_flags_only_onay_case_one():
    """
    Onay 감사에서 1 번 사례의 ḡ(27.8 vs 17.8)만 inconsistent 로 보고되는지 테스트합니다.
    """
    # given
    records = load_shipped(Dataset.ONAY)

    # when
    findings = audit(records)

    # then
    assert len(findings) == 1
    finding = findings[0]
    assert finding.label == "Case 1"
    assert finding.field_name == "g_time"
    assert finding.stated == 27.8
    assert finding.recomputed == pytest.approx(17.78, abs=0.01)
    assert finding.severity is Severity.INCONSISTENT


def test_audit_of_dejarnette_is_clean():
    """
    DeJarnette 표의 격차 열이 인쇄 정밀도 안에서 일관되어 감사 결과가 비어 있는지 테스트합니다.
    """
    # then
    assert audit(load_shipped(Dataset.DEJARNETTE)) == []


def test_audit_separates_rounding_from_inconsistency():
    """
    허용오차를 조금 넘는 차이는 rounding, 크게 넘는 차이는 inconsistent 로 분류하는지 테스트합니다.
    """
    # given
    records = [
        ChoiceProblemRecord("close", 1.0, 8.0, 5.0, 3.2, 50.0),
        ChoiceProblemRecord("far", 1.0, 8.0, 5.0, 4.0, 50.0),
        ChoiceProblemRecord("fine", 1.0, 8.0, 5.0, 3.1, 50.0),
    ]

    # when
    findings = {f.label: f.severity for f in audit(records)}

    # then
    assert findings == {"close": Severity.ROUNDING, "far": Severity.INCONSISTENT}


@pytest.mark.parametrize(
    "dataset, expected_r_squared",
    [(Dataset.DEJARNETTE, 0.67), (Dataset.ONAY, 0.76)],
)
def test_ols_fit_reproduces_reported_r_squared(dataset, expected_r_squared):
    """
    두 데이터셋의 OLS 적합 R² 가 보고된 값과 ±0.02 이내이고 기울기가 양수인지 테스트합니다.
    """
    # when
    fit = ols_fit(load_shipped(dataset))

    # then
    assert fit.r_squared == pytest.approx(expected_r_squared, abs=0.02)
    assert fit.slope > 0


def test_ols_fit_satisfies_normal_equations():
    """
    적합 잔차가 정규방정식을 만족하고 R² 가 1 − SSE/SST 와 같은지 테스트합니다.
    """
    # given
    records = load_shipped(Dataset.DEJARNETTE)
    x = np.array([r.gap for r in records])
    y = np.array([r.ratl_fraction for r in records])

    # when
    fit = ols_fit(records)

    # then
    residuals = y - (fit.intercept + fit.slope * x)
    scale = np.abs(y).sum()
    assert abs(residuals.sum()) <= 1e-10 * scale
    assert abs((x * residuals).sum()) <= 1e-10 * scale * np.abs(x).max()
    sse = float((residuals**2).sum())
    sst = float(((y - y.mean()) ** 2).sum())
    assert fit.r_squared == pytest.approx(1 - sse / sst, abs=1e-12)
    assert fit.residual_std == pytest.approx(math.sqrt(sse / (len(records) - 2)))
    # closed-form slope
    slope = ((x - x.mean()) * (y - y.mean())).sum() / ((x - x.mean()) ** 2).sum()
    assert fit.slope == pytest.approx(slope, rel=1e-10)


def test_ols_fit_on_collinear_points():
    """
    정확히 한 직선 위의 점들은 R² = 1 을 얻는지 테스트합니다.
    """
    # given
    records = [_record(str(i), float(i), 10.0 + 2.0 * i) for i in range(1, 6)]

    # when
    fit = ols_fit(records)

    # then
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(10.0)


def test_ols_fit_errors():
    """
    x 분산이 0 이면 DegenerateRegressionError, 레코드가 3 개 미만이면 ValidationError 인지 테스트합니다.
    """
    # when & then
    with pytest.raises(DegenerateRegressionError):
        ols_fit([_record(str(i), 2.0, 10.0 * i) for i in range(4)])
    with pytest.raises(ValidationError):
        ols_fit([_record("a", 1.0, 10.0), _record("b", 2.0, 20.0)])


def test_confidence_band_shape():
    """
    신뢰 구간 반폭이 x_mean 에서 residual_std/√n 으로 최소이고 멀어질수록 커지는지 테스트합니다.
    """
    # given
    fit = ols_fit(load_shipped(Dataset.DEJARNETTE))

    # when
    at_mean = confidence_band(fit, [fit.x_mean])[0]
    band = confidence_band(fit, [fit.x_mean + d for d in (0.5, 1.0, 2.0, 4.0)])

    # then
    assert at_mean.half_width == pytest.approx(fit.residual_std / math.sqrt(fit.n))
    widths = [at_mean.half_width] + [b.half_width for b in band]
    assert widths == sorted(widths) and len(set(widths)) == len(widths)


def test_confidence_band_brackets_fit_at_six():
    """
    DeJarnette 적합에서 x=6.0 의 구간이 적합값을 감싸고 독립 재계산과 일치하는지 테스트합니다.
    """
    # given
    records = load_shipped(Dataset.DEJARNETTE)
    fit = ols_fit(records)
    x = np.array([r.gap for r in records])

    # when
    point = confidence_band(fit, [6.0], sigma=1.0)[0]

    # then
    assert point.lower < fit.predict(6.0) < point.upper
    s_xx = ((x - x.mean()) ** 2).sum()
    expected = fit.residual_std * math.sqrt(1 / len(x) + (6.0 - x.mean()) ** 2 / s_xx)
    assert point.half_width == pytest.approx(expected)
    assert confidence_band(fit, [6.0], sigma=2.0)[0].half_width == pytest.approx(2 * expected)


def test_band_grid_spans_records():
    """
    band_grid 가 레코드 격차의 최소값부터 최대값까지 균등한 격자를 만드는지 테스트합니다.
    """
    # when
    grid = band_grid(load_shipped(Dataset.DEJARNETTE), points=5)

    # then
    assert grid[0] == pytest.approx(0.1)
    assert grid[-1] == pytest.approx(7.3)
    assert len(grid) == 5


def test_dump_and_load_round_trip():
    """
    "rates" 스키마로 기록한 CSV 를 다시 읽으면 레코드가 그대로 재현되는지 테스트합니다.
    """
    # given
    for dataset in Dataset:
        records = load_shipped(dataset)
        sink = io.BytesIO()

        # when
        dump_dataset(records, sink)
        reloaded = load_dataset(sink.getvalue(), Schema.RATES)

        # then
        assert reloaded == records


def test_lotteries_schema_derives_rates():
    """
    "lotteries" 스키마가 각 선택지의 복권에서 성장률 열을 계산하는지 테스트합니다.
    """
    # when
    records = load_dataset(io.BytesIO(LOTTERIES_CSV.encode()), Schema.LOTTERIES)

    # then
    option_i = BinaryTimeLottery(t1=2, t2=3, p=0.4, amount=20)
    option_ii = BinaryTimeLottery(t1=1, t2=4, p=0.5, amount=20)
    second = records[1]
    assert second.g_ens_i == ensemble_growth(option_i)
    assert second.g_ens_ii == ensemble_growth(option_ii)
    assert second.g_time == time_growth(option_ii)
    assert second.gap == pytest.approx(second.g_ens_ii - second.g_time)
    assert second.exp_t == 2.5 and second.dx == 20
    assert records[0].g_ens_i == pytest.approx(10 / 1.5)
    assert records[0].unit_label == "$/wk"


def test_lotteries_schema_rejects_probability_above_one():
    """
    확률이 1.2 인 행은 행 번호와 열 이름을 담은 ValidationError 를 일으키는지 테스트합니다.
    """
    # given
    data = LOTTERIES_CSV.replace("Q2,2,3,0.4", "Q2,2,3,1.2").encode()

    # when
    with pytest.raises(ValidationError) as excinfo:
        load_dataset(data, Schema.LOTTERIES)

    # then
    assert excinfo.value.row == 2
    assert excinfo.value.column == "p_i"
    assert "row 2" in str(excinfo.value)


@pytest.mark.parametrize(
    "text, column",
    [
        ("label,g_ens_i,g_ens_ii,ratl_pct\nA,1,2,50\n", "g_time"),
        ("label,g_ens_i,g_ens_ii,g_time,ratl_pct\nA,1,abc,1,50\n", "g_ens_ii"),
        ("label,g_ens_i,g_ens_ii,g_time,ratl_pct\nA,1,2,1,150\n", "ratl_pct"),
        ("label,g_ens_i,g_ens_ii,g_time,ratl_pct\nA,1,2,,50\n", "g_time"),
        ("label,g_ens_i,g_ens_ii,g_time,ratl_pct\nA,-1,2,1,50\n", "g_ens_i"),
    ],
)
def test_rates_schema_validation_names_column(text, column):
    """
    누락된 열, 숫자가 아닌 값, 범위 밖 값, 빈 칸, 음수가 해당 열 이름과 함께 보고되는지 테스트합니다.
    """
    # when
    with pytest.raises(ValidationError) as excinfo:
        load_dataset(text.encode(), Schema.RATES)

    # then
    assert excinfo.value.column == column


def test_rates_schema_without_gap_column_computes_gap():
    """
    gap 열이 없으면 gap 을 ⟨g⟩^II − ḡ 로 계산하고 기본 단위를 쓰는지 테스트합니다.
    """
    # given
    text = "label,g_ens_i,g_ens_ii,g_time,ratl_pct\nA,1,3.5,1,50\n"

    # when
    records = load_dataset(text.encode(), Schema.RATES)

    # then
    assert records[0].gap == 2.5
    assert records[0].unit_label == "unit/time"
    assert records[0].exp_t is None


def test_malformed_csv_is_validation_error():
    """
    필드 수가 맞지 않는 행이 ValidationError 로 보고되는지 테스트합니다.
    """
    # given
    header = "label,g_ens_i,g_ens_ii,g_time,ratl_pct\n"
    too_many = header + "A,1,2,1,50\nB,1,2,1,50,7,8\n"
    too_few = header + "A,1,2,1,50\nB,1,2\n"

    # when & then
    with pytest.raises(ValidationError):
        load_dataset(too_many.encode(), Schema.RATES)
    with pytest.raises(ValidationError) as excinfo:
        load_dataset(too_few.encode(), Schema.RATES)
    assert excinfo.value.row == 2
