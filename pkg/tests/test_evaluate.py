import json
import math
from datetime import date

import numpy as np
import pytest

from epicast.errors import DimensionMismatch, EmptyInput, TooShort
from epicast.evaluate import (
    ForecastReport,
    ModelConfig,
    Regressor,
    SplitSpec,
    bounds,
    chrono_split,
    curve_csv,
    report_table_csv,
    rmse,
    strip_timings,
    timed_run,
)
from epicast.ingest import CaseSeries, Metric
from epicast.models import GPRConfig


def series(values, metric=Metric.CONFIRMED):
    return CaseSeries("Testland", metric, date(2020, 3, 1), tuple(int(v) for v in values))


@pytest.mark.parametrize("metric, train, test", [("confirmed", 67, 33), ("deaths", 75, 25)])
def test_default_split_sizes(metric, train, test):
    a, b = chrono_split(series(range(100)), SplitSpec.for_metric(metric))
    assert (len(a), len(b)) == (train, test)


def test_split_halves():
    a, b = chrono_split(series([1, 2, 3, 4]), SplitSpec(0.5))
    assert a.values == (1, 2) and b.values == (3, 4)
    assert b.start_date == date(2020, 3, 3)


def test_split_too_short():
    with pytest.raises(TooShort):
        chrono_split(series([1, 2, 3]), SplitSpec(0.5))
    with pytest.raises(TooShort):
        chrono_split(series([1, 2, 3, 4]), SplitSpec(0.3))


def test_split_fraction_validated():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            SplitSpec(bad)


def test_rmse_examples():
    assert rmse([1, 2, 3], [1, 2, 3]) == 0.0
    assert rmse([0, 0], [3, 4]) == pytest.approx(3.5355339, abs=1e-7)
    with pytest.raises(DimensionMismatch):
        rmse([1, 2], [1, 2, 3])
    with pytest.raises(EmptyInput):
        rmse([], [])


def test_bounds_examples():
    assert bounds([718, 900, 1783]) == (718, 1783)
    assert bounds([5]) == (5, 5)
    assert bounds(series([7, 3, 9])) == (3, 9)
    with pytest.raises(EmptyInput):
        bounds([])


def test_brr_noiseless_linear_run():
    x = np.arange(20)
    report = timed_run(series(2 * x + 5), "brr", SplitSpec(0.67), ModelConfig(degree=1))
    assert report.train_size == 13
    assert report.rmse < 1e-2
    np.testing.assert_allclose(report.predictions.mean, 2 * x + 5, atol=1e-2)


def test_bounds_do_not_depend_on_regressor():
    rng = np.random.default_rng(2)
    s = series(np.cumsum(rng.integers(0, 50, size=40)) + 1)
    cfg = ModelConfig(gpr=GPRConfig(restarts=0))
    a = timed_run(s, Regressor.BRR, config=cfg)
    b = timed_run(s, Regressor.GPR, config=cfg)
    assert (a.test_lower_bound, a.test_upper_bound) == (b.test_lower_bound, b.test_upper_bound)
    assert (a.test_lower_bound, a.test_upper_bound) == bounds(s.values[a.train_size :])
    for r in (a, b):
        assert r.train_time_ms > 0 and r.predict_time_ms > 0
        assert r.rmse >= 0
        assert len(r.predictions) == len(s)


def test_report_serialization():
    s = series([1, 2, 4, 7, 11, 16, 22, 29])
    report = timed_run(s, "brr", SplitSpec(0.75), ModelConfig(degree=2))
    d = json.loads(report.to_json())
    assert d["regressor"] == "BRR" and d["metric"] == "Confirmed"
    assert d["train_size"] == 6 and d["test_size"] == 2
    assert (d["test_lower_bound"], d["test_upper_bound"]) == (22, 29)
    assert "train_time_ms" not in strip_timings(d)

    table = report_table_csv([report]).splitlines()
    assert table[0] == "regressor,metric,train_ms,predict_ms,rmse,lower,upper"
    cells = table[1].split(",")
    assert cells[:2] == ["BRR", "Confirmed"] and cells[-2:] == ["22", "29"]
    assert len(cells[2].split(".")[1]) == 4

    curve = curve_csv(report, s).splitlines()
    assert curve[0] == "day_index,date,actual,pred_mean,pred_std,segment"
    assert len(curve) == len(s) + 1
    assert curve[1].startswith("0,2020-03-01,1,")
    assert [row.rsplit(",", 1)[1] for row in curve[1:]] == ["train"] * 6 + ["test"] * 2


def test_regressor_parse():
    assert Regressor.parse(" gpr ") is Regressor.GPR
    with pytest.raises(ValueError):
        Regressor.parse("svm")


def test_report_is_frozen():
    report = timed_run(series(range(1, 11)), "brr", SplitSpec(0.5), ModelConfig(degree=1))
    assert isinstance(report, ForecastReport)
    with pytest.raises(AttributeError):
        report.rmse = 0.0
    assert math.isfinite(report.rmse)
