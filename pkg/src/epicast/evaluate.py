"""Chronological evaluation: split, fit, predict, score, time.

Produces one :class:`ForecastReport` per (regressor, metric) pair and
serializes them as JSON objects and as a comparison table with columns
``regressor,metric,train_ms,predict_ms,rmse,lower,upper``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, EmptyInput, TooShort
from .ingest import CaseSeries, Metric
from .models import (
    BRRConfig,
    GPRConfig,
    Prediction,
    brr_fit,
    brr_predict,
    build_features,
    gpr_fit,
    gpr_predict,
)

DEFAULT_TRAIN_FRACTION = {Metric.CONFIRMED: 0.67, Metric.DEATHS: 0.75}
TABLE_COLUMNS = ("regressor", "metric", "train_ms", "predict_ms", "rmse", "lower", "upper")
CURVE_COLUMNS = ("day_index", "date", "actual", "pred_mean", "pred_std", "segment")
TIMING_FIELDS = ("train_time_ms", "predict_time_ms")


class Regressor(str, Enum):
    BRR = "BRR"
    GPR = "GPR"

    @classmethod
    def parse(cls, value: "str | Regressor") -> "Regressor":
        if isinstance(value, Regressor):
            return value
        try:
            return cls(value.strip().upper())
        except ValueError:
            raise ValueError(f"unknown regressor {value!r}; expected brr or gpr") from None


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")

    @classmethod
    def for_metric(cls, metric: "Metric | str") -> "SplitSpec":
        return cls(DEFAULT_TRAIN_FRACTION[Metric.parse(metric)])

    def train_size(self, n: int) -> int:
        # the epsilon keeps e.g. 100 * 0.67 = 67.00000000000001 and 0.29 * 100 = 28.999... stable
        return int(math.floor(n * self.train_fraction + 1e-9))


@dataclass(frozen=True)
class ModelConfig:
    degree: int = 3
    standardize: bool = True
    brr: BRRConfig = field(default_factory=BRRConfig)
    gpr: GPRConfig = field(default_factory=GPRConfig)


@dataclass(frozen=True)
class ForecastReport:
    regressor: Regressor
    metric: Metric
    country: str
    start_date: str
    train_size: int
    rmse: float
    test_lower_bound: int
    test_upper_bound: int
    train_time_ms: float
    predict_time_ms: float
    predictions: Prediction
    actuals: np.ndarray
    hyperparameters: dict

    @property
    def test_size(self) -> int:
        return self.actuals.shape[0] - self.train_size

    def to_dict(self) -> dict:
        return {
            "regressor": self.regressor.value,
            "metric": self.metric.label,
            "country": self.country,
            "start_date": self.start_date,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "rmse": self.rmse,
            "test_lower_bound": self.test_lower_bound,
            "test_upper_bound": self.test_upper_bound,
            "train_time_ms": round(self.train_time_ms, 4),
            "predict_time_ms": round(self.predict_time_ms, 4),
            "hyperparameters": self.hyperparameters,
            "actuals": [int(v) for v in self.actuals],
            "pred_mean": self.predictions.mean.tolist(),
            "pred_std": self.predictions.std.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def table_row(self) -> dict:
        return {
            "regressor": self.regressor.value,
            "metric": self.metric.label,
            "train_ms": f"{self.train_time_ms:.4f}",
            "predict_ms": f"{self.predict_time_ms:.4f}",
            "rmse": f"{self.rmse:.2f}",
            "lower": self.test_lower_bound,
            "upper": self.test_upper_bound,
        }


def chrono_split(series: CaseSeries, spec: SplitSpec) -> tuple[CaseSeries, CaseSeries]:
    """Earliest ``floor(n * train_fraction)`` points train, the rest test."""
    n = len(series)
    if n < 4:
        raise TooShort(f"need at least 4 points to split, got {n}")
    k = spec.train_size(n)
    if k < 2 or n - k < 1:
        raise TooShort(f"split of {n} points at {spec.train_fraction} leaves train={k}, test={n - k}")
    return series.slice(0, k), series.slice(k)


def rmse(pred, actual) -> float:
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    actual = np.asarray(actual, dtype=np.float64).reshape(-1)
    if pred.shape != actual.shape:
        raise DimensionMismatch(f"{pred.shape[0]} predictions for {actual.shape[0]} actuals")
    if pred.size == 0:
        raise EmptyInput("rmse of empty vectors")
    diff = pred - actual
    return float(np.sqrt(np.mean(diff * diff)))


def bounds(test: CaseSeries | Iterable[int]) -> tuple[int, int]:
    values = list(test.values if isinstance(test, CaseSeries) else test)
    if not values:
        raise EmptyInput("bounds of an empty test set")
    return int(min(values)), int(max(values))


def _fit_predict(regressor: Regressor, design, y_train, x_all, config: ModelConfig):
    t0 = time.perf_counter_ns()
    if regressor is Regressor.BRR:
        model = brr_fit(design, y_train, config.brr)
    else:
        model = gpr_fit(design, y_train, config.gpr)
    t1 = time.perf_counter_ns()
    if regressor is Regressor.BRR:
        pred = brr_predict(model, x_all)
    else:
        pred = gpr_predict(model, x_all)
    t2 = time.perf_counter_ns()

    if regressor is Regressor.BRR:
        hyper = {
            "alpha": model.alpha,
            "lambda": model.lambda_,
            "n_iter": model.n_iter_used,
            "converged": model.converged,
        }
    else:
        hyper = {
            "sigma0_sq": model.spec.sigma0_sq,
            "noise_level": model.spec.noise_level,
            "log_marginal": model.log_marginal,
        }
    return pred, (t1 - t0) / 1e6, (t2 - t1) / 1e6, hyper


def timed_run(
    series: CaseSeries,
    regressor: "Regressor | str",
    split: SplitSpec | None = None,
    config: ModelConfig | None = None,
) -> ForecastReport:
    """Fit on the chronological train segment, predict the whole horizon.

    RMSE is scored on the test segment only. Wall-clock times cover the fit
    and predict calls alone.
    """
    regressor = Regressor.parse(regressor)
    split = split or SplitSpec.for_metric(series.metric)
    config = config or ModelConfig()
    train, test = chrono_split(series, split)

    x_all = np.arange(len(series), dtype=np.float64)
    k = len(train)
    design = build_features(x_all[:k], config.degree, config.standardize)
    y_all = series.as_array()

    pred, train_ms, predict_ms, hyper = _fit_predict(regressor, design, y_all[:k], x_all, config)
    lower, upper = bounds(test)
    return ForecastReport(
        regressor=regressor,
        metric=series.metric,
        country=series.country,
        start_date=series.start_date.isoformat(),
        train_size=k,
        rmse=rmse(pred.mean[k:], y_all[k:]),
        test_lower_bound=lower,
        test_upper_bound=upper,
        train_time_ms=train_ms,
        predict_time_ms=predict_ms,
        predictions=pred,
        actuals=np.asarray(series.values, dtype=np.int64),
        hyperparameters=hyper,
    )


def report_table_csv(reports: Iterable[ForecastReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(report.table_row())
    return buf.getvalue()


def curve_csv(report: ForecastReport, series: CaseSeries) -> str:
    """Per-day actual vs predicted trajectory, tagged train/test, for plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for i, d in enumerate(series.dates):
        writer.writerow(
            [
                i,
                d.isoformat(),
                series.values[i],
                repr(float(report.predictions.mean[i])),
                repr(float(report.predictions.std[i])),
                "train" if i < report.train_size else "test",
            ]
        )
    return buf.getvalue()


def strip_timings(obj):
    """Copy of a report dict (or table rows) with timing fields removed."""
    if isinstance(obj, dict):
        return {k: v for k, v in obj.items() if k not in TIMING_FIELDS + ("train_ms", "predict_ms")}
    return [strip_timings(o) for o in obj]
