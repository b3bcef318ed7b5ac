"""Johns Hopkins CSSE global time-series ingestion.

Parses the wide ``Province/State,Country/Region,Lat,Long,<dates...>`` layout,
sums provinces into a per-country cumulative series and windows the series
to the outbreak.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import AllZero, MalformedHeader, NonNumericCount, RaggedRow, UnknownCountry

logger = logging.getLogger(__name__)

HEADER_PREFIX = ("Province/State", "Country/Region", "Lat", "Long")
DEFAULT_WINDOW_DAYS = 100

# canonical JHU CSSE file names, used when a directory is given
JHU_FILENAMES = {
    "confirmed": "time_series_covid19_confirmed_global.csv",
    "deaths": "time_series_covid19_deaths_global.csv",
}


class Metric(str, Enum):
    CONFIRMED = "confirmed"
    DEATHS = "deaths"

    @classmethod
    def parse(cls, value: "str | Metric") -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown metric {value!r}; expected confirmed or deaths") from None

    @property
    def label(self) -> str:
        return self.value.capitalize()


@dataclass(frozen=True)
class RegionRow:
    province: str | None
    country: str
    latitude: float | None
    longitude: float | None
    counts: tuple[int, ...]


@dataclass(frozen=True)
class RegionTimeSeriesTable:
    rows: tuple[RegionRow, ...]
    dates: tuple[date, ...]


@dataclass(frozen=True)
class CaseSeries:
    """Cumulative daily counts for one country, starting at ``start_date``."""

    country: str
    metric: Metric
    start_date: date
    values: tuple[int, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def dates(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range(len(self.values))]

    @property
    def end_date(self) -> date:
        return self.start_date + timedelta(days=len(self.values) - 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def slice(self, start: int, stop: int | None = None) -> "CaseSeries":
        values = self.values[start:stop]
        return CaseSeries(self.country, self.metric, self.start_date + timedelta(days=start), values)


def parse_jhu_date(text: str) -> date:
    try:
        return datetime.strptime(text.strip(), "%m/%d/%y").date()
    except ValueError:
        raise MalformedHeader(f"bad date column {text!r}; expected month/day/2-digit-year") from None


def format_jhu_date(d: date) -> str:
    return f"{d.month}/{d.day}/{d.strftime('%y')}"


def _parse_coord(text: str, line: int) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        raise MalformedHeader(f"line {line}: coordinate {text!r} is not a number") from None


def _parse_count(text: str, line: int, column: int) -> int:
    cell = text.strip()
    if not cell.isdigit() or not cell.isascii():
        raise NonNumericCount(f"line {line}, column {column}: {text!r} is not a non-negative integer")
    return int(cell)


def parse_jhu_csv(raw_text: str) -> RegionTimeSeriesTable:
    reader = csv.reader(io.StringIO(raw_text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeader("empty input") from None
    if len(header) > 0:
        header[0] = header[0].lstrip("\ufeff")
    if tuple(h.strip() for h in header[:4]) != HEADER_PREFIX:
        raise MalformedHeader(f"first columns must be {','.join(HEADER_PREFIX)}; got {header[:4]}")

    dates = tuple(parse_jhu_date(h) for h in header[4:])
    for prev, cur in zip(dates, dates[1:]):
        if cur - prev != timedelta(days=1):
            raise MalformedHeader(f"date columns not consecutive: {prev} -> {cur}")

    rows = []
    for line, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise RaggedRow(f"line {line}: {len(record)} fields, header has {len(header)}")
        province = record[0].strip() or None
        counts = tuple(_parse_count(c, line, i) for i, c in enumerate(record[4:], start=5))
        rows.append(
            RegionRow(
                province=province,
                country=record[1].strip(),
                latitude=_parse_coord(record[2], line),
                longitude=_parse_coord(record[3], line),
                counts=counts,
            )
        )
    return RegionTimeSeriesTable(tuple(rows), dates)


def read_jhu_csv(path: str | Path) -> RegionTimeSeriesTable:
    return parse_jhu_csv(Path(path).read_text(encoding="utf-8"))


def to_jhu_csv(table: RegionTimeSeriesTable) -> str:
    """Serialize a table back into the JHU layout (inverse of parse_jhu_csv)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*HEADER_PREFIX, *(format_jhu_date(d) for d in table.dates)])
    for row in table.rows:
        writer.writerow(
            [
                row.province or "",
                row.country,
                "" if row.latitude is None else repr(row.latitude),
                "" if row.longitude is None else repr(row.longitude),
                *row.counts,
            ]
        )
    return buf.getvalue()


def extract_country_series(
    table: RegionTimeSeriesTable, country: str, metric: "Metric | str"
) -> CaseSeries:
    """Sum every province row of ``country`` (exact, case-insensitive match)."""
    metric = Metric.parse(metric)
    wanted = country.strip().casefold()
    matches = [r for r in table.rows if r.country.casefold() == wanted]
    if not matches:
        raise UnknownCountry(f"no rows for country {country!r}")
    if not table.dates:
        raise AllZero(f"table has no date columns for {country!r}")
    total = [0] * len(table.dates)
    for row in matches:
        for i, c in enumerate(row.counts):
            total[i] += c
    return CaseSeries(matches[0].country, metric, table.dates[0], tuple(total))


def first_case_index(series: CaseSeries) -> int:
    for i, v in enumerate(series.values):
        if v >= 1:
            return i
    raise AllZero(f"{series.country} {series.metric.value} series has no nonzero value")


def trim_to_outbreak(series: CaseSeries, window_days: int = DEFAULT_WINDOW_DAYS) -> CaseSeries:
    """Drop the leading zeros and keep at most ``window_days`` entries."""
    if window_days < 1:
        raise ValueError(f"window_days must be positive, got {window_days}")
    start = first_case_index(series)
    return series.slice(start, start + window_days)


def align_window(series: CaseSeries, reference: CaseSeries) -> CaseSeries:
    """Cut ``series`` to the calendar span of ``reference``.

    Used to window deaths on the first confirmed case rather than the first
    death, so leading zeros may remain.
    """
    offset = (reference.start_date - series.start_date).days
    if offset < 0 or offset + len(reference) > len(series):
        raise ValueError(
            f"{series.metric.value} series {series.start_date}..{series.end_date} does not cover "
            f"{reference.start_date}..{reference.end_date}"
        )
    return series.slice(offset, offset + len(reference))


def locate_series_file(data_path: str | Path, metric: "Metric | str") -> Path:
    """Resolve the CSV for ``metric``.

    A directory is searched for the canonical JHU file name. A file is used
    as-is when its name does not mention another metric; otherwise the sibling
    with the metric substituted is returned (``..._confirmed_...`` ->
    ``..._deaths_...``).
    """
    metric = Metric.parse(metric)
    path = Path(data_path)
    if path.is_dir():
        return path / JHU_FILENAMES[metric.value]
    other = Metric.DEATHS if metric is Metric.CONFIRMED else Metric.CONFIRMED
    if other.value in path.name and metric.value not in path.name:
        return path.with_name(path.name.replace(other.value, metric.value))
    return path
