"""``epicast`` command line.

Exit codes: 0 ok, 1 usage, 2 unreadable or malformed data, 3 unknown
country, 4 model failure, 5 output error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import EpicastError, IngestError, UnknownCountry
from .evaluate import (
    ModelConfig,
    Regressor,
    SplitSpec,
    curve_csv,
    report_table_csv,
    timed_run,
)
from .ingest import (
    DEFAULT_WINDOW_DAYS,
    CaseSeries,
    Metric,
    align_window,
    extract_country_series,
    first_case_index,
    locate_series_file,
    read_jhu_csv,
    trim_to_outbreak,
)
from .models import BRRConfig, GPRConfig

logger = logging.getLogger("epicast")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_COUNTRY = 3
EXIT_MODEL = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    data_path: Path
    country: str
    metric: Metric = Metric.CONFIRMED
    window_days: int = DEFAULT_WINDOW_DAYS
    regressors: tuple[Regressor, ...] = (Regressor.BRR, Regressor.GPR)
    degree: int = 3
    standardize: bool = True
    optimize_gpr: bool = True
    seed: int = 42
    output_dir: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        if self.window_days < 4:
            raise CliError(f"window must be >= 4 days, got {self.window_days}", EXIT_USAGE)
        if self.degree < 1:
            raise CliError(f"degree must be >= 1, got {self.degree}", EXIT_USAGE)
        if not self.regressors:
            raise CliError("at least one regressor is required", EXIT_USAGE)

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            degree=self.degree,
            standardize=self.standardize,
            brr=BRRConfig(),
            gpr=GPRConfig(optimize=self.optimize_gpr, seed=self.seed),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise CliError(f"not a boolean: {text!r}", EXIT_USAGE)


def _parse_regressors(text: str) -> tuple[Regressor, ...]:
    names = [t for t in (s.strip() for s in text.split(",")) if t]
    try:
        return tuple(dict.fromkeys(Regressor.parse(n) for n in names))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}", EXIT_USAGE) from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value", EXIT_USAGE)
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_KEYS = {
    "data": ("data_path", Path),
    "data_path": ("data_path", Path),
    "country": ("country", str),
    "metric": ("metric", Metric.parse),
    "window": ("window_days", int),
    "window_days": ("window_days", int),
    "regressors": ("regressors", _parse_regressors),
    "degree": ("degree", int),
    "standardize": ("standardize", _parse_bool),
    "optimize_gpr": ("optimize_gpr", _parse_bool),
    "seed": ("seed", int),
    "out": ("output_dir", Path),
    "output_dir": ("output_dir", Path),
}


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over defaults."""
    merged: dict = {}
    if getattr(args, "config", None):
        for key, raw in read_config_file(args.config).items():
            if key not in _CONFIG_KEYS:
                raise CliError(f"unknown config key {key!r}", EXIT_USAGE)
            name, conv = _CONFIG_KEYS[key]
            try:
                merged[name] = conv(raw)
            except ValueError as exc:
                raise CliError(f"config {key}: {exc}", EXIT_USAGE) from None

    flags = {
        "data_path": Path(args.data) if args.data else None,
        "country": args.country,
        "metric": Metric.parse(args.metric) if getattr(args, "metric", None) else None,
        "window_days": args.window,
        "regressors": _parse_regressors(args.regressors) if getattr(args, "regressors", None) is not None else None,
        "degree": getattr(args, "degree", None),
        "standardize": getattr(args, "standardize", None),
        "optimize_gpr": getattr(args, "optimize_gpr", None),
        "seed": getattr(args, "seed", None),
        "output_dir": Path(args.out) if getattr(args, "out", None) else None,
    }
    merged.update({k: v for k, v in flags.items() if v is not None})

    if "data_path" not in merged and os.environ.get("EPICAST_DATA"):
        merged["data_path"] = Path(os.environ["EPICAST_DATA"])
    if "data_path" not in merged:
        raise CliError("no data path: pass --data or set EPICAST_DATA", EXIT_USAGE)
    if not merged.get("country"):
        raise CliError("--country is required", EXIT_USAGE)
    return RunConfig(**merged)


def load_series(data_path: Path, country: str, metric: Metric) -> CaseSeries:
    path = locate_series_file(data_path, metric)
    try:
        table = read_jhu_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_PARSE) from None
    except UnicodeDecodeError as exc:
        raise CliError(f"{path}: not UTF-8 text ({exc.reason})", EXIT_PARSE) from None
    except IngestError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    try:
        return extract_country_series(table, country, metric)
    except UnknownCountry as exc:
        raise CliError(str(exc), EXIT_COUNTRY) from None


def outbreak_series(config: RunConfig, metric: Metric) -> CaseSeries:
    """The window starts at the first confirmed case for both metrics."""
    try:
        confirmed = trim_to_outbreak(
            load_series(config.data_path, config.country, Metric.CONFIRMED), config.window_days
        )
    except CliError as exc:
        if metric is Metric.CONFIRMED or exc.code == EXIT_COUNTRY:
            raise
        logger.warning("no confirmed series to anchor the window (%s); trimming deaths on their own", exc)
        series = load_series(config.data_path, config.country, metric)
        return _trim(series, config.window_days)
    except IngestError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    if metric is Metric.CONFIRMED:
        return confirmed
    series = load_series(config.data_path, config.country, metric)
    try:
        return align_window(series, confirmed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def _trim(series: CaseSeries, window_days: int) -> CaseSeries:
    try:
        return trim_to_outbreak(series, window_days)
    except IngestError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def run_forecasts(config: RunConfig, metrics: list[Metric]):
    model_config = config.model_config()
    results = []
    for metric in metrics:
        series = outbreak_series(config, metric)
        for regressor in config.regressors:
            try:
                report = timed_run(series, regressor, SplitSpec.for_metric(metric), model_config)
            except EpicastError as exc:
                raise CliError(f"{regressor.value} on {metric.value}: {exc}", EXIT_MODEL) from None
            results.append((report, series))
    return results


def write_outputs(config: RunConfig, results) -> None:
    out = config.output_dir
    for report, series in results:
        stem = f"{report.regressor.value.lower()}_{report.metric.value}"
        _write(out / f"report_{stem}.json", report.to_json())
        _write(out / f"curve_{stem}.csv", curve_csv(report, series))
    table = report_table_csv(r for r, _ in results)
    _write(out / "report.csv", table)
    sys.stdout.write(table)


def cmd_inspect(args) -> int:
    config = build_run_config(args)
    series = load_series(config.data_path, config.country, config.metric)
    print(f"country: {series.country}")
    print(f"metric: {series.metric.value}")
    print(f"series_length: {len(series)}")
    print(f"start_date: {series.start_date.isoformat()}")
    print(f"end_date: {series.end_date.isoformat()}")
    print(f"first_value: {series.values[0]}")
    print(f"last_value: {series.values[-1]}")
    try:
        idx = first_case_index(series)
    except IngestError:
        print("trim_index: none (all zero)")
        return EXIT_OK
    window = trim_to_outbreak(series, config.window_days)
    print(f"trim_index: {idx}")
    print(f"trim_date: {window.start_date.isoformat()}")
    print(f"window_length: {len(window)}")
    print(f"window_end: {window.end_date.isoformat()}")
    return EXIT_OK


def cmd_forecast(args) -> int:
    config = build_run_config(args)
    write_outputs(config, run_forecasts(config, [config.metric]))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = build_run_config(args)
    write_outputs(config, run_forecasts(config, [Metric.CONFIRMED, Metric.DEATHS]))
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, metric: bool = True) -> None:
    p.add_argument("--data", help="JHU CSV file or directory (fallback: $EPICAST_DATA)")
    p.add_argument("--country", help="country name, exact case-insensitive match")
    if metric:
        p.add_argument("--metric", choices=[m.value for m in Metric], type=str.lower)
    p.add_argument("--window", type=int, help=f"days kept after the first case (default {DEFAULT_WINDOW_DAYS})")
    p.add_argument("--config", help="flat key=value config file; flags take precedence")


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degree", type=int, help="polynomial degree of the day index (default 3)")
    p.add_argument("--no-standardize", dest="standardize", action="store_const", const=False)
    p.add_argument("--no-optimize-gpr", dest="optimize_gpr", action="store_const", const=False)
    p.add_argument("--seed", type=int, help="seed for GPR hyperparameter restarts (default 42)")
    p.add_argument("--regressors", help="comma-separated subset of brr,gpr (default both)")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epicast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("inspect", help="summarize a country's series")
    _add_common(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("forecast", help="fit and score the regressors on one metric")
    _add_common(p)
    _add_model(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("compare", help="four-row comparison over confirmed and deaths")
    _add_common(p, metric=False)
    _add_model(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"epicast: {exc}", file=sys.stderr)
        return exc.code
