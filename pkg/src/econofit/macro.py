"""Per-year batch fitting, parameter time series and correlation reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import models
from .data_model import BinnedIncomeTable, DecileSeries, Indicator, MacroSeries
from .errors import (
    BatchError,
    EconofitError,
    InsufficientDataError,
    ParseError,
    ReportError,
    UnknownParameterError,
    ValidationError,
)
from .fitting import FitConfig, FitResult, fit
from .stats import UndefinedStatisticError, correlate_param_series
from .transforms import (
    ProbePointSet,
    build_ccdf_points,
    build_cdf_points,
    build_pdf_points,
    log_scale,
)

logger = logging.getLogger(__name__)

DEFAULT_MAPPING = (
    ("mu", "exports"),
    ("g", "gini"),
    ("fugacity", "inflation"),
    ("T", "income_per_capita"),
)


def thread_count() -> int:
    """Worker cap from ``ECONOFIT_THREADS`` (defaults to the CPU count, max 8)."""
    raw = os.environ.get("ECONOFIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring non-integer ECONOFIT_THREADS=%r", raw)
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class TransformConfig:
    """How a yearly table becomes a point set for ``model_id``.

    Logistic fits use the log10/log10 cdf, Fermi-Dirac fits the ln/ln ccdf,
    polynomials the linear ccdf with both anchors. Binned tables always go to
    log10/log10 density points, in percent unless ``pdf_percent`` is off.
    """

    model_id: str
    degree: int = 3
    pdf_percent: bool = True

    def __post_init__(self):
        models.check_model_id(self.model_id)

    def points(self, item: DecileSeries | BinnedIncomeTable) -> ProbePointSet:
        if isinstance(item, BinnedIncomeTable):
            return build_pdf_points(item, percent=self.pdf_percent)
        if self.model_id == "fd_pdf":
            raise ValidationError("fd_pdf fits need binned income tables")
        if self.model_id == "logistic":
            return log_scale(build_cdf_points(item), 10, 10)
        if self.model_id == "fd_ccdf":
            return log_scale(build_ccdf_points(item), "e", "e")
        return build_ccdf_points(item)


@dataclass(frozen=True)
class YearRow:
    params: Mapping[str, float]
    r_squared: float | None = None
    durbin_watson: float | None = None
    t_values: Mapping[str, float] = field(default_factory=dict)
    unit: str | None = None
    fit: FitResult | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_fit(cls, result: FitResult, unit: str | None = None) -> "YearRow":
        return cls(
            params=dict(zip(result.param_names, result.param_values)),
            r_squared=result.r_squared,
            durbin_watson=result.durbin_watson,
            t_values=dict(zip(result.param_names, result.t_values)),
            unit=unit,
            fit=result,
        )


@dataclass(frozen=True)
class YearlyFitTable:
    model_id: str
    rows: Mapping[int, YearRow]
    failures: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rows", dict(sorted(self.rows.items())))
        object.__setattr__(self, "failures", dict(sorted(self.failures.items(), key=lambda kv: str(kv[0]))))

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(self.rows)

    @property
    def param_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for row in self.rows.values():
            for name in row.params:
                if name not in names:
                    names.append(name)
        return tuple(names)

    def to_dict(self) -> dict:
        rows = {}
        for year, row in self.rows.items():
            entry = {"params": dict(row.params)}
            if row.t_values:
                entry["t_values"] = dict(row.t_values)
            entry["r_squared"] = row.r_squared
            entry["durbin_watson"] = row.durbin_watson
            if row.unit is not None:
                entry["unit"] = row.unit
            if row.fit is not None:
                entry["std_errors"] = dict(zip(row.fit.param_names, row.fit.std_errors))
                entry["residuals"] = list(row.fit.residuals)
                entry["iterations"] = row.fit.iterations
                entry["converged"] = row.fit.converged
            rows[str(year)] = entry
        return {
            "model": self.model_id,
            "rows": rows,
            "failures": {str(y): msg for y, msg in self.failures.items()},
        }

    def to_csv(self) -> str:
        """One line per year: each parameter followed by its t value, then R^2 (%) and DW."""
        names = self.param_names
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["year"]
        for name in names:
            header += [name, f"{name}_t"]
        writer.writerow(header + ["r_squared_pct", "durbin_watson"])
        for year, row in self.rows.items():
            line = [year]
            for name in names:
                line += [_cell(row.params.get(name)), _cell(row.t_values.get(name))]
            r2 = None if row.r_squared is None else 100.0 * row.r_squared
            writer.writerow(line + [_cell(r2), _cell(row.durbin_watson)])
        return buf.getvalue()


def _cell(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def _item_key(item) -> tuple:
    if isinstance(item, DecileSeries):
        return ("decile", item.variable.value, item.kind.value)
    return ("binned",)


def batch_fit(
    series_list: Sequence[DecileSeries | BinnedIncomeTable],
    model_id: str,
    transform_config: TransformConfig | None = None,
    fit_config: FitConfig | None = None,
    failures: Mapping | None = None,
) -> YearlyFitTable:
    """Fit every year independently; failed years are recorded, not dropped.

    ``failures`` carries problems found before fitting (unparseable rows) so
    they appear in the table alongside fit failures.
    """
    transform_config = transform_config or TransformConfig(model_id)
    if transform_config.model_id != model_id:
        raise ValidationError("transform config was built for a different model")
    items = list(series_list)
    prior = dict(failures or {})
    if not items:
        raise BatchError("no series to fit", prior)
    keys = {_item_key(item) for item in items}
    if len(keys) > 1:
        raise ValidationError("batch mixes series of different variable or kind")
    years = [item.year for item in items]
    if len(set(years)) != len(years):
        raise ValidationError("batch holds more than one series for the same year")

    def run(item):
        try:
            points = transform_config.points(item)
            result = fit(model_id, points, degree=transform_config.degree, config=fit_config)
            return item.year, YearRow.from_fit(result, getattr(item, "unit", None)), None
        except EconofitError as exc:
            return item.year, None, f"{type(exc).__name__}: {exc}"

    items.sort(key=lambda s: s.year)
    workers = min(thread_count(), len(items))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, items))
    else:
        outcomes = [run(item) for item in items]
    rows = {year: row for year, row, err in outcomes if row is not None}
    prior.update({year: err for year, row, err in outcomes if err is not None})
    if not rows:
        raise BatchError("every year failed to fit", prior)
    return YearlyFitTable(model_id, rows, prior)


def split_by_unit(table: YearlyFitTable) -> list[YearlyFitTable]:
    """Cut a table into runs of consecutive years sharing one currency unit."""
    segments: list[dict[int, YearRow]] = []
    last_unit = object()
    for year, row in table.rows.items():
        if row.unit != last_unit:
            segments.append({})
            last_unit = row.unit
        segments[-1][year] = row
    return [YearlyFitTable(table.model_id, seg) for seg in segments]


@dataclass(frozen=True)
class ParamSeries:
    name: str
    samples: Mapping[int, float]


def param_time_series(table: YearlyFitTable, param_name: str) -> ParamSeries:
    """Year -> parameter value; Fermi-Dirac tables also expose ``fugacity``."""
    is_fd = table.model_id in ("fd_ccdf", "fd_pdf")
    known = set(table.param_names)
    if param_name not in known and not (is_fd and param_name == "fugacity"):
        raise UnknownParameterError(f"table for {table.model_id} has no parameter {param_name!r}")
    samples = {}
    for year, row in table.rows.items():
        if param_name in row.params:
            samples[year] = float(row.params[param_name])
        elif param_name == "fugacity":
            samples[year] = models.fugacity(row.params["mu"], row.params["T"])
    return ParamSeries(param_name, samples)


def parse_params_csv(text: str, model_id: str) -> YearlyFitTable:
    """Load published per-year parameters (header ``year,<param>,...``).

    Extra columns such as ``fugacity`` or ``r_squared`` are kept; blank cells
    mean the value was not reported for that year.
    """
    models.check_model_id(model_id)
    reader = csv.reader(io.StringIO(text))
    header = None
    rows: dict[int, YearRow] = {}
    for cells in reader:
        cells = [c.strip() for c in cells]
        if not cells or all(c == "" for c in cells):
            continue
        if header is None:
            header = cells
            if header[0] != "year":
                raise ParseError("params CSV must start with a 'year' column", reader.line_num)
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", reader.line_num)
        try:
            year = int(cells[0])
            values = {name: float(v) for name, v in zip(header[1:], cells[1:]) if v != ""}
        except ValueError as exc:
            raise ParseError(str(exc), reader.line_num) from None
        if year in rows:
            raise ValidationError(f"duplicate year {year} in params CSV")
        r2 = values.pop("r_squared", None)
        dw = values.pop("durbin_watson", None)
        rows[year] = YearRow(params=values, r_squared=r2, durbin_watson=dw)
    return YearlyFitTable(model_id, rows)


@dataclass(frozen=True)
class CorrelationEntry:
    param: str
    indicator: str
    r: float
    t: float
    n: int
    years: tuple[int, ...]


@dataclass(frozen=True)
class CorrelationReport:
    entries: tuple[CorrelationEntry, ...]
    skipped: Mapping[str, str] = field(default_factory=dict)
    label: str | None = None

    def __post_init__(self):
        for e in self.entries:
            if e.n < 3:
                raise ValidationError(f"entry {e.param}/{e.indicator} has fewer than 3 years")

    def entry(self, param: str, indicator: str) -> CorrelationEntry:
        for e in self.entries:
            if e.param == param and e.indicator == indicator:
                return e
        raise KeyError((param, indicator))

    def to_dict(self) -> dict:
        out = {
            "entries": [
                {
                    "param": e.param,
                    "indicator": e.indicator,
                    "r": e.r,
                    "t": e.t,
                    "n": e.n,
                    "years": list(e.years),
                }
                for e in self.entries
            ],
            "skipped": dict(self.skipped),
        }
        if self.label is not None:
            out = {"label": self.label, **out}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["param", "indicator", "correlation_coefficient", "t_value", "n", "first_year", "last_year"])
        for e in self.entries:
            writer.writerow([e.param, e.indicator, repr(e.r), repr(e.t), e.n, e.years[0], e.years[-1]])
        return buf.getvalue()


def _macro_lookup(macro_sets) -> dict[str, MacroSeries]:
    if isinstance(macro_sets, Mapping):
        return {Indicator(k).value: v for k, v in macro_sets.items()}
    return {m.indicator.value: m for m in macro_sets}


def build_report(
    fd_table: YearlyFitTable,
    macro_sets: Iterable[MacroSeries] | Mapping[str, MacroSeries],
    mapping: Sequence[tuple[str, str]] = DEFAULT_MAPPING,
    label: str | None = None,
) -> CorrelationReport:
    """Correlate each mapped parameter with its indicator over shared years."""
    macro = _macro_lookup(macro_sets)
    entries, skipped = [], {}
    for param, indicator in mapping:
        key = f"{param}/{indicator}"
        if indicator not in macro:
            skipped[key] = "indicator not supplied"
            continue
        try:
            series = param_time_series(fd_table, param)
        except UnknownParameterError as exc:
            skipped[key] = str(exc)
            continue
        try:
            res = correlate_param_series(series.samples, lambda v: v, macro[indicator])
        except (InsufficientDataError, UndefinedStatisticError) as exc:
            skipped[key] = str(exc)
            continue
        entries.append(CorrelationEntry(param, indicator, res.r, res.t, res.n, res.years))
    if not entries:
        raise ReportError("no parameter/indicator pairing had 3 or more overlapping years")
    return CorrelationReport(tuple(entries), skipped, label)
