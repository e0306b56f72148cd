"""Decile tables, binned income tables and macro-indicator series.

All three types are frozen after construction. The ``parse_*`` functions read
the CSV layouts documented in the README and the ``serialize_*`` functions
write them back, so ``parse(serialize(parse(text)))`` is stable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import EconofitError, ParseError, ValidationError

SHARE_TOLERANCE = 1e-6


class Variable(str, Enum):
    INCOME = "income"
    EXPENDITURE = "expenditure"
    WEALTH = "wealth"
    PENSION = "pension"


class Kind(str, Enum):
    MEAN = "mean"
    UPPER_LIMIT = "upper_limit"
    LOWER_LIMIT = "lower_limit"


class Basis(str, Enum):
    NOMINAL = "nominal"
    REAL = "real"


class Indicator(str, Enum):
    EXPORTS = "exports"
    GINI = "gini"
    INFLATION = "inflation"
    INCOME_PER_CAPITA = "income_per_capita"
    MONEY_STOCK = "money_stock"
    AGENT_COUNT = "agent_count"


def _coerce(enum_cls, value, what):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ValidationError(f"invalid {what} {value!r}; expected one of {allowed}") from None


@dataclass(frozen=True)
class DecileSeries:
    """One year of decile values for one variable and measurement kind.

    ``values`` has ten entries for decile means and nine for upper/lower
    limits, where statistics offices do not publish the top decile.
    """

    year: int
    variable: Variable
    kind: Kind
    basis: Basis
    unit: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "variable", _coerce(Variable, self.variable, "variable"))
        object.__setattr__(self, "kind", _coerce(Kind, self.kind, "kind"))
        object.__setattr__(self, "basis", _coerce(Basis, self.basis, "basis"))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "year", int(self.year))
        values = self.values
        if len(values) not in (9, 10):
            raise ValidationError(f"expected 9 or 10 decile values, got {len(values)}")
        if self.kind is Kind.MEAN and len(values) != 10:
            raise ValidationError("decile means need all 10 values")
        for i, v in enumerate(values, start=1):
            if not math.isfinite(v) or v <= 0:
                raise ValidationError(f"decile d{i} must be positive, got {v!r}")
        for i in range(1, len(values)):
            if values[i] < values[i - 1]:
                raise ValidationError(
                    f"deciles not non-decreasing: d{i}={values[i - 1]!r} > d{i + 1}={values[i]!r}"
                )
        if not self.unit:
            raise ValidationError("unit label must be non-empty")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Bin:
    lower: float
    upper: float | None
    share: float

    @property
    def is_open(self) -> bool:
        return self.upper is None


@dataclass(frozen=True)
class BinnedIncomeTable:
    """Population shares per income bracket; the final bracket may be open."""

    year: int
    bins: tuple[Bin, ...]

    def __post_init__(self):
        bins = tuple(self.bins)
        object.__setattr__(self, "bins", bins)
        if not bins:
            raise ValidationError("binned table needs at least one bin")
        for i, b in enumerate(bins):
            if b.share < 0 or not math.isfinite(b.share):
                raise ValidationError(f"bin {i}: share must be >= 0, got {b.share!r}")
            if b.lower < 0:
                raise ValidationError(f"bin {i}: negative lower edge {b.lower!r}")
            if b.upper is not None and not b.upper > b.lower:
                raise ValidationError(f"bin {i}: upper edge {b.upper!r} <= lower edge {b.lower!r}")
            if b.upper is None and i != len(bins) - 1:
                raise ValidationError(f"bin {i}: only the final bin may be open-ended")
            if i:
                prev = bins[i - 1]
                if b.lower < prev.upper:
                    raise ValidationError(f"bins {i - 1} and {i} overlap")
                if b.lower != prev.upper:
                    raise ValidationError(f"bins {i - 1} and {i} are not contiguous")
        total = math.fsum(b.share for b in bins)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"bin shares sum to {total!r}, expected 1")

    @property
    def shares(self) -> tuple[float, ...]:
        return tuple(b.share for b in self.bins)


@dataclass(frozen=True)
class MacroSeries:
    """Year-indexed values of one external indicator."""

    indicator: Indicator
    samples: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "indicator", _coerce(Indicator, self.indicator, "indicator"))
        items = sorted((int(y), float(v)) for y, v in dict(self.samples).items())
        object.__setattr__(self, "samples", MappingProxyType(dict(items)))

    @classmethod
    def from_pairs(cls, indicator, pairs: Iterable[tuple[int, float]]) -> "MacroSeries":
        seen: dict[int, float] = {}
        for year, value in pairs:
            if year in seen:
                raise ValidationError(f"duplicate {indicator} sample for year {year}")
            seen[year] = value
        return cls(indicator, seen)

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(self.samples)

    def __eq__(self, other):
        if not isinstance(other, MacroSeries):
            return NotImplemented
        return self.indicator == other.indicator and dict(self.samples) == dict(other.samples)

    def __hash__(self):
        return hash((self.indicator, tuple(self.samples.items())))


# -- CSV helpers --------------------------------------------------------------

DECILE_HEADER = ["year", "variable", "kind", "basis", "unit"] + [f"d{i}" for i in range(1, 11)]
BINNED_HEADER = ["year", "lower", "upper", "share"]
MACRO_HEADER = ["indicator", "year", "value"]


def _rows(text: str, header: Sequence[str]):
    """Yield ``(line_number, cells)`` for non-blank data rows.

    A header row is optional; when present it must match ``header`` exactly.
    """
    reader = csv.reader(io.StringIO(text))
    first = True
    for cells in reader:
        line = reader.line_num
        cells = [c.strip() for c in cells]
        if not cells or all(c == "" for c in cells):
            continue
        if first:
            first = False
            if cells[0].lower() == header[0]:
                if [c.lower() for c in cells] != list(header):
                    raise ParseError(f"unexpected header {cells!r}", line)
                continue
        yield line, cells


def _number(token: str, line: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what}: not a number: {token!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"{what}: non-finite value {token!r}", line)
    return value


def _year(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"year: not an integer: {token!r}", line) from None


def format_number(value: float) -> str:
    """Shortest text that parses back to ``value``; integral values lose the '.0'."""
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def parse_decile_csv(text: str) -> list[DecileSeries]:
    return [_decile_row(line, cells) for line, cells in _rows(text, DECILE_HEADER)]


def parse_decile_csv_lenient(text: str) -> tuple[list[DecileSeries], dict[str, str]]:
    """Like :func:`parse_decile_csv` but collects bad rows instead of raising.

    Failures are keyed by the row's year when it can be read, else ``line N``.
    """
    out, failures = [], {}
    for line, cells in _rows(text, DECILE_HEADER):
        try:
            out.append(_decile_row(line, cells))
        except EconofitError as exc:
            key = cells[0] if cells and cells[0].lstrip("-").isdigit() else f"line {line}"
            failures[key] = f"{type(exc).__name__}: {exc}"
    return out, failures


def _decile_row(line: int, cells: list[str]) -> DecileSeries:
    if len(cells) == 14:
        cells = cells + [""]
    if len(cells) != 15:
        raise ParseError(f"expected 15 fields, got {len(cells)}", line)
    year = _year(cells[0], line)
    raw = cells[5:]
    if raw[-1] == "":
        raw = raw[:-1]
    if any(tok == "" for tok in raw):
        raise ParseError("only d10 may be left empty", line)
    values = [_number(tok, line, f"d{i}") for i, tok in enumerate(raw, start=1)]
    try:
        return DecileSeries(year, cells[1], cells[2], cells[3], cells[4], tuple(values))
    except ValidationError as exc:
        raise ValidationError(f"line {line}: {exc}") from None


def serialize_decile_csv(series: Iterable[DecileSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DECILE_HEADER)
    for s in series:
        values = [format_number(v) for v in s.values] + [""] * (10 - len(s.values))
        writer.writerow([s.year, s.variable.value, s.kind.value, s.basis.value, s.unit, *values])
    return buf.getvalue()


def _binned_groups(text: str) -> dict[int, list[tuple[int, float, float | None, float]]]:
    groups: dict[int, list] = {}
    for line, cells in _rows(text, BINNED_HEADER):
        if len(cells) != 4:
            raise ParseError(f"expected 4 fields, got {len(cells)}", line)
        year = _year(cells[0], line)
        lower = _number(cells[1], line, "lower")
        upper = None if cells[2] == "" else _number(cells[2], line, "upper")
        share = _number(cells[3], line, "share")
        groups.setdefault(year, []).append((line, lower, upper, share))
    return groups


def _make_table(year: int, rows) -> BinnedIncomeTable:
    rows = sorted(rows, key=lambda r: r[1])
    total = math.fsum(r[3] for r in rows)
    if abs(total - 1.0) > SHARE_TOLERANCE:
        raise ValidationError(f"year {year}: bin shares sum to {total!r}, expected 1 within {SHARE_TOLERANCE}")
    bins = [Bin(lower, upper, share / total) for _, lower, upper, share in rows]
    return BinnedIncomeTable(year, tuple(bins))


def parse_binned_tables(text: str) -> list[BinnedIncomeTable]:
    """Parse a binned CSV holding any number of years, sorted by year."""
    return [_make_table(year, rows) for year, rows in sorted(_binned_groups(text).items())]


def parse_binned_csv(text: str) -> BinnedIncomeTable:
    """Parse a binned CSV holding exactly one year."""
    groups = _binned_groups(text)
    if len(groups) != 1:
        raise ValidationError(f"expected bins for exactly one year, found {len(groups)}")
    ((year, rows),) = groups.items()
    return _make_table(year, rows)


def serialize_binned_csv(tables: BinnedIncomeTable | Iterable[BinnedIncomeTable]) -> str:
    if isinstance(tables, BinnedIncomeTable):
        tables = [tables]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BINNED_HEADER)
    for t in tables:
        for b in t.bins:
            upper = "" if b.upper is None else format_number(b.upper)
            writer.writerow([t.year, format_number(b.lower), upper, repr(b.share)])
    return buf.getvalue()


def parse_macro_csv(text: str) -> list[MacroSeries]:
    grouped: dict[str, list[tuple[int, float]]] = {}
    for line, cells in _rows(text, MACRO_HEADER):
        if len(cells) != 3:
            raise ParseError(f"expected 3 fields, got {len(cells)}", line)
        indicator = cells[0]
        _coerce(Indicator, indicator, "indicator")
        year = _year(cells[1], line)
        value = _number(cells[2], line, "value")
        if any(y == year for y, _ in grouped.get(indicator, ())):
            raise ValidationError(f"line {line}: duplicate {indicator} sample for year {year}")
        grouped.setdefault(indicator, []).append((year, value))
    return [MacroSeries.from_pairs(ind, pairs) for ind, pairs in grouped.items()]


def serialize_macro_csv(series: Iterable[MacroSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MACRO_HEADER)
    for s in series:
        for year, value in s.samples.items():
            writer.writerow([s.indicator.value, year, repr(value)])
    return buf.getvalue()
