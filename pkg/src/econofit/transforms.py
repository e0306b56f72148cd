"""Turn decile and binned tables into (x, probability) point sets.

Cumulative sets carry probabilities in percent, as the fitted magnitudes
(log10 of 100 is 2, ln of 90 is about 4.5) are only meaningful on that scale.
Density sets carry population fractions, or percent on request.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .data_model import BinnedIncomeTable, DecileSeries, Kind
from .errors import (
    DomainError,
    IncompatibleSeriesError,
    InsufficientDataError,
    UnsupportedKindError,
    ValidationError,
)

logger = logging.getLogger(__name__)

MIN_LOG_POINTS = 4
OPEN_BIN_FACTOR = 1.5


class Scale(str, Enum):
    LINEAR = "linear"
    LOG10 = "log10"
    LN = "ln"


class Orientation(str, Enum):
    CDF = "cdf"
    CCDF = "ccdf"
    PDF = "pdf"


_LOG_BASES = {10: Scale.LOG10, "10": Scale.LOG10, "e": Scale.LN, math.e: Scale.LN}
_LOG_FUNCS = {Scale.LOG10: math.log10, Scale.LN: math.log}


@dataclass(frozen=True)
class ProbePointSet:
    """Ordered ``(x, p)`` pairs ready for fitting.

    ``percent`` says whether linear-scale probabilities are percentages (cdf,
    ccdf) or fractions (pdf). Point order is the fitting order; for decile
    sets it is ascending in x, for growth sets it follows the sorted deltas.
    """

    points: tuple[tuple[float, float], ...]
    orientation: Orientation
    x_scale: Scale = Scale.LINEAR
    p_scale: Scale = Scale.LINEAR
    percent: bool = True

    def __post_init__(self):
        pts = tuple((float(x), float(p)) for x, p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        object.__setattr__(self, "x_scale", Scale(self.x_scale))
        object.__setattr__(self, "p_scale", Scale(self.p_scale))
        for x, p in pts:
            if not (math.isfinite(x) and math.isfinite(p)):
                raise ValidationError(f"non-finite point ({x!r}, {p!r})")
        if self.p_scale is Scale.LINEAR:
            top = 100.0 if self.percent else 1.0
            ps = [p for _, p in pts]
            if any(p < 0 or p > top + 1e-9 for p in ps):
                raise ValidationError(f"probabilities must lie in [0, {top:g}]")
            if self.orientation is Orientation.CDF and any(b < a for a, b in zip(ps, ps[1:])):
                raise ValidationError("cdf probabilities must be non-decreasing")
            if self.orientation is Orientation.CCDF and any(b > a for a, b in zip(ps, ps[1:])):
                raise ValidationError("ccdf probabilities must be non-increasing")
            if self.orientation is Orientation.PDF and pts:
                total = math.fsum(ps)
                if abs(total - top) > 1e-9 * top:
                    raise ValidationError(f"density values sum to {total!r}, expected {top:g}")

    @property
    def x(self) -> np.ndarray:
        return np.array([x for x, _ in self.points], dtype=float)

    @property
    def p(self) -> np.ndarray:
        return np.array([p for _, p in self.points], dtype=float)

    @property
    def is_log_scaled(self) -> bool:
        return self.x_scale is not Scale.LINEAR or self.p_scale is not Scale.LINEAR

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "p"])
        for x, p in self.points:
            writer.writerow([repr(x), repr(p)])
        return buf.getvalue()


@dataclass(frozen=True)
class GrowthSeries:
    base_year: int
    later_year: int
    deltas_sorted: tuple[float, ...]
    cumulated: tuple[float, ...]
    basis: str

    @property
    def label(self) -> str:
        return f"{self.later_year}/{self.base_year}"


def cumulate(values: Sequence[float]) -> list[float]:
    """Running totals X_i = x_1 + ... + x_i."""
    if len(values) == 0:
        raise ValidationError("cannot cumulate an empty sequence")
    out, total = [], 0.0
    for v in values:
        total += v
        out.append(total)
    return out


def _decile_probabilities(n: int) -> list[float]:
    return [10.0 * i for i in range(1, n + 1)]


def build_cdf_points(series: DecileSeries) -> ProbePointSet:
    """Anchor (0, 0%) followed by (X_i, 10 i %) for each cumulated decile.

    Nine-value upper- and lower-limit series stop at 90%. For lower limits the
    missing first-decile value is 0, which coincides with the anchor.
    """
    xs = cumulate(series.values)
    ps = _decile_probabilities(len(xs))
    return ProbePointSet(((0.0, 0.0), *zip(xs, ps)), Orientation.CDF)


def build_ccdf_points(series: DecileSeries) -> ProbePointSet:
    """Anchor (0, 100%) followed by (X_i, 100 - 10 i %)."""
    xs = cumulate(series.values)
    ps = [100.0 - p for p in _decile_probabilities(len(xs))]
    return ProbePointSet(((0.0, 100.0), *zip(xs, ps)), Orientation.CCDF)


def _scale_for(base) -> Scale:
    try:
        return _LOG_BASES[base]
    except (KeyError, TypeError):
        raise ValidationError(f"unsupported log base {base!r}; use 10 or 'e'") from None


def log_scale(points: ProbePointSet, x_base=10, p_base=10) -> ProbePointSet:
    """Take logarithms of both axes, dropping points where x or p is 0."""
    if points.is_log_scaled:
        raise ValidationError("point set is already log-scaled")
    xs, ps = _scale_for(x_base), _scale_for(p_base)
    fx, fp = _LOG_FUNCS[xs], _LOG_FUNCS[ps]
    kept = []
    for x, p in points.points:
        if x == 0 or p == 0:
            continue
        if x < 0 or p < 0:
            raise DomainError(f"cannot take the logarithm of point ({x!r}, {p!r})")
        kept.append((fx(x), fp(p)))
    if len(kept) < MIN_LOG_POINTS:
        raise InsufficientDataError(
            f"only {len(kept)} points survive log scaling; need {MIN_LOG_POINTS}"
        )
    return ProbePointSet(tuple(kept), points.orientation, xs, ps, points.percent)


def bin_representative(lower: float, upper: float | None) -> float:
    """Geometric midpoint of a closed bin; 1.5 x lower edge for the open top bin.

    A bin starting at zero has no geometric midpoint, so its arithmetic
    midpoint is used instead.
    """
    if upper is None:
        if lower <= 0:
            raise ValidationError("open-ended bin needs a positive lower edge")
        return lower * OPEN_BIN_FACTOR
    if lower == 0:
        return upper / 2.0
    return math.sqrt(lower * upper)


def build_pdf_points(table: BinnedIncomeTable, percent: bool = False) -> ProbePointSet:
    """Density points (log10 x*, log10 P) for each bin with a non-zero share."""
    pts = []
    for b in table.bins:
        if b.share == 0:
            logger.warning("year %s: dropping zero-share bin starting at %s", table.year, b.lower)
            continue
        share = b.share * 100.0 if percent else b.share
        pts.append((math.log10(bin_representative(b.lower, b.upper)), math.log10(share)))
    return ProbePointSet(tuple(pts), Orientation.PDF, Scale.LOG10, Scale.LOG10, percent)


def real_growth(delta_nominal: float, delta_price: float) -> float:
    """Deflate a nominal change by a price-level ratio (P_later / P_base)."""
    if not delta_price > 0:
        raise DomainError(f"price ratio must be positive, got {delta_price!r}")
    return delta_nominal / delta_price


def check_compatible(base: DecileSeries, later: DecileSeries) -> None:
    for attr in ("variable", "kind", "unit"):
        if getattr(base, attr) != getattr(later, attr):
            raise IncompatibleSeriesError(
                f"{attr} differs: {getattr(base, attr)!s} ({base.year}) vs {getattr(later, attr)!s} ({later.year})"
            )
    if len(base) != len(later):
        raise IncompatibleSeriesError(f"length differs: {len(base)} vs {len(later)}")
    if later.year <= base.year:
        raise IncompatibleSeriesError(f"later year {later.year} must follow base year {base.year}")


def build_growth_points(
    base: DecileSeries, later: DecileSeries, deflator: float | None = None
) -> tuple[GrowthSeries, ProbePointSet]:
    """Per-decile changes between two years, sorted, cumulated and paired
    with ccdf probabilities 90%, 80%, ... (down to 0% for ten deciles)."""
    check_compatible(base, later)
    deltas = [b - a for a, b in zip(base.values, later.values)]
    basis = later.basis.value
    if deflator is not None:
        deltas = [real_growth(d, deflator) for d in deltas]
        basis = "real"
    deltas.sort()
    cumulated = cumulate(deltas)
    growth = GrowthSeries(base.year, later.year, tuple(deltas), tuple(cumulated), basis)
    ps = [100.0 - p for p in _decile_probabilities(len(cumulated))]
    return growth, ProbePointSet(tuple(zip(cumulated, ps)), Orientation.CCDF)


def compute_gini(series: DecileSeries) -> float:
    """Gini coefficient from the decile Lorenz curve (trapezoid rule)."""
    if series.kind is not Kind.MEAN:
        raise UnsupportedKindError(f"Gini needs decile means, got {series.kind.value}")
    values = np.asarray(series.values, dtype=float)
    lorenz = np.concatenate(([0.0], np.cumsum(values) / values.sum()))
    weight = 1.0 / len(values)
    area = weight * np.sum(lorenz[1:] + lorenz[:-1]) / 2.0
    return float(max(0.0, 1.0 - 2.0 * area))


__all__ = [
    "Scale",
    "Orientation",
    "ProbePointSet",
    "GrowthSeries",
    "cumulate",
    "build_cdf_points",
    "build_ccdf_points",
    "log_scale",
    "bin_representative",
    "build_pdf_points",
    "real_growth",
    "build_growth_points",
    "check_compatible",
    "compute_gini",
]
