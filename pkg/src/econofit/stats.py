"""Correlation, goodness-of-fit and residual diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import InsufficientDataError, ValidationError


class UndefinedStatisticError(ValidationError):
    """The statistic is 0/0 for this input (constant series, zero residuals)."""


def _vec(values, name="values") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def _pair(xs, ys, minimum):
    x, y = _vec(xs, "xs"), _vec(ys, "ys")
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < minimum:
        raise InsufficientDataError(f"need at least {minimum} pairs, got {len(x)}")
    return x, y


def pearson_r(xs, ys) -> float:
    x, y = _pair(xs, ys, 3)
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise UndefinedStatisticError("correlation undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def r_squared(observed, predicted) -> float:
    """1 - SSE/SST; negative when the prediction is worse than the mean."""
    o, p = _pair(observed, predicted, 2)
    dev = o - o.mean()
    sst = float(dev @ dev)
    if sst == 0:
        raise UndefinedStatisticError("R^2 undefined for constant observations")
    resid = o - p
    return 1.0 - float(resid @ resid) / sst


def stddev(xs) -> float:
    """Sample standard deviation (n - 1 denominator)."""
    x = _vec(xs)
    if len(x) < 2:
        raise InsufficientDataError("standard deviation needs at least 2 values")
    return float(np.std(x, ddof=1))


def two_sample_t(xs, ys) -> float:
    """Welch statistic (mean(xs) - mean(ys)) / sqrt(s1^2/n1 + s2^2/n2)."""
    x, y = _vec(xs, "xs"), _vec(ys, "ys")
    if len(x) < 2 or len(y) < 2:
        raise InsufficientDataError("t statistic needs at least 2 values per sample")
    diff = float(x.mean() - y.mean())
    se2 = np.var(x, ddof=1) / len(x) + np.var(y, ddof=1) / len(y)
    if se2 == 0:
        if diff == 0:
            return 0.0
        return math.copysign(math.inf, diff)
    return diff / math.sqrt(se2)


def regression_t(coefficient: float, std_error: float) -> float:
    if not std_error > 0:
        raise ValidationError(f"standard error must be positive, got {std_error!r}")
    return coefficient / std_error


def durbin_watson(residuals) -> float:
    e = _vec(residuals, "residuals")
    if len(e) < 3:
        raise InsufficientDataError("Durbin-Watson needs at least 3 residuals")
    denom = float(e @ e)
    if denom == 0:
        raise UndefinedStatisticError("Durbin-Watson undefined for all-zero residuals")
    d = np.diff(e)
    return float(d @ d) / denom


@dataclass(frozen=True)
class PairedSeries:
    labels: tuple
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if not len(self.labels) == len(self.xs) == len(self.ys):
            raise ValidationError("paired series need equal lengths")
        if len(self.labels) < 3:
            raise InsufficientDataError(f"need at least 3 pairs, got {len(self.labels)}")

    @classmethod
    def match(cls, left: Mapping, right: Mapping) -> "PairedSeries":
        """Pair two label-indexed mappings over their common labels."""
        common = sorted(set(left) & set(right))
        return cls(tuple(common), tuple(float(left[k]) for k in common), tuple(float(right[k]) for k in common))

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    t: float
    n: int
    years: tuple[int, ...]


def _samples(obj) -> Mapping[int, float]:
    return obj.samples if hasattr(obj, "samples") else obj


def correlate_param_series(
    fits: Mapping[int, object],
    param_selector: Callable[[object], float] | str,
    macro,
) -> CorrelationResult:
    """Correlate a fitted parameter with a macro indicator over shared years.

    ``fits`` maps year to a fit result (anything ``param_selector`` accepts);
    a string selector picks ``result.params_dict[name]``. The t value is the
    Welch statistic of the indicator column against the parameter column.
    """
    if isinstance(param_selector, str):
        name = param_selector
        param_selector = lambda fit: fit.params_dict[name]  # noqa: E731
    values = {int(year): float(param_selector(fit)) for year, fit in fits.items()}
    indicator = _samples(macro)
    common = sorted(set(values) & set(indicator))
    if len(common) < 3:
        raise InsufficientDataError(f"need at least 3 overlapping years, got {len(common)}")
    pairs = PairedSeries.match(values, {y: indicator[y] for y in common})
    r = pearson_r(pairs.xs, pairs.ys)
    t = two_sample_t(pairs.ys, pairs.xs)
    return CorrelationResult(r, t, pairs.n, tuple(pairs.labels))
