import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from econofit.data_model import MacroSeries
from econofit.errors import InsufficientDataError, ValidationError
from econofit.stats import (
    PairedSeries,
    UndefinedStatisticError,
    correlate_param_series,
    durbin_watson,
    pearson_r,
    r_squared,
    regression_t,
    stddev,
    two_sample_t,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
vectors = st.lists(finite, min_size=3, max_size=40)


def test_pearson_known_values():
    assert pearson_r([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson_r([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    with pytest.raises(UndefinedStatisticError):
        pearson_r([1, 1, 1], [1, 2, 3])
    with pytest.raises(InsufficientDataError):
        pearson_r([1, 2], [1, 2])
    with pytest.raises(ValidationError):
        pearson_r([1, 2, 3], [1, 2])


@given(st.data())
def test_pearson_affine_invariance(data):
    n = data.draw(st.integers(3, 30))
    x = np.array(data.draw(st.lists(finite, min_size=n, max_size=n)))
    y = np.array(data.draw(st.lists(finite, min_size=n, max_size=n)))
    assume(np.ptp(x) > 1e-3 and np.ptp(y) > 1e-3)
    a = data.draw(st.floats(0.01, 100)) * data.draw(st.sampled_from([-1, 1]))
    b = data.draw(finite)
    r = pearson_r(x, y)
    assert pearson_r(a * x + b, y) == pytest.approx(math.copysign(1, a) * r, abs=1e-9)
    assert -1 <= r <= 1


def test_pearson_matches_numpy():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=50), rng.normal(size=50)
    assert pearson_r(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


def test_r_squared():
    assert r_squared([1, 2, 3], [1, 2, 3]) == 1.0
    assert r_squared([1, 2, 3], [2, 2, 2]) == 0.0
    assert r_squared([1, 2, 3], [3, 2, 1]) < 0
    with pytest.raises(UndefinedStatisticError):
        r_squared([2, 2, 2], [1, 2, 3])


def test_stddev_and_t():
    assert stddev([1, 2, 3, 4]) == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    assert two_sample_t([1, 1], [1, 1]) == 0.0
    assert two_sample_t([2, 2], [1, 1]) == math.inf
    x, y = [1.0, 2, 3, 4], [2.0, 4, 7]
    se = math.sqrt(np.var(x, ddof=1) / 4 + np.var(y, ddof=1) / 3)
    assert two_sample_t(x, y) == pytest.approx((2.5 - 13 / 3) / se)
    assert regression_t(4.0, 2.0) == 2.0
    with pytest.raises(ValidationError):
        regression_t(1.0, 0.0)


def test_durbin_watson():
    assert durbin_watson([1, -1, 1, -1]) == pytest.approx(12 / 4)
    assert durbin_watson([1, 1, 1]) == 0.0
    with pytest.raises(UndefinedStatisticError):
        durbin_watson([0, 0, 0])
    with pytest.raises(InsufficientDataError):
        durbin_watson([1, 2])


@given(vectors)
def test_durbin_watson_bounds(e):
    assume(sum(v * v for v in e) > 1e-6)
    assert 0 <= durbin_watson(e) <= 4 + 1e-12


def test_paired_series_match():
    p = PairedSeries.match({1: 1.0, 2: 2.0, 3: 3.0, 5: 5.0}, {2: 20, 3: 30, 4: 40, 5: 50})
    assert p.labels == (2, 3, 5) and p.ys == (20, 30, 50)
    with pytest.raises(InsufficientDataError):
        PairedSeries.match({1: 1}, {1: 2})


class _Fit:
    def __init__(self, **params):
        self.params_dict = params


def test_correlate_param_series():
    fits = {y: _Fit(mu=float(y)) for y in range(2000, 2006)}
    macro = MacroSeries("exports", {y: 2.0 * y + 1 for y in range(2002, 2010)})
    res = correlate_param_series(fits, "mu", macro)
    assert res.n == 4 and res.years == (2002, 2003, 2004, 2005)
    assert res.r == pytest.approx(1.0)
    assert res.t == pytest.approx(two_sample_t([2.0 * y + 1 for y in res.years], list(map(float, res.years))))
    with pytest.raises(InsufficientDataError):
        correlate_param_series({2000: _Fit(mu=1.0)}, "mu", macro)
