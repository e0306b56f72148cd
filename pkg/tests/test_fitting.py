import math

import numpy as np
import pytest

from econofit import models
from econofit.errors import FitError, FlatDataError, InsufficientDataError, SingularFitError, UnknownModelError, ValidationError
from econofit.fitting import FitConfig, default_init, fit, fit_nls, fit_polynomial, nls_xy, polyfit_xy
from econofit.models import FermiDiracParams, LogisticParams
from econofit.transforms import Orientation, ProbePointSet, Scale, build_ccdf_points, build_cdf_points, log_scale

from oracles import cramer_polyfit


def logistic_points(fin):
    return log_scale(build_cdf_points(fin), 10, 10)


def fd_points(fin):
    return log_scale(build_ccdf_points(fin), "e", "e")


def test_logistic_finland_1987(fin1987):
    res = fit("logistic", logistic_points(fin1987))
    a, b, c = res.param_values
    assert a == pytest.approx(2.678, rel=0.05)
    assert b == pytest.approx(4.321, rel=0.05)
    assert c == pytest.approx(-0.8231, rel=0.10)
    assert res.r_squared >= 0.995 and res.converged


def test_fd_finland_1987(fin1987):
    res = fit("fd_ccdf", fd_points(fin1987))
    g, T, mu = res.param_values
    assert g == pytest.approx(4.39, rel=0.05)
    assert T == pytest.approx(0.3982, rel=0.10)
    assert mu == pytest.approx(11.9, rel=0.02)
    assert res.r_squared >= 0.98
    assert res.params_dict["fugacity"] == pytest.approx(math.exp(mu / T))


def test_cubic_finland_1987(fin1987):
    res = fit("polynomial", build_ccdf_points(fin1987), degree=3)
    signs = [math.copysign(1, v) for v in res.param_values]
    assert signs == [1, -1, 1, -1]
    assert res.param_values[0] == pytest.approx(98, abs=2)
    assert res.r_squared >= 0.995
    assert 1.2 <= res.durbin_watson <= 1.6
    assert all(abs(t) > 2 for t in res.t_values)


def test_sse_history_non_increasing(fin1987):
    res = fit("fd_ccdf", fd_points(fin1987))
    hist = np.array(res.sse_history)
    assert np.all(np.diff(hist) <= 0)
    assert hist[-1] == pytest.approx(res.sse)


def test_wrong_scale_rejected(fin1987):
    with pytest.raises(ValidationError, match="log10"):
        fit("logistic", fd_points(fin1987))
    with pytest.raises(ValidationError):
        fit("fd_ccdf", build_ccdf_points(fin1987))


def test_fit_errors():
    few = ProbePointSet(((1, 1), (2, 0.9), (3, 0.8)), Orientation.CCDF, Scale.LN, Scale.LN)
    with pytest.raises(InsufficientDataError):
        fit("fd_ccdf", few)
    flat = ProbePointSet(tuple((i, 1.0) for i in range(6)), Orientation.CCDF, Scale.LN, Scale.LN)
    with pytest.raises(FlatDataError):
        fit("fd_ccdf", flat)
    negative = ProbePointSet(tuple((i, -1.0 - i) for i in range(6)), Orientation.CCDF, Scale.LN, Scale.LN)
    with pytest.raises(FitError):
        fit("fd_ccdf", negative)
    with pytest.raises(UnknownModelError):
        fit("gamma", few)
    with pytest.raises(UnknownModelError):
        fit_nls("polynomial", few)


def test_polynomial_errors():
    pts = ProbePointSet(((0, 100), (1, 50), (2, 10)), Orientation.CCDF)
    with pytest.raises(InsufficientDataError):
        fit_polynomial(pts, 3)
    with pytest.raises(ValidationError):
        fit_polynomial(pts, 0)
    with pytest.raises(SingularFitError):
        polyfit_xy(np.zeros(6), np.arange(6.0), 2)
    with pytest.raises(SingularFitError):
        polyfit_xy(np.array([1.0, 1, 1, 2, 2, 2]), np.arange(6.0), 3)


def test_exact_polynomial_has_zero_residuals():
    x = np.linspace(-3, 3, 9)
    y = 1 + 2 * x - 0.5 * x**2
    res = polyfit_xy(x, y, 2)
    assert np.allclose(res.param_values, [1, 2, -0.5], atol=1e-12)
    assert res.sse < 1e-20
    assert math.isnan(res.durbin_watson) or 0 <= res.durbin_watson <= 4


def polynomial_cramer_max_rel_error(draws=100, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        degree = int(rng.integers(1, 3))
        n = int(rng.integers(degree + 2, 15))
        x = np.sort(rng.uniform(-10, 10, n))
        y = rng.normal(size=n) * 10
        exact = np.array(cramer_polyfit(x, y, degree))
        got = np.array(polyfit_xy(x, y, degree).param_values)
        worst = max(worst, float(np.max(np.abs(got - exact) / np.maximum(np.abs(exact), 1e-300))))
    return worst


def test_polynomial_vs_cramer():
    assert polynomial_cramer_max_rel_error(100) <= 1e-9


def zero_noise_max_rel_error(model_id, draws=100, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        if model_id == "logistic":
            theta = np.array([rng.uniform(1, 4), rng.uniform(3.5, 5), -rng.uniform(0.3, 1.2)])
            center, width = theta[1], abs(theta[2])
        else:
            sign = -1.0 if model_id == "fd_pdf" else 1.0
            theta = np.array([rng.uniform(1, 6), sign * rng.uniform(0.2, 0.8), rng.uniform(9, 13)])
            center, width = theta[2], abs(theta[1])
        x = np.linspace(center - 3 * width, center + 3 * width, 12)
        y = models.evaluate_raw(model_id, theta, x)
        res = nls_xy(model_id, x, y)
        worst = max(worst, float(np.max(np.abs(np.array(res.param_values) - theta) / np.abs(theta))))
    return worst


@pytest.mark.parametrize("model_id", ["logistic", "fd_ccdf", "fd_pdf"])
def test_zero_noise_recovery(model_id):
    assert zero_noise_max_rel_error(model_id, 100) <= 1e-4


def test_explicit_init_and_multistart(fin1987):
    pts = fd_points(fin1987)
    base = fit("fd_ccdf", pts)
    seeded = fit("fd_ccdf", pts, init=FermiDiracParams(4.0, 0.5, 12.0))
    multi = fit("fd_ccdf", pts, config=FitConfig(multistart=True))
    assert seeded.param_values == pytest.approx(base.param_values, rel=1e-5)
    assert multi.sse <= base.sse * (1 + 1e-9)


def test_default_init_signs(fin1987):
    p = default_init("fd_ccdf", fd_points(fin1987))
    assert p.T > 0
    p = default_init("logistic", logistic_points(fin1987))
    assert isinstance(p, LogisticParams) and p.c < 0


def test_config_validation():
    with pytest.raises(ValidationError):
        FitConfig(max_iterations=0)


def test_iteration_cap_reports_not_converged(fin1987):
    res = fit("fd_ccdf", fd_points(fin1987), config=FitConfig(max_iterations=1))
    assert res.iterations == 1 and not res.converged


def test_predict_and_to_dict(fin1987):
    res = fit("logistic", logistic_points(fin1987))
    assert res.predict(res.params.b) == pytest.approx(res.params.a / 2)
    d = res.to_dict()
    assert set(d["params"]) == {"a", "b", "c"} and len(d["residuals"]) == 10
