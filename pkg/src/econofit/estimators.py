"""scikit-learn style wrappers around the fitters.

Regressors take fit-space coordinates: ``X`` is a single feature (log income
for the logistic and Fermi-Dirac forms) and ``y`` the matching probability
value. :class:`DecilePointTransformer` turns decile series into such points.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin

from . import models
from .errors import ValidationError
from .fitting import MIN_NLS_POINTS, FitConfig, nls_xy, polyfit_xy
from .transforms import build_ccdf_points, build_cdf_points, log_scale
from .validation import check_1d_feature, check_fitted, check_xy


class _CurveRegressor(RegressorMixin, BaseEstimator):
    _model_id: str

    def _config(self) -> FitConfig:
        return FitConfig(
            max_iterations=self.max_iterations,
            rel_sse_tolerance=self.tol,
            multistart=self.multistart,
        )

    def fit(self, X, y):
        x, target = check_xy(X, y, MIN_NLS_POINTS)
        init = None if self.init is None else models.make_params(self._model_id, self.init)
        self.result_ = nls_xy(self._model_id, x, target, self._config(), init)
        self.params_ = self.result_.params
        self.n_iter_ = self.result_.iterations
        return self

    def predict(self, X):
        check_fitted(self)
        return np.atleast_1d(models.evaluate(self._model_id, self.params_, check_1d_feature(X)))


class LogisticCDFRegressor(_CurveRegressor):
    """log10 cdf against log10 income, a / (1 + exp((x - b) / c))."""

    _model_id = "logistic"

    def __init__(self, max_iterations=200, tol=1e-12, multistart=False, init=None):
        self.max_iterations = max_iterations
        self.tol = tol
        self.multistart = multistart
        self.init = init


class FermiDiracRegressor(_CurveRegressor):
    """g / (exp((x - mu) / T) + 1) on ln/ln ccdf axes or log10/log10 density axes."""

    def __init__(self, space="ccdf", max_iterations=200, tol=1e-12, multistart=False, init=None):
        self.space = space
        self.max_iterations = max_iterations
        self.tol = tol
        self.multistart = multistart
        self.init = init

    @property
    def _model_id(self):
        if self.space not in ("ccdf", "pdf"):
            raise ValidationError(f"space must be 'ccdf' or 'pdf', got {self.space!r}")
        return f"fd_{self.space}"


class PolynomialRegressor(RegressorMixin, BaseEstimator):
    def __init__(self, degree=3):
        self.degree = degree

    def fit(self, X, y):
        x, target = check_xy(X, y, self.degree + 2)
        self.result_ = polyfit_xy(x, target, self.degree)
        self.coef_ = np.array(self.result_.param_values)
        self.t_values_ = np.array(self.result_.t_values)
        return self

    def predict(self, X):
        check_fitted(self)
        return np.atleast_1d(models.poly_eval(self.result_.params, check_1d_feature(X)))


class DecilePointTransformer(TransformerMixin, BaseEstimator):
    """Map each DecileSeries to an ``(n, 2)`` array of fit-space points.

    ``model`` picks the axes: logistic (log10 cdf), fd_ccdf (ln ccdf) or
    polynomial (linear ccdf).
    """

    def __init__(self, model="logistic"):
        self.model = model

    def fit(self, X=None, y=None):
        if self.model not in ("logistic", "fd_ccdf", "polynomial"):
            raise ValidationError(f"no decile point mapping for model {self.model!r}")
        self.fitted_ = True
        return self

    def _points(self, series):
        if self.model == "logistic":
            return log_scale(build_cdf_points(series), 10, 10)
        if self.model == "fd_ccdf":
            return log_scale(build_ccdf_points(series), "e", "e")
        return build_ccdf_points(series)

    def transform(self, X):
        check_fitted(self, "fitted_")
        return [np.array(self._points(s).points) for s in X]
