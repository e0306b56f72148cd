"""Least-squares estimation for the closed-form models.

Polynomials are solved exactly with a QR factorisation of the column-scaled
Vandermonde matrix. The logistic and Fermi-Dirac forms use a damped
Gauss-Newton (Levenberg-Marquardt) iteration with analytic Jacobians.
Residuals, R^2 and Durbin-Watson are always computed in fit space, i.e. the
coordinates the point set carries.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import models
from .errors import (
    FitError,
    FlatDataError,
    InsufficientDataError,
    SingularFitError,
    UnknownModelError,
    ValidationError,
)
from .models import ModelParams, make_params
from .stats import UndefinedStatisticError, durbin_watson, r_squared
from .transforms import ProbePointSet, Scale

REQUIRED_SCALES = {
    "logistic": (Scale.LOG10, Scale.LOG10),
    "fd_ccdf": (Scale.LN, Scale.LN),
    "fd_pdf": (Scale.LOG10, Scale.LOG10),
}
MIN_NLS_POINTS = 4
_MAX_DAMPING = 1e16


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 200
    rel_sse_tolerance: float = 1e-12
    initial_damping: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    multistart: bool = False

    def __post_init__(self):
        for name in ("max_iterations", "rel_sse_tolerance", "initial_damping", "damping_up", "damping_down"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class FitResult:
    model_id: str
    params: ModelParams
    r_squared: float
    residuals: tuple[float, ...]
    std_errors: tuple[float, ...]
    t_values: tuple[float, ...]
    durbin_watson: float
    iterations: int
    converged: bool
    sse: float
    x_range: tuple[float, float]
    sse_history: tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(self.params.names)

    @property
    def param_values(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.params.as_array())

    @property
    def params_dict(self) -> dict[str, float]:
        out = dict(zip(self.param_names, self.param_values))
        if isinstance(self.params, models.FermiDiracParams):
            try:
                out["fugacity"] = self.params.fugacity
            except ArithmeticError:
                out["fugacity"] = math.inf
        return out

    def predict(self, x):
        return models.evaluate(self.model_id, self.params, x)

    def to_dict(self) -> dict:
        return {
            "model": self.model_id,
            "params": dict(zip(self.param_names, self.param_values)),
            "std_errors": dict(zip(self.param_names, self.std_errors)),
            "t_values": dict(zip(self.param_names, self.t_values)),
            "r_squared": self.r_squared,
            "durbin_watson": self.durbin_watson,
            "residuals": list(self.residuals),
            "iterations": self.iterations,
            "converged": self.converged,
            "sse": self.sse,
        }


def _diagnostics(y, fitted, n_params):
    resid = y - fitted
    sse = float(resid @ resid)
    try:
        r2 = r_squared(y, fitted)
    except UndefinedStatisticError:
        raise FlatDataError("observed values are constant") from None
    try:
        dw = durbin_watson(resid)
    except UndefinedStatisticError:
        dw = math.nan
    dof = len(y) - n_params
    s2 = sse / dof if dof > 0 else math.nan
    return resid, sse, r2, dw, s2


def _t_values(theta, se):
    return tuple(float(t / s) if s > 0 else math.nan for t, s in zip(theta, se))


def fit_polynomial(points: ProbePointSet, degree: int = 3) -> FitResult:
    """Ordinary least squares on the monomial basis."""
    return polyfit_xy(points.x, points.p, degree)


def polyfit_xy(x: np.ndarray, y: np.ndarray, degree: int = 3) -> FitResult:
    if not 1 <= degree <= models.MAX_DEGREE:
        raise ValidationError(f"degree must be 1..{models.MAX_DEGREE}, got {degree}")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    k = degree + 1
    if len(x) < degree + 2:
        raise InsufficientDataError(f"degree {degree} needs at least {degree + 2} points, got {len(x)}")
    scale = float(np.max(np.abs(x)))
    if scale == 0:
        raise SingularFitError("all x values are zero")
    design = np.vander(x / scale, k, increasing=True)
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= diag.max() * len(x) * np.finfo(float).eps:
        raise SingularFitError("design matrix is rank deficient")
    beta_scaled = solve_triangular(r, q.T @ y)
    fitted = design @ beta_scaled
    resid, sse, r2, dw, s2 = _diagnostics(y, fitted, k)
    r_inv = solve_triangular(r, np.eye(k))
    se_scaled = np.sqrt(np.sum(r_inv**2, axis=1) * s2)
    powers = scale ** np.arange(k)
    beta, se = beta_scaled / powers, se_scaled / powers
    return FitResult(
        model_id="polynomial",
        params=models.PolynomialParams(tuple(beta)),
        r_squared=r2,
        residuals=tuple(resid),
        std_errors=tuple(float(v) for v in se),
        t_values=_t_values(beta, se),
        durbin_watson=dw,
        iterations=1,
        converged=True,
        sse=sse,
        x_range=(float(x.min()), float(x.max())),
    )


def _nearest_index(values, target) -> int:
    # np.argmin returns the first minimum, so the lower index wins ties.
    return int(np.argmin(np.abs(values - target)))


def default_init(model_id: str, points: ProbePointSet) -> ModelParams:
    """Starting values read off the data shape."""
    return init_xy(model_id, points.x, points.p)


def init_xy(model_id: str, x: np.ndarray, p: np.ndarray) -> ModelParams:
    if model_id not in models.NLS_MODEL_IDS:
        raise UnknownModelError(f"no default initialisation for model {model_id!r}")
    if len(p) < 2 or np.ptp(p) == 0:
        raise FlatDataError("probability values are constant")
    top = float(p.max())
    if not top > 0:
        raise FitError(f"{model_id} needs positive fit-space probabilities; got max {top!r}")
    if model_id == "logistic":
        return _logistic_init(x, p, top)
    slope = np.cov(x, p)[0, 1] if len(x) > 1 else -1.0
    sign = 1.0 if slope <= 0 else -1.0
    mu = float(x[_nearest_index(p, top / 2)])
    x75 = x[_nearest_index(p, 0.75 * top)]
    x25 = x[_nearest_index(p, 0.25 * top)]
    width = abs(float(x25 - x75)) / 4
    if width == 0:
        width = float(np.ptp(x)) / 4 or 1.0
    return models.FermiDiracParams(top, sign * width, mu)


def _logistic_init(x, p, top):
    inner = [i for i in range(len(p)) if 0 < p[i] < top]
    if len(inner) < 2:
        raise FlatDataError("logistic initialisation needs two points below the plateau")
    lin = {i: math.log(top / p[i] - 1.0) for i in inner}
    best = None
    for i, j in zip(inner, inner[1:]):
        if x[i] == x[j] or lin[i] == lin[j]:
            continue
        gap = abs((p[i] + p[j]) / 2 - top / 2)
        if best is None or gap < best[0]:
            best = (gap, i, j)
    if best is None:
        raise FlatDataError("logistic initialisation found no usable pair of points")
    _, i, j = best
    c = (x[j] - x[i]) / (lin[j] - lin[i])
    b = x[i] - c * lin[i]
    return models.LogisticParams(top, float(b), float(c))


def _check_scales(model_id, points):
    want = REQUIRED_SCALES[model_id]
    have = (points.x_scale, points.p_scale)
    if have != want:
        raise ValidationError(
            f"{model_id} fits need {want[0].value}/{want[1].value} points, got {have[0].value}/{have[1].value}"
        )


def _levenberg_marquardt(model_id, x, y, theta0, config):
    theta = np.array(theta0, dtype=float)
    resid = y - models.evaluate_raw(model_id, theta, x)
    sse = float(resid @ resid)
    if not math.isfinite(sse):
        raise FitError("initial parameters give a non-finite residual sum", best_params=theta.copy())
    history = [sse]
    damping = config.initial_damping
    converged = False
    iterations = 0
    while iterations < config.max_iterations and not converged:
        iterations += 1
        if sse == 0.0:
            converged = True
            break
        jac = models.jacobian_raw(model_id, theta, x)
        if not np.all(np.isfinite(jac)):
            raise FitError("Jacobian became non-finite", best_params=theta.copy())
        jtj = jac.T @ jac
        grad = jac.T @ resid
        scaling = np.maximum(np.diag(jtj), 1e-12 * max(float(np.max(np.diag(jtj))), 1e-300))
        while True:
            try:
                step = np.linalg.solve(jtj + damping * np.diag(scaling), grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = theta + step
                trial_resid = y - models.evaluate_raw(model_id, trial, x)
                trial_sse = float(trial_resid @ trial_resid)
                if math.isfinite(trial_sse) and trial_sse <= sse:
                    change = (sse - trial_sse) / sse
                    theta, resid, sse = trial, trial_resid, trial_sse
                    history.append(sse)
                    damping = max(damping * config.damping_down, 1e-300)
                    converged = change < config.rel_sse_tolerance
                    break
            damping *= config.damping_up
            if damping > _MAX_DAMPING:
                # No step of any length lowers the SSE: a numerical minimum.
                converged = True
                break
    return theta, sse, iterations, converged, tuple(history)


def _start_grid(theta0):
    factors = (0.5, 1.0, 1.5)
    for combo in itertools.product(factors, repeat=len(theta0)):
        yield np.asarray(theta0) * np.asarray(combo)


def fit_nls(
    model_id: str,
    points: ProbePointSet,
    config: FitConfig | None = None,
    init: ModelParams | None = None,
) -> FitResult:
    """Levenberg-Marquardt fit of a logistic or Fermi-Dirac curve."""
    if model_id not in models.NLS_MODEL_IDS:
        raise UnknownModelError(f"model {model_id!r} is not fitted iteratively")
    _check_scales(model_id, points)
    return nls_xy(model_id, points.x, points.p, config, init)


def nls_xy(model_id: str, x, y, config: FitConfig | None = None, init: ModelParams | None = None) -> FitResult:
    """Array-level core of :func:`fit_nls`; ``x`` and ``y`` are already in fit space."""
    if model_id not in models.NLS_MODEL_IDS:
        raise UnknownModelError(f"model {model_id!r} is not fitted iteratively")
    config = config or FitConfig()
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if len(x) < MIN_NLS_POINTS:
        raise InsufficientDataError(f"need at least {MIN_NLS_POINTS} points, got {len(x)}")
    start = (init or init_xy(model_id, x, y)).as_array()
    starts = list(_start_grid(start)) if config.multistart else [start]
    best = None
    for theta0 in starts:
        try:
            run = _levenberg_marquardt(model_id, x, y, theta0, config)
        except FitError:
            if not config.multistart:
                raise
            continue
        if best is None or run[1] < best[1]:
            best = run
    if best is None:
        raise FitError("every start diverged", best_params=start)
    theta, sse, iterations, converged, history = best
    try:
        params = make_params(model_id, theta)
    except ValidationError as exc:
        raise FitError(f"fit left the parameter domain: {exc}", best_params=theta) from None
    fitted = models.evaluate_raw(model_id, theta, x)
    jac = models.jacobian_raw(model_id, theta, x)
    resid, sse, r2, dw, s2 = _diagnostics(y, fitted, len(theta))
    try:
        cov = np.linalg.inv(jac.T @ jac) * s2
        se = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        se = np.full(len(theta), math.nan)
    return FitResult(
        model_id=model_id,
        params=params,
        r_squared=r2,
        residuals=tuple(resid),
        std_errors=tuple(float(v) for v in se),
        t_values=_t_values(theta, se),
        durbin_watson=dw,
        iterations=iterations,
        converged=converged,
        sse=sse,
        x_range=(float(x.min()), float(x.max())),
        sse_history=history,
    )


def fit(model_id: str, points: ProbePointSet, *, degree: int = 3, config: FitConfig | None = None, init=None) -> FitResult:
    """Dispatch to the polynomial or iterative fitter."""
    models.check_model_id(model_id)
    if model_id == "polynomial":
        return fit_polynomial(points, degree)
    return fit_nls(model_id, points, config, init)
