"""Closed-form model curves, their parameter gradients, and the
thermodynamic-analogy formulas (temperature, fugacity, continuous count).

Model identifiers and their fit spaces:

* ``logistic``   -- log10 C = a / (1 + exp((log10 X - b) / c))
* ``fd_ccdf``    -- ln C    = g / (exp((ln X - mu) / T) + 1)
* ``fd_pdf``     -- P*      = g / (exp((x* - mu) / T) + 1), log10 axes
* ``polynomial`` -- a0 + a1 x + ... + ad x^d

The logistic is written with ``b`` as the log10 midpoint and ``c`` as the
width so that fitted values line up with published coefficient tables; in
the textbook form L / (1 + exp(-k (x - x0))) this means L = a, x0 = b and
k = -1 / c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, UnknownModelError, ValidationError

MAX_DEGREE = 6

ArrayLike = Union[float, Sequence[float], np.ndarray]


def occupancy(z):
    """1 / (1 + exp(z)) without overflow."""
    return 0.5 * (1.0 - np.tanh(0.5 * np.asarray(z, dtype=float)))


def _occupancy_pair(z):
    t = np.tanh(0.5 * np.asarray(z, dtype=float))
    return 0.5 * (1.0 - t), 0.5 * (1.0 + t)


def _ret(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class LogisticParams:
    a: float
    b: float
    c: float

    names = ("a", "b", "c")

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError(f"logistic plateau a must be positive, got {self.a!r}")
        if self.c == 0:
            raise ValidationError("logistic width c must be non-zero")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)

    def as_textbook(self) -> dict[str, float]:
        """Equivalent (L, k, x0) of L / (1 + exp(-k (x - x0)))."""
        return {"L": self.a, "k": -1.0 / self.c, "x0": self.b}


@dataclass(frozen=True)
class FermiDiracParams:
    g: float
    T: float
    mu: float

    names = ("g", "T", "mu")

    def __post_init__(self):
        if not self.g > 0:
            raise ValidationError(f"degeneracy g must be positive, got {self.g!r}")
        if self.T == 0:
            raise ValidationError("temperature T must be non-zero")

    def as_array(self) -> np.ndarray:
        return np.array([self.g, self.T, self.mu], dtype=float)

    @property
    def fugacity(self) -> float:
        return fugacity(self.mu, self.T)


@dataclass(frozen=True)
class PolynomialParams:
    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not 2 <= len(coeffs) <= MAX_DEGREE + 1:
            raise ValidationError(f"polynomial degree must be 1..{MAX_DEGREE}, got {len(coeffs) - 1}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"a{i}" for i in range(len(self.coeffs)))

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=float)


ModelParams = Union[LogisticParams, FermiDiracParams, PolynomialParams]


def logistic_log_cdf(params: LogisticParams, log10_x: ArrayLike):
    z = (np.asarray(log10_x, dtype=float) - params.b) / params.c
    return _ret(params.a * occupancy(z))


def fermi_dirac_log_ccdf(params: FermiDiracParams, ln_x: ArrayLike):
    z = (np.asarray(ln_x, dtype=float) - params.mu) / params.T
    return _ret(params.g * occupancy(z))


def fermi_dirac_log_pdf(params: FermiDiracParams, x_star: ArrayLike):
    # Same curve as the ccdf form; T is commonly negative for density fits.
    return fermi_dirac_log_ccdf(params, x_star)


def poly_eval(params: PolynomialParams, x: ArrayLike):
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for c in reversed(params.coeffs):
        acc = acc * x + c
    return _ret(acc)


MODEL_IDS = ("logistic", "fd_ccdf", "fd_pdf", "polynomial")
NLS_MODEL_IDS = ("logistic", "fd_ccdf", "fd_pdf")


def check_model_id(model_id: str) -> str:
    if model_id not in MODEL_IDS:
        raise UnknownModelError(f"unknown model {model_id!r}; expected one of {', '.join(MODEL_IDS)}")
    return model_id


def param_names(model_id: str, degree: int = 3) -> tuple[str, ...]:
    check_model_id(model_id)
    if model_id == "logistic":
        return LogisticParams.names
    if model_id == "polynomial":
        return tuple(f"a{i}" for i in range(degree + 1))
    return FermiDiracParams.names


def make_params(model_id: str, values: Sequence[float]) -> ModelParams:
    """Build the parameter object for ``model_id`` from a flat vector."""
    check_model_id(model_id)
    values = [float(v) for v in values]
    if model_id == "logistic":
        return LogisticParams(*values)
    if model_id == "polynomial":
        return PolynomialParams(tuple(values))
    return FermiDiracParams(*values)


def evaluate(model_id: str, params: ModelParams, x: ArrayLike):
    check_model_id(model_id)
    if model_id == "logistic":
        return logistic_log_cdf(params, x)
    if model_id == "fd_ccdf":
        return fermi_dirac_log_ccdf(params, x)
    if model_id == "fd_pdf":
        return fermi_dirac_log_pdf(params, x)
    return poly_eval(params, x)


def evaluate_raw(model_id: str, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate from a raw parameter vector without invariant checks.

    The optimiser uses this for trial points that may be infeasible.
    """
    if model_id == "polynomial":
        return np.polyval(theta[::-1], x)
    if model_id == "logistic":
        a, b, c = theta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return a * occupancy((x - b) / c)
    g, T, mu = theta
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return g * occupancy((x - mu) / T)


def jacobian_raw(model_id: str, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rows are points, columns are d(model)/d(parameter)."""
    x = np.asarray(x, dtype=float)
    if model_id == "polynomial":
        return np.vander(x, len(theta), increasing=True)
    if model_id == "logistic":
        a, b, c = theta
        u = x - b
        s, sc = _occupancy_pair(u / c)
        w = a * s * sc
        return np.column_stack([s, w / c, w * u / c**2])
    g, T, mu = theta
    u = x - mu
    s, sc = _occupancy_pair(u / T)
    w = g * s * sc
    return np.column_stack([s, w * u / T**2, w / T])


def model_gradient(model_id: str, params: ModelParams, x: ArrayLike) -> np.ndarray:
    """Partial derivatives of the model value with respect to each parameter.

    Returns shape ``(k,)`` for scalar ``x`` and ``(n, k)`` for an array.
    """
    check_model_id(model_id)
    x_arr = np.asarray(x, dtype=float)
    jac = jacobian_raw(model_id, params.as_array(), np.atleast_1d(x_arr))
    return jac[0] if x_arr.ndim == 0 else jac


def fd_continuous_count(g: float, T: float, mu: float, x0: float) -> float:
    """Number of agents above ``x0``: g T ln(1 + exp((mu - x0) / T))."""
    if not T > 0:
        raise DomainError(f"continuous count needs T > 0, got {T!r}")
    return float(g * T * np.logaddexp(0.0, (mu - x0) / T))


def temperature_from_money(M: float, N: float) -> float:
    """Money per agent."""
    if not N > 0:
        raise DomainError(f"agent count must be positive, got {N!r}")
    return M / N


def fugacity(mu: float, T: float) -> float:
    """Activity coefficient exp(mu / T)."""
    if T == 0:
        raise DomainError("fugacity undefined at T = 0")
    try:
        return math.exp(mu / T)
    except OverflowError:
        raise DomainError(f"fugacity exp({mu!r}/{T!r}) overflows") from None
