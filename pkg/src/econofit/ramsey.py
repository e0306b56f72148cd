"""Ramsey-model consumption paths for polynomial, Fermi-Dirac and
Bose-Einstein utilities.

Consumption obeys the Euler equation dc/dt = u'(c)/u''(c) * (beta - r). Each
utility family has a closed-form solution with a free integration constant
``const``; :func:`const_from_initial` recovers it from a starting
consumption level. ``kT`` is kept as one compound (Boltzmann constant 1).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, PositivityError, SingularityError, ValidationError

SINGULARITY_EPS = 1e-12
LN4 = math.log(4.0)
LN2 = math.log(2.0)


class Family(str, Enum):
    POLYNOMIAL = "polynomial"
    FERMI_DIRAC = "fermi_dirac"
    BOSE_EINSTEIN = "bose_einstein"


@dataclass(frozen=True)
class UtilitySpec:
    family: Family
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    g: float = 1.0
    kT: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.POLYNOMIAL:
            if self.p1 == 0:
                raise ValidationError("polynomial utility needs p1 != 0")
        else:
            if self.kT == 0:
                raise ValidationError("kT must be non-zero")
            if not self.g > 0:
                raise ValidationError("g must be positive")

    @classmethod
    def polynomial(cls, p1: float, p2: float = 0.0, p3: float = 0.0) -> "UtilitySpec":
        return cls(Family.POLYNOMIAL, p1=p1, p2=p2, p3=p3)

    @classmethod
    def fermi_dirac(cls, g: float, kT: float, mu: float) -> "UtilitySpec":
        return cls(Family.FERMI_DIRAC, g=g, kT=kT, mu=mu)

    @classmethod
    def bose_einstein(cls, g: float, kT: float, mu: float) -> "UtilitySpec":
        return cls(Family.BOSE_EINSTEIN, g=g, kT=kT, mu=mu)

    def utility(self, c: float) -> float:
        if self.family is Family.POLYNOMIAL:
            return self.p1 * c * c + self.p2 * c + self.p3
        y = (c - self.mu) / self.kT
        if self.family is Family.FERMI_DIRAC:
            return self.g / (math.exp(y) + 1.0)
        return self.g / math.expm1(y)


@dataclass(frozen=True)
class PathSpec:
    beta: float
    r: float
    const: float
    t_start: float = 0.0
    t_end: float = 10.0
    steps: int = 1000

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValidationError("t_end must exceed t_start")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError("steps must be an integer >= 2")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.steps) + 1)

    @property
    def drift(self) -> float:
        return self.beta - self.r


@dataclass(frozen=True)
class ConsumptionPath:
    t: np.ndarray
    c: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "c"])
        for t, c in zip(self.t, self.c):
            writer.writerow([repr(float(t)), repr(float(c))])
        return buf.getvalue()


def marginal_ratio(u: UtilitySpec, c: float) -> float:
    """u'(c) / u''(c)."""
    if u.family is Family.POLYNOMIAL:
        return c + u.p2 / (2.0 * u.p1)
    y = (c - u.mu) / u.kT
    if abs(math.expm1(y)) < SINGULARITY_EPS:
        raise SingularityError(f"Euler equation singular at c={c!r} (e^y = 1)")
    if u.family is Family.FERMI_DIRAC:
        # -kT (e^y + 1) / (e^y - 1)
        return -u.kT / math.tanh(0.5 * y)
    # -kT (e^y - 1) / (e^y + 1)
    return -u.kT * math.tanh(0.5 * y)


def euler_rhs(u: UtilitySpec, c: float, beta: float, r: float) -> float:
    return marginal_ratio(u, c) * (beta - r)


def _acosh_from_log(log_z: np.ndarray) -> np.ndarray:
    # acosh(z) = ln z + ln(1 + sqrt(1 - z^-2)), stable for huge z.
    return log_z + np.log1p(np.sqrt(np.clip(-np.expm1(-2.0 * log_z), 0.0, None)))


def path_polynomial(u: UtilitySpec, spec: PathSpec) -> ConsumptionPath:
    if u.family is not Family.POLYNOMIAL:
        raise ValidationError("path_polynomial needs a polynomial utility")
    t = spec.grid
    with np.errstate(over="ignore"):
        c = np.exp(spec.drift * t + spec.const) - u.p2 / (2.0 * u.p1)
    bad = np.flatnonzero(~(c > 0))
    if bad.size:
        t_bad = float(t[bad[0]])
        raise PositivityError(f"consumption not positive at t={t_bad!r}", t=t_bad)
    return ConsumptionPath(t, c)


def fermi_dirac_boundary(spec: PathSpec) -> float | None:
    """Time at which the Fermi-Dirac path reaches cosh^-1(1), or None if never."""
    if spec.drift == 0:
        return None
    return (spec.const - LN4) / spec.drift


def path_fermi_dirac(u: UtilitySpec, spec: PathSpec) -> ConsumptionPath:
    """c = kT cosh^-1((e^alpha - 2) / 2) + mu with alpha = -(beta - r) t + const."""
    if u.family is not Family.FERMI_DIRAC:
        raise ValidationError("path_fermi_dirac needs a Fermi-Dirac utility")
    t = spec.grid
    alpha = -spec.drift * t + spec.const
    bad = np.flatnonzero(alpha < LN4 - 1e-12)
    if bad.size:
        t_bad = float(t[bad[0]])
        boundary = fermi_dirac_boundary(spec)
        where = f"; domain ends at t*={boundary!r}" if boundary is not None else ""
        raise DomainError(
            f"Fermi-Dirac path undefined at t={t_bad!r} (needs e^alpha >= 4){where}", t=boundary
        )
    alpha = np.maximum(alpha, LN4)
    log_z = alpha - LN2 + np.log1p(-2.0 * np.exp(-alpha))
    y = _acosh_from_log(np.maximum(log_z, 0.0))
    return ConsumptionPath(t, y * u.kT + u.mu)


def path_bose_einstein(u: UtilitySpec, spec: PathSpec) -> ConsumptionPath:
    """c = kT cosh^-1((e^alpha + 2) / 2) + mu with alpha = -(beta - r) t + const."""
    if u.family is not Family.BOSE_EINSTEIN:
        raise ValidationError("path_bose_einstein needs a Bose-Einstein utility")
    t = spec.grid
    alpha = -spec.drift * t + spec.const
    log_z = np.logaddexp(alpha - LN2, 0.0)
    y = _acosh_from_log(log_z)
    return ConsumptionPath(t, y * u.kT + u.mu)


def closed_form_path(u: UtilitySpec, spec: PathSpec) -> ConsumptionPath:
    if u.family is Family.POLYNOMIAL:
        return path_polynomial(u, spec)
    if u.family is Family.FERMI_DIRAC:
        return path_fermi_dirac(u, spec)
    return path_bose_einstein(u, spec)


def const_from_initial(u: UtilitySpec, beta: float, r: float, t_start: float, c0: float) -> float:
    """Integration constant that puts the closed-form path through c(t_start) = c0."""
    drift = beta - r
    if u.family is Family.POLYNOMIAL:
        shifted = c0 + u.p2 / (2.0 * u.p1)
        if not shifted > 0:
            raise DomainError(f"c0={c0!r} is unreachable: c0 + p2/(2 p1) must be positive")
        return math.log(shifted) - drift * t_start
    y = (c0 - u.mu) / u.kT
    if y < 0:
        raise DomainError(f"c0={c0!r} lies on the negative cosh^-1 branch")
    if u.family is Family.FERMI_DIRAC:
        e_alpha = 2.0 * math.cosh(y) + 2.0
    else:
        if y == 0:
            raise DomainError("c0 = mu is only reached in the limit alpha -> -inf")
        e_alpha = 2.0 * math.cosh(y) - 2.0
    return math.log(e_alpha) + drift * t_start


def rk4(f, t: np.ndarray, y0: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta on a fixed grid."""
    y = np.empty_like(t, dtype=float)
    y[0] = y0
    for i in range(len(t) - 1):
        h = t[i + 1] - t[i]
        ti, yi = t[i], y[i]
        k1 = f(ti, yi)
        k2 = f(ti + h / 2, yi + h * k1 / 2)
        k3 = f(ti + h / 2, yi + h * k2 / 2)
        k4 = f(ti + h, yi + h * k3)
        y[i + 1] = yi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return y


def verify_path_ode(u: UtilitySpec, spec: PathSpec, path: ConsumptionPath | None = None) -> float:
    """Max relative gap between the closed form and an RK4 solution of the
    Euler equation started from the same initial consumption."""
    if path is None:
        path = closed_form_path(u, spec)
    numeric = rk4(lambda _t, c: euler_rhs(u, c, spec.beta, spec.r), path.t, float(path.c[0]))
    return float(np.max(np.abs(numeric - path.c) / np.maximum(1.0, np.abs(path.c))))
