"""Concrete functions: exponential family, Mittag-Leffler, the E0 magnitude
model and its rotated series, pole series, and the parabolic-type map

    f(z) = z - (1 - exp(-z)) / (z (z^2 + 4 pi^2)).

Every variant is a frozen dataclass.  ``log_eval(spec, z)`` evaluates any
variant on an array of points and returns ``(log_mag, arg)`` arrays;
``evaluate(spec, z)`` is the scalar convenience wrapper returning a
``LogComplex``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

from .numerics import LogComplex, log_sum, wrap_arg

if TYPE_CHECKING:
    from .construction import PoleConfiguration

__all__ = [
    "Exponential",
    "MittagLeffler",
    "E0Model",
    "RotatedE0",
    "SeriesS",
    "PoleSeries",
    "Theorem4",
    "Theorem4Component",
    "FunctionSpec",
    "StripRegion",
    "PoleHitError",
    "SingularityError",
    "NonConvergenceError",
    "eval_exponential",
    "eval_mittag_leffler",
    "mittag_leffler_expansion",
    "eval_E0_model",
    "eval_S",
    "eval_pole_series",
    "eval_theorem4",
    "eval_g_components",
    "theorem4_complex",
    "log_eval",
    "evaluate",
    "complex_eval",
    "is_entire",
]

FOUR_PI2 = 4.0 * math.pi ** 2
LOG_MAX = 709.0


class PoleHitError(ZeroDivisionError):
    """Evaluation point coincides with a pole."""


class SingularityError(ValueError):
    """Evaluation point is an excluded singular point."""


class NonConvergenceError(ArithmeticError):
    """A series did not meet its stopping rule within the term cap."""


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class Exponential:
    lam: complex = 1.0

    def __post_init__(self):
        if complex(self.lam) == 0:
            raise ValueError("Exponential requires lambda != 0")
        object.__setattr__(self, "lam", complex(self.lam))


@dataclass(frozen=True)
class MittagLeffler:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("MittagLeffler requires alpha > 0")


@dataclass(frozen=True)
class E0Model:
    c_bound: float = 1.0

    def __post_init__(self):
        if not self.c_bound > 0:
            raise ValueError("c_bound must be positive")


@dataclass(frozen=True)
class RotatedE0:
    """lambda e^{i theta} E0(e^{-i theta} z) with lambda = exp(lam_log)."""

    theta: float
    lam_log: float = 0.0
    c_bound: float = 1.0


@dataclass(frozen=True)
class SeriesS:
    """Truncated sum of a_n lambda e^{i theta_n} E0(e^{-i theta_n} z)."""

    directions: tuple
    coeff_logs: tuple
    lam_log: float = 0.0
    c_bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(float(t) for t in self.directions))
        object.__setattr__(self, "coeff_logs", tuple(float(c) for c in self.coeff_logs))
        if len(self.directions) != len(self.coeff_logs):
            raise ValueError("directions and coeff_logs must have equal length")
        if len(self.directions) < 1:
            raise ValueError("SeriesS needs at least one term")

    @property
    def truncation(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class PoleSeries:
    """lambda * sum_k (z - a_k)^(-m_k) over the first ``truncation`` poles."""

    config: "PoleConfiguration"
    lam: float = 1.0
    truncation: int | None = None

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lambda must be non-zero")

    def terms(self):
        """(a_k, m_k as float) for the representable poles in the truncation."""
        k = len(self.config) if self.truncation is None else min(self.truncation, len(self.config))
        out = []
        for j in range(k):
            a = self.config.position(j)
            if a is None:
                continue
            out.append((a, self.config.multiplicity_float(j)))
        return out


@dataclass(frozen=True)
class Theorem4:
    pass


@dataclass(frozen=True)
class Theorem4Component:
    which: int

    def __post_init__(self):
        if self.which not in (1, 2, 3):
            raise ValueError("which must be 1, 2 or 3")


FunctionSpec = Union[
    Exponential, MittagLeffler, E0Model, RotatedE0, SeriesS, PoleSeries, Theorem4, Theorem4Component
]


def is_entire(spec) -> bool:
    return not isinstance(spec, (PoleSeries, Theorem4, Theorem4Component))


@dataclass(frozen=True)
class StripRegion:
    """e^{i theta} {Re w > min_re, |Im w| <= half_width}."""

    theta: float = 0.0
    half_width: float = math.pi
    min_re: float = 0.0

    def contains(self, z):
        w = np.exp(-1j * self.theta) * np.asarray(z, dtype=complex)
        return (w.real >= self.min_re) & (np.abs(w.imag) <= self.half_width)


# ---------------------------------------------------------------------------
# exponential


def eval_exponential(lam: complex, z: complex) -> LogComplex:
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be non-zero")
    z = complex(z)
    return LogComplex(math.log(abs(lam)) + z.real, math.atan2(lam.imag, lam.real) + z.imag)


# ---------------------------------------------------------------------------
# Mittag-Leffler  E_alpha(z) = sum z^n / Gamma(n/alpha + 1)

_TAIL_LOG = math.log(1e-17)
_MP_TRIGGER = 5.0 * math.log(10.0)  # fall back to mpmath past ~5 lost digits


def _ml_series_single(alpha: float, z: complex, term_cap: int) -> tuple[float, float]:
    if z == 0:
        return 0.0, 0.0
    lr = math.log(abs(z))
    th = math.atan2(z.imag, z.real)
    n_min = int(math.ceil(2.0 * alpha * abs(z) ** alpha + 20))
    n_top = n_min
    while True:
        if n_top > term_cap:
            raise NonConvergenceError(f"series needs more than {term_cap} terms")
        n = np.arange(n_top + 1, dtype=float)
        lt = n * lr - gammaln(n / alpha + 1.0)
        lm, ar = log_sum(lt, n * th)
        if lt[-1] < lm + _TAIL_LOG or (lm == -math.inf and lt[-1] < lt.max() + _TAIL_LOG):
            break
        n_top *= 2
    peak = float(lt.max())
    lost = peak - float(lm)
    if lost > _MP_TRIGGER or not math.isfinite(lm):
        lm, ar = _ml_series_mp(alpha, z, n_top, max(peak, 0.0), term_cap)
    return float(lm), float(ar)


def _ml_series_mp(alpha: float, z: complex, n_top: int, peak: float,
                  term_cap: int = 10 ** 6) -> tuple[float, float]:
    # cancellation is too severe for doubles: redo the sum with enough digits,
    # raising the precision until the digits lost are safely covered
    ln10 = math.log(10.0)
    dps = int(peak / ln10) + 30
    while True:
        with mpmath.workdps(dps):
            zz = mpmath.mpc(z.real, z.imag)
            a = mpmath.mpf(alpha)
            tol = mpmath.mpf(10) ** -17
            s = mpmath.mpc(0)
            p = mpmath.mpc(1)
            n = 0
            while True:
                t = p * mpmath.rgamma(n / a + 1)
                s += t
                if n >= n_top and abs(t) < tol * abs(s):
                    break
                n += 1
                if n > term_cap:
                    raise NonConvergenceError(f"series needs more than {term_cap} terms")
                p *= zz
            if s != 0:
                lm = float(mpmath.log(abs(s)))
                if (peak - lm) / ln10 < dps - 15:
                    return lm, float(mpmath.arg(s))
        dps *= 2
        if dps > 20000:
            raise NonConvergenceError("extended-precision summation did not settle")


def _ml_asymptotic(alpha: float, z: np.ndarray):
    """alpha exp(z^alpha) inside |arg z| <= pi/(2 alpha); bound |z|^-1 outside."""
    r = np.abs(z)
    th = np.angle(z)
    inside = np.abs(th) <= math.pi / (2.0 * alpha)
    with np.errstate(divide="ignore"):
        lr = np.log(r)
    ra = np.exp(alpha * lr)
    lm_in = math.log(alpha) + ra * np.cos(alpha * th)
    ar_in = ra * np.sin(alpha * th)
    lm = np.where(inside, lm_in, -lr)
    ar = np.where(inside, ar_in, 0.0)
    lm = np.where(r == 0, 0.0, lm)
    ar = np.where(r == 0, 0.0, ar)
    return lm, wrap_arg(ar)


def eval_mittag_leffler(alpha: float, z: complex, mode: str = "auto", r_switch: float = 30.0,
                        term_cap: int = 10 ** 6) -> LogComplex:
    """E_alpha(z) in log form.  ``mode`` is ``auto``, ``series`` or ``asymptotic``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    z = complex(z)
    if z == 0:
        return LogComplex(0.0, 0.0)
    if mode == "auto":
        mode = "series" if abs(z) < r_switch else "asymptotic"
    if mode == "series":
        lm, ar = _ml_series_single(alpha, z, term_cap)
        return LogComplex(lm, ar)
    if mode == "asymptotic":
        lm, ar = _ml_asymptotic(alpha, np.array([z]))
        return LogComplex(float(lm[0]), float(ar[0]))
    raise ValueError(f"unknown mode {mode!r}")


def _ml_tail_coeffs(alpha: float, terms: int) -> np.ndarray:
    k = np.arange(1, terms + 1, dtype=float)
    return rgamma(1.0 - k / alpha)


def mittag_leffler_expansion(alpha: float, z, terms: int = 12):
    """Two-part asymptotic expansion of E_alpha, usable as a value (not a bound).

    E_alpha(z) ~ alpha exp(z^alpha) [|arg z| <= min(pi, pi/alpha)]
                 - sum_{k=1}^{terms} z^{-k} / Gamma(1 - k/alpha).
    Valid for alpha > 1/2 and |z| large; returns complex (inf on overflow).
    """
    z = np.asarray(z, dtype=complex)
    c = _ml_tail_coeffs(alpha, terms)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        th = np.angle(z)
        za = np.exp(alpha * np.log(z))
        main = np.where(np.abs(th) <= min(math.pi, math.pi / alpha), alpha * np.exp(za), 0.0)
        w = 1.0 / z
        tail = np.zeros_like(z)
        p = np.ones_like(z)
        for ck in c:
            p = p * w
            tail = tail + ck * p
    return main - tail


def _ml_log_eval(alpha: float, z: np.ndarray, r_switch: float = 30.0):
    lm = np.empty(z.shape)
    ar = np.empty(z.shape)
    small = np.abs(z) < r_switch
    lm_a, ar_a = _ml_asymptotic(alpha, z)
    lm[:] = lm_a
    ar[:] = ar_a
    for idx in zip(*np.nonzero(small)):
        v = complex(z[idx])
        if v == 0:
            lm[idx], ar[idx] = 0.0, 0.0
        else:
            lm[idx], ar[idx] = _ml_series_single(alpha, v, 10 ** 6)
    return lm, ar


# ---------------------------------------------------------------------------
# E0 model and rotated series


def _e0_log(c_bound: float, w: np.ndarray):
    x, y = w.real, w.imag
    inside = (x >= 0) & (np.abs(y) <= math.pi)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ex = np.exp(np.where(inside, x, 0.0))
        lm_in = ex * np.cos(y) + x
        ar_in = ex * np.sin(y) + y
        ar_in = np.where(np.isfinite(ar_in), ar_in, 0.0)
        lm_out = math.log(c_bound) - 2.0 * np.log(np.abs(w))
    lm = np.where(inside, lm_in, lm_out)
    ar = np.where(inside, ar_in, 0.0)
    return lm, wrap_arg(ar)


def eval_E0_model(c_bound: float, z: complex) -> LogComplex:
    """exp(e^z + z) inside the strip A0, C_bound |z|^-2 (arg 0) outside."""
    if not c_bound > 0:
        raise ValueError("c_bound must be positive")
    lm, ar = _e0_log(c_bound, np.array([complex(z)]))
    return LogComplex(float(lm[0]), float(ar[0]))


def _rotated_log(theta: float, lam_log: float, c_bound: float, z: np.ndarray):
    lm, ar = _e0_log(c_bound, np.exp(-1j * theta) * z)
    return lm + lam_log, wrap_arg(ar + theta)


def _series_log(spec: SeriesS, z: np.ndarray):
    lms = []
    ars = []
    for th, cl in zip(spec.directions, spec.coeff_logs):
        lm, ar = _rotated_log(th, spec.lam_log, spec.c_bound, z)
        lms.append(lm + cl)
        ars.append(ar)
    return log_sum(np.stack(lms), np.stack(ars), axis=0)


def eval_S(spec: SeriesS, z: complex) -> LogComplex:
    lm, ar = _series_log(spec, np.array([complex(z)]))
    return LogComplex(float(lm[0]), float(ar[0]))


# ---------------------------------------------------------------------------
# pole series


def _pole_log(spec: PoleSeries, z: np.ndarray, drop: float = 50.0):
    terms = spec.terms()
    if not terms:
        return np.full(z.shape, -np.inf), np.zeros(z.shape)
    lms = []
    ars = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for a, m in terms:
            d = z - a
            lms.append(-m * np.log(np.abs(d)))
            ars.append(wrap_arg(-np.remainder(m * np.angle(d), 2 * math.pi)))
    lms = np.stack(lms)
    ars = np.stack(ars)
    peak = lms.max(axis=0)
    lms = np.where(lms < peak - drop, -np.inf, lms)
    lm, ar = log_sum(lms, ars, axis=0)
    return lm + math.log(abs(spec.lam)), wrap_arg(ar + (math.pi if spec.lam < 0 else 0.0))


def eval_pole_series(spec: PoleSeries, z: complex) -> LogComplex:
    z = complex(z)
    for a, _ in spec.terms():
        if z == a:
            raise PoleHitError(f"z coincides with the pole {a}")
    lm, ar = _pole_log(spec, np.array([z]))
    return LogComplex(float(lm[0]), float(ar[0]))


# ---------------------------------------------------------------------------
# the map f(z) = z - (1 - e^{-z}) / (z (z^2 + 4 pi^2))

_H_COEFFS = np.array([(-1.0) ** n / math.factorial(n + 1) for n in range(13)])
_SING_RADIUS = 1e-2
_TWO_PI_I = 2j * math.pi


def _h_taylor(u):
    """(1 - e^{-u}) / u by its degree-12 Taylor polynomial."""
    acc = np.zeros_like(u)
    for c in _H_COEFFS[::-1]:
        acc = acc * u + c
    return acc


def _theorem4_ratio(z: np.ndarray) -> np.ndarray:
    """(1 - e^{-z}) / (z (z^2 + 4 pi^2)), removable points handled."""
    out = np.empty_like(z)
    n0 = np.abs(z) <= _SING_RADIUS
    npl = np.abs(z - _TWO_PI_I) <= _SING_RADIUS
    nmi = np.abs(z + _TWO_PI_I) <= _SING_RADIUS
    reg = ~(n0 | npl | nmi)
    with np.errstate(over="ignore", invalid="ignore"):
        zr = z[reg]
        out[reg] = -np.expm1(-zr) / (zr * (zr * zr + FOUR_PI2))
    if n0.any():
        u = z[n0]
        out[n0] = _h_taylor(u) / (u * u + FOUR_PI2)
    if npl.any():
        w = z[npl]
        out[npl] = _h_taylor(w - _TWO_PI_I) / (w * (w + _TWO_PI_I))
    if nmi.any():
        w = z[nmi]
        out[nmi] = _h_taylor(w + _TWO_PI_I) / (w * (w - _TWO_PI_I))
    return out


def theorem4_complex(z):
    """Vectorized f(z); overflows to inf/nan far to the left (Re z < -700)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z1 = np.atleast_1d(z)
    out = z1 - _theorem4_ratio(z1)
    return complex(out[0]) if scalar else out


def eval_theorem4(z: complex) -> complex:
    return theorem4_complex(complex(z))


def _theorem4_log(z: np.ndarray):
    far = z.real < -500.0
    zc = np.where(far, 0.0, z)
    v = theorem4_complex(zc)
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(v))
    ar = np.angle(v)
    if far.any():
        zf = z[far]
        d = zf * (zf * zf + FOUR_PI2)
        lm[far] = -zf.real - np.log(np.abs(d))
        ar[far] = -zf.imag - np.angle(d)
    return lm, wrap_arg(ar)


def _g_logs(z: np.ndarray):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g1 = z - z ** -3
        lm1 = np.log(np.abs(g1))
        ar1 = np.angle(g1)
        lz = np.log(np.abs(z))
        az = np.angle(z)
        lm2 = -z.real - 3 * lz
        ar2 = -z.imag - 3 * az
        # log(1 - e^{-z}), stable on both sides
        left = z.real < -30.0
        one_minus = np.where(left, 0.0, -np.expm1(-np.where(left, 0.0, z)))
        lnum = np.where(left, -z.real + np.log(np.abs(1 - np.exp(np.where(left, z, 0.0)))), np.log(np.abs(one_minus)))
        anum = np.where(left, -z.imag + math.pi + np.angle(1 - np.exp(np.where(left, z, 0.0))), np.angle(one_minus))
        q = z * z + FOUR_PI2
        lm3 = lnum - 3 * lz + math.log(FOUR_PI2) - np.log(np.abs(q))
        ar3 = anum - 3 * az - np.angle(q)
    return (lm1, wrap_arg(ar1)), (lm2, wrap_arg(ar2)), (lm3, wrap_arg(ar3))


def eval_g_components(z: complex) -> tuple[LogComplex, LogComplex, LogComplex]:
    """g1 = z - z^-3, g2 = e^{-z}/z^3, g3 = ((1 - e^{-z})/z^3) 4pi^2/(z^2 + 4pi^2)."""
    z = complex(z)
    if z == 0 or abs(z - _TWO_PI_I) == 0 or abs(z + _TWO_PI_I) == 0:
        raise SingularityError("components are singular at 0 and +-2 pi i")
    parts = _g_logs(np.array([z]))
    return tuple(LogComplex(float(lm[0]), float(ar[0])) for lm, ar in parts)


# ---------------------------------------------------------------------------
# dispatch


def log_eval(spec, z):
    """Evaluate ``spec`` at the points ``z``; returns (log_mag, arg) arrays."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.reshape(-1)
    if isinstance(spec, Exponential):
        lam = spec.lam
        lm = math.log(abs(lam)) + z.real
        ar = wrap_arg(math.atan2(lam.imag, lam.real) + z.imag)
    elif isinstance(spec, MittagLeffler):
        lm, ar = _ml_log_eval(spec.alpha, z)
    elif isinstance(spec, E0Model):
        lm, ar = _e0_log(spec.c_bound, z)
    elif isinstance(spec, RotatedE0):
        lm, ar = _rotated_log(spec.theta, spec.lam_log, spec.c_bound, z)
    elif isinstance(spec, SeriesS):
        lm, ar = _series_log(spec, z)
    elif isinstance(spec, PoleSeries):
        lm, ar = _pole_log(spec, z)
    elif isinstance(spec, Theorem4):
        lm, ar = _theorem4_log(z)
    elif isinstance(spec, Theorem4Component):
        lm, ar = _g_logs(z)[spec.which - 1]
    else:
        raise TypeError(f"unknown function spec {spec!r}")
    return np.asarray(lm, dtype=float).reshape(shape), np.asarray(ar, dtype=float).reshape(shape)


def evaluate(spec, z: complex) -> LogComplex:
    if isinstance(spec, PoleSeries):
        return eval_pole_series(spec, z)
    if isinstance(spec, MittagLeffler):
        return eval_mittag_leffler(spec.alpha, z)
    lm, ar = log_eval(spec, np.array([complex(z)]))
    if math.isnan(lm[0]):
        raise SingularityError(f"evaluation undefined at {z}")
    return LogComplex(float(lm[0]), float(ar[0]))


def complex_eval(spec, z):
    """Values as complex128; magnitudes beyond double range become inf."""
    if isinstance(spec, Theorem4):
        return theorem4_complex(z)
    lm, ar = log_eval(spec, z)
    with np.errstate(over="ignore", invalid="ignore"):
        mag = np.exp(np.minimum(lm, 1000.0))
        return mag * np.exp(1j * ar)
