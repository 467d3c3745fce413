"""Orbit fates, fate grids, Julia-direction estimates and the dynamical
checks for the map f(z) = z - (1 - e^{-z}) / (z (z^2 + 4 pi^2)).

Orbits are classified cell by cell in numba kernels; each cell is
independent, so results do not depend on the thread count.

Fate codes
----------
kind:    0 escaped, 1 bounded, 2 pole capture, 3 indeterminate
channel: escaped  -> 0 generic, 1 left (the real axis, or Re z < -50 with
                     an image again in the left half-plane), 2 U (upper
                     parabolic petal), 3 V (lower petal), 4 far
         bounded  -> 0 converged to a fixed point, 1 unresolved at max_iter
"""

from __future__ import annotations

import cmath
import csv
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange
from scipy.special import gammaln

from .numerics import TWO_PI, DirectionSet, Tower, arcs_from_bins, bin_centers
from .zoo import (
    E0Model,
    Exponential,
    MittagLeffler,
    PoleSeries,
    RotatedE0,
    SeriesS,
    Theorem4,
    Theorem4Component,
    _ml_tail_coeffs,
    complex_eval,
    theorem4_complex,
)

# numba's TBB layer warns on some installs; the workqueue layer is always present
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"

__all__ = [
    "ESCAPED",
    "BOUNDED",
    "POLE",
    "INDETERMINATE",
    "EscapeParams",
    "Fate",
    "FateGrid",
    "QuadrantRegion",
    "InvarianceReport",
    "RealOrbit",
    "set_threads",
    "classify_points",
    "classify_orbit",
    "render_fate_grid",
    "estimate_L",
    "check_forward_invariance",
    "track_real_orbit_log",
]

ESCAPED, BOUNDED, POLE, INDETERMINATE = 0, 1, 2, 3
CH_GENERIC, CH_LEFT, CH_U, CH_V, CH_FAR = 0, 1, 2, 3, 4
CH_CONVERGED, CH_UNRESOLVED = 0, 1

KIND_NAMES = {ESCAPED: "escaped", BOUNDED: "bounded", POLE: "pole", INDETERMINATE: "indeterminate"}
ESCAPE_CHANNELS = {CH_GENERIC: "generic", CH_LEFT: "left", CH_U: "U", CH_V: "V", CH_FAR: "far"}
BOUNDED_CHANNELS = {CH_CONVERGED: "converged", CH_UNRESOLVED: "unresolved"}

FOUR_PI2 = 4.0 * math.pi ** 2
TWO_PI_I = 2j * math.pi


def set_threads(n: int | None) -> int:
    """Cap numba worker threads; returns the count actually used."""
    avail = numba.config.NUMBA_NUM_THREADS
    n = avail if n is None or n < 1 else min(int(n), avail)
    numba.set_num_threads(n)
    return n


@dataclass(frozen=True)
class EscapeParams:
    exp_re: float = 50.0  # exponential family: Re z beyond this escapes
    radius: float = 1e6  # generic escape radius and bound for "bounded"
    left_re: float = -50.0  # Theorem-4 left channel
    parabolic_re: float = 10.0  # Theorem-4: Re z >= this commits to a petal
    pole_eps: float = 1e-9
    tol: float = 1e-12  # fixed-point convergence tolerance


@dataclass(frozen=True)
class Fate:
    kind: str
    at_iter: int
    channel: str = ""


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _finish(z, radius, max_iter):
    if abs(z) <= radius:
        return BOUNDED, max_iter, CH_UNRESOLVED
    return INDETERMINATE, max_iter, 0


@njit(cache=True)
def _orbit_exp(z, lam, max_iter, exp_re, radius, tol):
    arg_lam = cmath.phase(lam)
    for n in range(1, max_iter + 1):
        if z.real > 700.0:
            # |f(z)| overflows; only the half-plane of the image matters
            if math.cos(z.imag + arg_lam) > 0.0:
                return ESCAPED, n, CH_GENERIC
            zn = complex(-1e300, 0.0)
        else:
            zn = lam * cmath.exp(z)
        if zn.real != zn.real or zn.imag != zn.imag:
            return INDETERMINATE, n, 0
        if zn.real > exp_re:
            return ESCAPED, n, CH_GENERIC
        if abs(zn - z) <= tol * max(1.0, abs(zn)):
            return BOUNDED, n, CH_CONVERGED
        z = zn
    return _finish(z, radius, max_iter)


@njit(parallel=True, cache=True)
def _fates_exp(z0, lam, max_iter, exp_re, radius, tol, kind, its, chan):
    for i in prange(z0.size):
        k, n, c = _orbit_exp(z0[i], lam, max_iter, exp_re, radius, tol)
        kind[i] = k
        its[i] = n
        chan[i] = c


@njit(cache=True)
def _h_taylor_nb(u):
    # (1 - e^{-u}) / u, degree-12 Taylor polynomial
    acc = 0.0 + 0.0j
    fact = 1.0
    coeffs = np.empty(13)
    for n in range(13):
        fact *= n + 1
        coeffs[n] = (-1.0) ** n / fact
    for n in range(12, -1, -1):
        acc = acc * u + coeffs[n]
    return acc


@njit(cache=True)
def _t4(z):
    tpi = 2.0j * math.pi
    if abs(z) <= 1e-2:
        return z - _h_taylor_nb(z) / (z * z + FOUR_PI2)
    if abs(z - tpi) <= 1e-2:
        return z - _h_taylor_nb(z - tpi) / (z * (z + tpi))
    if abs(z + tpi) <= 1e-2:
        return z - _h_taylor_nb(z + tpi) / (z * (z - tpi))
    return z - (1.0 - cmath.exp(-z)) / (z * (z * z + FOUR_PI2))


@njit(cache=True)
def _left_image(z, log_radius):
    # For Re z << 0, f(z) ~ e^{-z} / (z (z^2 + 4pi^2)).  Returns -1 when the
    # image is still moderate (keep iterating), else the committed channel.
    d = z * (z * z + FOUR_PI2)
    lf = -z.real - math.log(abs(d))
    if lf < log_radius:
        return -1
    phi = -z.imag - cmath.phase(d)
    c = math.cos(phi)
    s = math.sin(phi)
    if c > 0.0 and s != 0.0:
        return CH_U if s > 0.0 else CH_V
    return CH_LEFT


@njit(cache=True)
def _orbit_t4(z, max_iter, radius, left_re, par_re, tol):
    log_radius = math.log(radius)
    for n in range(1, max_iter + 1):
        zn = _t4(z)
        if zn.imag == 0.0 and zn.real == zn.real:
            # f maps the real line into itself with f(x) < x
            return ESCAPED, n, CH_LEFT
        if zn.real < left_re and z.real == z.real:
            ch = _left_image(zn, log_radius)
            if ch >= 0:
                return ESCAPED, n, ch
        if zn.real != zn.real or zn.imag != zn.imag:
            return INDETERMINATE, n, 0
        if zn.real >= par_re:
            return ESCAPED, n, CH_U if zn.imag > 0 else CH_V
        if abs(zn) > radius:
            return ESCAPED, n, CH_FAR
        if abs(zn - z) <= tol * max(1.0, abs(zn)):
            return BOUNDED, n, CH_CONVERGED
        z = zn
    return _finish(z, radius, max_iter)


@njit(parallel=True, cache=True)
def _fates_t4(z0, max_iter, radius, left_re, par_re, tol, kind, its, chan):
    for i in prange(z0.size):
        k, n, c = _orbit_t4(z0[i], max_iter, radius, left_re, par_re, tol)
        kind[i] = k
        its[i] = n
        chan[i] = c


@njit(cache=True)
def _pole_step(z, poles, mults, lam, pole_eps, log_radius):
    # returns (value, status) with status 0 ok, 1 pole capture, 2 beyond the escape radius
    best = -np.inf
    for k in range(poles.size):
        d = z - poles[k]
        ad = abs(d)
        if ad < pole_eps:
            return 0j, 1
        lt = -mults[k] * math.log(ad)
        if lt > best:
            best = lt
    if best + math.log(abs(lam)) > log_radius + 1.0:
        return 0j, 2
    s = 0.0 + 0.0j
    for k in range(poles.size):
        d = z - poles[k]
        lt = -mults[k] * math.log(abs(d))
        if lt < best - 50.0:
            continue
        ph = -np.fmod(mults[k] * cmath.phase(d), 2.0 * math.pi)
        s += math.exp(lt) * complex(math.cos(ph), math.sin(ph))
    return lam * s, 0


@njit(cache=True)
def _orbit_poles(z, poles, mults, lam, max_iter, radius, pole_eps, tol):
    log_radius = math.log(radius)
    for n in range(1, max_iter + 1):
        zn, st = _pole_step(z, poles, mults, lam, pole_eps, log_radius)
        if st == 1:
            return POLE, n, 0
        if st == 2:
            return ESCAPED, n, CH_GENERIC
        if zn.real != zn.real or zn.imag != zn.imag:
            return INDETERMINATE, n, 0
        if abs(zn) > radius:
            return ESCAPED, n, CH_GENERIC
        if abs(zn - z) <= tol * max(1.0, abs(zn)):
            return BOUNDED, n, CH_CONVERGED
        z = zn
    return _finish(z, radius, max_iter)


@njit(parallel=True, cache=True)
def _fates_poles(z0, poles, mults, lam, max_iter, radius, pole_eps, tol, kind, its, chan):
    for i in prange(z0.size):
        k, n, c = _orbit_poles(z0[i], poles, mults, lam, max_iter, radius, pole_eps, tol)
        kind[i] = k
        its[i] = n
        chan[i] = c


@njit(cache=True)
def _ml_value(z, alpha, lg, tail, r_dyn):
    r = abs(z)
    if r == 0.0:
        return 1.0 + 0.0j
    if r <= r_dyn:
        lz = cmath.log(z)
        s = 0.0 + 0.0j
        n_min = 2.0 * alpha * r ** alpha + 20.0
        for n in range(lg.size):
            t = cmath.exp(n * lz - lg[n])
            s += t
            if n > n_min and abs(t) < 1e-17 * abs(s):
                break
        return s
    th = cmath.phase(z)
    out = 0.0 + 0.0j
    if abs(th) <= min(math.pi, math.pi / alpha):
        za = cmath.exp(alpha * cmath.log(z))
        if za.real > 700.0:
            return complex(np.inf, 0.0)
        out = alpha * cmath.exp(za)
    w = 1.0 / z
    p = 1.0 + 0.0j
    for k in range(tail.size):
        p = p * w
        out -= tail[k] * p
    return out


@njit(cache=True)
def _orbit_ml(z, alpha, lg, tail, r_dyn, max_iter, radius, tol):
    for n in range(1, max_iter + 1):
        zn = _ml_value(z, alpha, lg, tail, r_dyn)
        if zn.real != zn.real or zn.imag != zn.imag:
            return INDETERMINATE, n, 0
        if abs(zn) > radius:
            return ESCAPED, n, CH_GENERIC
        if abs(zn - z) <= tol * max(1.0, abs(zn)):
            return BOUNDED, n, CH_CONVERGED
        z = zn
    return _finish(z, radius, max_iter)


@njit(parallel=True, cache=True)
def _fates_ml(z0, alpha, lg, tail, r_dyn, max_iter, radius, tol, kind, its, chan):
    for i in prange(z0.size):
        k, n, c = _orbit_ml(z0[i], alpha, lg, tail, r_dyn, max_iter, radius, tol)
        kind[i] = k
        its[i] = n
        chan[i] = c


def _fates_generic(spec, z0, max_iter, esc: EscapeParams):
    """Vectorized fallback for the magnitude-model variants."""
    n = z0.size
    kind = np.full(n, BOUNDED, dtype=np.int8)
    its = np.full(n, max_iter, dtype=np.int32)
    chan = np.full(n, CH_UNRESOLVED, dtype=np.int8)
    z = z0.copy()
    active = np.ones(n, dtype=bool)
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        zn = complex_eval(spec, z[idx])
        bad = ~np.isfinite(zn.real) | ~np.isfinite(zn.imag)
        out = ~bad & (np.abs(zn) > esc.radius)
        overflow = bad & np.isinf(np.abs(zn))
        conv = ~bad & ~out & (np.abs(zn - z[idx]) <= esc.tol * np.maximum(1.0, np.abs(zn)))
        nan = bad & ~overflow
        for mask, k, c in ((out | overflow, ESCAPED, CH_GENERIC), (conv, BOUNDED, CH_CONVERGED),
                           (nan, INDETERMINATE, 0)):
            sel = idx[mask]
            kind[sel] = k
            its[sel] = it
            chan[sel] = c
            active[sel] = False
        z[idx] = np.where(bad, z[idx], zn)
    left = np.flatnonzero(active)
    far = left[np.abs(z[left]) > esc.radius]
    kind[far] = INDETERMINATE
    chan[far] = 0
    return kind, its, chan


def _ml_tables(alpha: float, n_terms: int = 4000, tail_terms: int = 12):
    n = np.arange(n_terms, dtype=float)
    lg = gammaln(n / alpha + 1.0)
    tail = _ml_tail_coeffs(alpha, tail_terms)
    r_dyn = 20.0 ** (1.0 / alpha)
    return lg, tail, r_dyn


def classify_points(spec, z0, max_iter: int = 500, escape: EscapeParams | None = None):
    """Fate codes (kind, at_iter, channel) for every starting point in ``z0``."""
    esc = escape or EscapeParams()
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    z0 = np.ascontiguousarray(np.asarray(z0, dtype=np.complex128))
    shape = z0.shape
    flat = z0.reshape(-1)
    n = flat.size
    kind = np.empty(n, dtype=np.int8)
    its = np.empty(n, dtype=np.int32)
    chan = np.empty(n, dtype=np.int8)
    if isinstance(spec, Exponential):
        _fates_exp(flat, complex(spec.lam), max_iter, esc.exp_re, esc.radius, esc.tol, kind, its, chan)
    elif isinstance(spec, Theorem4):
        _fates_t4(flat, max_iter, esc.radius, esc.left_re, esc.parabolic_re, esc.tol, kind, its, chan)
    elif isinstance(spec, PoleSeries):
        terms = spec.terms()
        poles = np.array([a for a, _ in terms], dtype=np.complex128)
        mults = np.array([m for _, m in terms], dtype=np.float64)
        _fates_poles(flat, poles, mults, float(spec.lam), max_iter, esc.radius, esc.pole_eps, esc.tol,
                     kind, its, chan)
    elif isinstance(spec, MittagLeffler):
        if spec.alpha <= 0.5:
            kind, its, chan = _fates_generic(spec, flat, max_iter, esc)
        else:
            lg, tail, r_dyn = _ml_tables(spec.alpha)
            _fates_ml(flat, float(spec.alpha), lg, tail, r_dyn, max_iter, esc.radius, esc.tol, kind, its, chan)
    elif isinstance(spec, (E0Model, RotatedE0, SeriesS, Theorem4Component)):
        kind, its, chan = _fates_generic(spec, flat, max_iter, esc)
    else:
        raise TypeError(f"unknown function spec {spec!r}")
    return kind.reshape(shape), its.reshape(shape), chan.reshape(shape)


def _fate(kind: int, it: int, ch: int) -> Fate:
    if kind == ESCAPED:
        return Fate("escaped", it, ESCAPE_CHANNELS[ch])
    if kind == BOUNDED:
        return Fate("bounded", it, BOUNDED_CHANNELS[ch])
    if kind == POLE:
        return Fate("pole", it)
    return Fate("indeterminate", it)


def classify_orbit(spec, z0: complex, max_iter: int = 500, escape: EscapeParams | None = None) -> Fate:
    k, n, c = classify_points(spec, np.array([complex(z0)]), max_iter, escape)
    return _fate(int(k[0]), int(n[0]), int(c[0]))


# ---------------------------------------------------------------------------
# fate grids

PALETTE = {
    (ESCAPED, CH_GENERIC): (235, 120, 40),
    (ESCAPED, CH_LEFT): (200, 40, 40),
    (ESCAPED, CH_U): (50, 110, 220),
    (ESCAPED, CH_V): (40, 190, 120),
    (ESCAPED, CH_FAR): (240, 210, 70),
    (BOUNDED, CH_CONVERGED): (25, 25, 70),
    (BOUNDED, CH_UNRESOLVED): (0, 0, 0),
    (POLE, 0): (255, 255, 255),
    (INDETERMINATE, 0): (128, 128, 128),
}


@dataclass
class FateGrid:
    center: complex
    width: float
    height: float
    kind: np.ndarray  # (H, W)
    iters: np.ndarray
    channel: np.ndarray

    def points(self) -> np.ndarray:
        return _window_points(self.center, self.width, self.height, self.kind.shape[1], self.kind.shape[0])

    def counts(self) -> dict:
        out: dict = {}
        for k, c in zip(self.kind.ravel(), self.channel.ravel()):
            key = _fate(int(k), 0, int(c))
            label = f"{key.kind}:{key.channel}" if key.channel else key.kind
            out[label] = out.get(label, 0) + 1
        return dict(sorted(out.items()))

    def to_ppm(self, path) -> None:
        h, w = self.kind.shape
        img = np.zeros((h, w, 3), dtype=np.uint8)
        for (k, c), rgb in PALETTE.items():
            img[(self.kind == k) & (self.channel == c)] = rgb
        with open(path, "wb") as fh:
            fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())

    def to_csv(self, path) -> None:
        pts = self.points()
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["row", "col", "re", "im", "kind", "iter", "channel"])
            h, w = self.kind.shape
            for i in range(h):
                for j in range(w):
                    f = _fate(int(self.kind[i, j]), int(self.iters[i, j]), int(self.channel[i, j]))
                    wr.writerow([i, j, repr(float(pts[i, j].real)), repr(float(pts[i, j].imag)),
                                 f.kind, f.at_iter, f.channel])


def _window_points(center, width, height, W, H):
    xs = center.real - width / 2 + (np.arange(W) + 0.5) * (width / W)
    ys = center.imag + height / 2 - (np.arange(H) + 0.5) * (height / H)
    return xs[None, :] + 1j * ys[:, None]


def render_fate_grid(spec, center: complex, width: float, height: float, W: int, H: int,
                     max_iter: int = 500, escape: EscapeParams | None = None) -> FateGrid:
    """Classify pixel centres of the window; row 0 is the top edge."""
    if W < 16 or H < 16:
        raise ValueError("resolution must be at least 16 x 16")
    center = complex(center)
    pts = _window_points(center, width, height, W, H)
    k, n, c = classify_points(spec, pts, max_iter, escape)
    return FateGrid(center, float(width), float(height), k, n, c)


# ---------------------------------------------------------------------------
# Julia limiting directions


def _labels(kind, chan):
    lab = kind.astype(np.int16) * 8 + chan
    unresolved = ((kind == BOUNDED) & (chan == CH_UNRESOLVED)) | (kind == INDETERMINATE)
    return np.where(unresolved, -1, lab)


def _j_adjacent(lab: np.ndarray) -> np.ndarray:
    """Cells with a resolved neighbour of a different resolved class.

    ``lab`` has shape (n_radial, B); the angular direction wraps around.
    """
    j = np.zeros(lab.shape, dtype=bool)
    res = lab >= 0
    d = (lab != np.roll(lab, 1, axis=1)) & res & np.roll(res, 1, axis=1)
    j |= d
    j |= np.roll(d, -1, axis=1)
    if lab.shape[0] > 1:
        dr = (lab[1:] != lab[:-1]) & res[1:] & res[:-1]
        j[1:] |= dr
        j[:-1] |= dr
    return j


def _escape_counts_as_julia(spec) -> bool:
    # for these maps the escaping set lies in the Julia set
    return isinstance(spec, (Exponential, MittagLeffler))


def estimate_L(spec, annuli, B: int = 3600, mode: str = "boundary", radial_samples: int = 4,
               max_iter: int = 2000, escape: EscapeParams | None = None, gap_tolerance: int = 1) -> DirectionSet:
    """Approximate Julia limiting directions from fate classes on annuli.

    ``boundary``: cells next to a differently classified cell are taken as
    Julia-adjacent (for exponential-type maps escaping cells are included);
    bins holding such cells in the two outermost annuli are flagged.
    ``pole_cluster``: bins within angular half-width asin(2/r_k) of a pole
    direction, over poles with r_k inside some annulus.
    """
    annuli = sorted((float(a), float(b)) for a, b in annuli)
    if not annuli:
        raise ValueError("no annuli given")
    for a, b in annuli:
        if not 0 < a < b:
            raise ValueError("annuli need 0 < r_lo < r_hi")
    if mode == "pole_cluster":
        return _l_pole_cluster(spec, annuli, B, gap_tolerance)
    if mode != "boundary":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(spec, PoleSeries):
        raise ValueError("boundary mode needs an entire-type or Theorem-4 spec; use pole_cluster")
    th = bin_centers(B)
    flags = np.zeros(B, dtype=bool)
    class_b = _escape_counts_as_julia(spec)
    for a, b in annuli[-2:]:
        s = (np.arange(radial_samples) + 0.5) / radial_samples
        rs = a * (b / a) ** s
        pts = rs[:, None] * np.exp(1j * th)[None, :]
        kind, _, chan = classify_points(spec, pts, max_iter, escape)
        j = _j_adjacent(_labels(kind, chan))
        if class_b:
            j |= kind == ESCAPED
        flags |= j.any(axis=0)
    return arcs_from_bins(flags, gap_tolerance)


def _l_pole_cluster(spec, annuli, B, gap_tolerance):
    if not isinstance(spec, PoleSeries):
        raise ValueError("pole_cluster mode needs a PoleSeries spec")
    cfg = spec.config
    w = TWO_PI / B
    lo_b = np.arange(B) * w
    hi_b = lo_b + w
    flags = np.zeros(B, dtype=bool)
    for k in range(len(cfg)):
        lr = cfg.log_r[k]
        if not any(math.log(a) <= lr <= math.log(b) for a, b in annuli):
            continue
        half = math.asin(min(1.0, 2.0 * math.exp(-lr))) if lr > -700 else math.pi / 2
        t = cfg.thetas[k] % TWO_PI
        for shift in (-TWO_PI, 0.0, TWO_PI):
            c = t + shift
            flags |= (hi_b >= c - half) & (lo_b <= c + half)
    return arcs_from_bins(flags, gap_tolerance)


# ---------------------------------------------------------------------------
# invariance of the quadrants U_L and V_L


@dataclass(frozen=True)
class QuadrantRegion:
    kind: str  # "U" or "V"
    L: float

    def __post_init__(self):
        if self.kind not in ("U", "V"):
            raise ValueError("kind must be 'U' or 'V'")
        if not self.L > 0:
            raise ValueError("L must be positive")

    def sign(self) -> float:
        return 1.0 if self.kind == "U" else -1.0

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z)
        return (z.real >= self.L) & (self.sign() * z.imag >= self.L)


@dataclass
class InvarianceReport:
    region: QuadrantRegion
    n_checked: int
    violations: list  # (z, f(z)) pairs
    min_slack: float
    argmin: complex

    @property
    def passed(self) -> bool:
        return not self.violations


def _boundary_points(L: float, r_max: float, sign: float, n_R: int = 40, fractions=None):
    """gamma_{1,R}(t) = (R + t) + iR and gamma_{2,R}(t) = R + i(R + t), mirrored for V."""
    if fractions is None:
        fractions = np.concatenate([np.linspace(0.0, 0.5, 6), [1.0, 2.0, 5.0, 10.0]])
    Rs = np.geomspace(L, max(L, r_max / 2), n_R)
    pts = []
    for R in Rs:
        t = fractions * R
        pts.append((R + t) + 1j * sign * R)
        pts.append(R + 1j * sign * (R + t))
    return np.concatenate(pts)


def check_forward_invariance(spec, region: QuadrantRegion, n_samples: int = 10_000, r_max: float = 1e3,
                             seed: int = 0) -> InvarianceReport:
    """Check f(region) within region on quasi-random interior points and boundary curves."""
    if not isinstance(spec, Theorem4):
        raise TypeError("forward invariance is checked for the Theorem-4 map")
    if region.L < 1:
        raise ValueError("region.L must be at least 1")
    L = region.L
    sgn = region.sign()
    sampler = _halton(d=2, scramble=True, seed=seed)
    pts = []
    need = n_samples
    while need > 0:
        u = sampler.random(2 * need)
        x = L + u[:, 0] * (r_max - L)
        y = L + u[:, 1] * (r_max - L)
        z = x + 1j * sgn * y
        z = z[np.abs(z) <= r_max]
        pts.append(z[:need])
        need -= min(need, z.size)
    z = np.concatenate(pts + [_boundary_points(L, r_max, sgn)])
    fz = theorem4_complex(z)
    slack = np.minimum(fz.real - L, sgn * fz.imag - L)
    bad = np.flatnonzero(~(slack >= 0))
    i = int(np.argmin(slack))
    return InvarianceReport(region, int(z.size), [(complex(z[j]), complex(fz[j])) for j in bad],
                            float(slack[i]), complex(z[i]))


# ---------------------------------------------------------------------------
# the real orbit toward -infinity


@dataclass
class RealOrbit:
    signs: list  # sign of each iterate
    log_abs: list  # Tower values of ln|x_n|
    d: list  # Tower values of d_n = ln|x_{n+1}| - |x_n|/2 (log mode only; None before)
    log_mode_start: int  # index of the first iterate handled in log mode (-1 if never)

    def increasing_in_log_mode(self, steps: int = 10) -> bool:
        ds = [v for v in self.d if v is not None][:steps]
        return len(ds) >= 2 and all(a < b for a, b in zip(ds, ds[1:]))


def _log_step(la: Tower) -> tuple[Tower, float]:
    """ln|f(x)| from la = ln|x| for x << 0, and the correction ln(1 + eps)."""
    ax = la.exp()  # |x| as a tower
    if ax.level == 0:
        x = ax.top
        # |f(x)| = (e^x - 1)/(x (x^2 + 4pi^2)) + x with x = |x|
        lm = x + math.log1p(-math.exp(-x)) - math.log(x) - math.log(x * x + FOUR_PI2)
        corr = math.log1p(x * math.exp(-lm))  # the g1 part, relative to the main term
        return Tower.from_float(lm + corr), corr
    # |x| beyond double range: corrections are below double resolution
    lx = la.to_float()
    delta = -3.0 * lx if math.isfinite(lx) else 0.0
    return ax.add_small(delta), 0.0


def track_real_orbit_log(x0: float, n: int = 200, switch: float = 500.0) -> RealOrbit:
    """Iterate f on the real line; once |x| > switch continue with ln|x| (as a tower)."""
    x = float(x0)
    signs = [1 if x >= 0 else -1]
    logs = [Tower.from_float(math.log(abs(x))) if x != 0 else Tower.from_float(-math.inf)]
    ds: list = []
    start = -1
    la = None
    for step in range(n):
        if la is None:
            xn = float(theorem4_complex(complex(x)).real)
            ds.append(None)
            x = xn
            signs.append(1 if x >= 0 else -1)
            logs.append(Tower.from_float(math.log(abs(x))) if x != 0 else Tower.from_float(-math.inf))
            if abs(x) > switch:
                if x > 0:
                    break  # not the left channel; nothing further to track
                la = logs[-1]
                start = len(logs) - 1
            continue
        nxt, _ = _log_step(la)
        # d_n = ln|x_{n+1}| - |x_n|/2 = (|x_n|/2) (1 + 2 (ln|x_{n+1}| - |x_n|)/|x_n|)
        ds.append(_half_gap(la, nxt))
        la = nxt
        signs.append(-1)
        logs.append(la)
    return RealOrbit(signs, logs, ds, start)


def _half_gap(la: Tower, nxt: Tower) -> Tower:
    """d = nxt - exp(la)/2 as a tower, with nxt ~ exp(la) (both huge)."""
    ax = la.exp()
    if ax.level == 0 and nxt.level == 0:
        return Tower.from_float(nxt.top - ax.top / 2.0)
    # nxt = |x| + delta with delta tiny relative to |x|, so ln d = ln|x| - ln 2
    return la.add_small(-math.log(2.0)).exp()


def _halton(d: int, scramble: bool, seed: int):
    from scipy.stats import qmc  # slow import, only needed here

    return qmc.Halton(d=d, scramble=scramble, seed=seed)
