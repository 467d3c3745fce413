"""Log-domain complex arithmetic and arc sets on the circle.

Values that overflow double precision are carried as ``(log_mag, arg)``
pairs.  Direction sets are finite unions of closed arcs on the circle
R/2piZ, stored internally as sorted disjoint intervals inside [0, 2pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "TWO_PI",
    "LogComplex",
    "wrap_arg",
    "log_sum",
    "log_gamma",
    "Arc",
    "DirectionSet",
    "arcs_from_bins",
    "bin_centers",
    "arc_union_measure",
    "direction_set_distance",
    "hausdorff_distance",
    "Tower",
]

TWO_PI = 2.0 * math.pi


def wrap_arg(a):
    """Reduce angles to (-pi, pi].  Works on scalars and arrays."""
    if np.isscalar(a):
        a = float(a)
        if not math.isfinite(a):
            return 0.0
        r = math.remainder(a, TWO_PI)
        return math.pi if r == -math.pi else r
    a = np.asarray(a, dtype=float)
    out = np.remainder(a + math.pi, TWO_PI) - math.pi
    out = np.where(out <= -math.pi, math.pi, out)
    return np.where(np.isfinite(out), out, 0.0)


@dataclass(frozen=True)
class LogComplex:
    """Complex number ``exp(log_mag) * exp(i arg)``; zero has log_mag = -inf."""

    log_mag: float
    arg: float = 0.0

    def __post_init__(self):
        if math.isnan(self.log_mag):
            raise ValueError("log_mag is NaN")
        object.__setattr__(self, "arg", wrap_arg(self.arg) if self.log_mag > -math.inf else 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return cls(math.inf, math.atan2(z.imag, z.real) if not math.isnan(z.real + z.imag) else 0.0)
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.log_mag == -math.inf

    def to_complex(self) -> complex:
        """Convert back; raises OverflowError when the magnitude is not representable."""
        if self.log_mag == -math.inf:
            return 0j
        if self.log_mag > 709.78:
            raise OverflowError("magnitude exceeds double range")
        m = math.exp(self.log_mag)
        return complex(m * math.cos(self.arg), m * math.sin(self.arg))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag, self.arg + other.arg)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero:
            raise ZeroDivisionError("division by zero LogComplex")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag - other.log_mag, self.arg - other.arg)

    def __neg__(self) -> "LogComplex":
        return LogComplex(self.log_mag, self.arg + math.pi)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        lm, ar = log_sum(np.array([self.log_mag, other.log_mag]), np.array([self.arg, other.arg]))
        return LogComplex(float(lm), float(ar))

    def __sub__(self, other: "LogComplex") -> "LogComplex":
        return self + (-other)

    def scale(self, log_t: float) -> "LogComplex":
        """Multiply by the positive real ``exp(log_t)``."""
        if self.is_zero:
            return self
        return LogComplex(self.log_mag + log_t, self.arg)

    def power(self, p: float) -> "LogComplex":
        """Principal real power ``z**p``."""
        if self.is_zero:
            if p > 0:
                return self
            raise ZeroDivisionError("zero to a non-positive power")
        return LogComplex(p * self.log_mag, p * self.arg)


def log_sum(log_mags, args, axis: int = 0):
    """Sum complex terms given in log form along ``axis``.

    Terms are rescaled by the peak magnitude before summation, so the
    result is exact up to double rounding relative to the largest term.
    If the peak is +inf the phases of the infinite terms are summed.
    Returns ``(log_mag, arg)`` arrays (or scalars for 1-D input).
    """
    lm = np.asarray(log_mags, dtype=float)
    ar = np.asarray(args, dtype=float)
    lm, ar = np.broadcast_arrays(lm, ar)
    with np.errstate(invalid="ignore", over="ignore", under="ignore", divide="ignore"):
        peak = np.max(lm, axis=axis, keepdims=True)
        finite_peak = np.where(np.isfinite(peak), peak, 0.0)
        w = np.exp(lm - finite_peak)
        # infinite peak: only the infinite terms matter
        w = np.where(np.isposinf(peak), np.where(np.isposinf(lm), 1.0, 0.0), w)
        w = np.where(np.isneginf(lm), 0.0, w)
        s = np.sum(w * np.exp(1j * ar), axis=axis)
        peak = np.squeeze(peak, axis=axis)
        finite_peak = np.squeeze(finite_peak, axis=axis)
        mag = np.abs(s)
        out_lm = np.where(np.isposinf(peak), np.inf, finite_peak + np.log(mag))
        out_lm = np.where(np.isneginf(peak), -np.inf, out_lm)
        out_ar = np.where(mag > 0, np.angle(s), 0.0)
    return out_lm, wrap_arg(out_ar)


def log_gamma(x):
    """ln Gamma(x) for real x > 0 (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("log_gamma is defined here only for x > 0")
    out = gammaln(xa)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Tower:
    """Real number exp(exp(...exp(top))) with ``level`` exponentials.

    Canonical form: ``top <= LIFT`` and, for level >= 1, ``top > ln LIFT``,
    so that larger levels always mean larger values.  Used for orbits whose
    logarithms themselves overflow.
    """

    level: int
    top: float

    LIFT = 709.0

    @classmethod
    def from_float(cls, x: float) -> "Tower":
        return cls(0, float(x)).normalized()

    def normalized(self) -> "Tower":
        lvl, t = self.level, self.top
        while t > self.LIFT and math.isfinite(t):
            t = math.log(t)
            lvl += 1
        while lvl > 0 and t <= math.log(self.LIFT):
            t = math.exp(t)
            lvl -= 1
        return Tower(lvl, t)

    def exp(self) -> "Tower":
        if self.level == 0:
            if self.top <= self.LIFT:
                return Tower(0, math.exp(self.top)).normalized()
            return Tower(1, self.top).normalized()
        return Tower(self.level + 1, self.top)

    def log(self) -> "Tower":
        if self.level >= 1:
            return Tower(self.level - 1, self.top)
        if self.top <= 0:
            raise ValueError("log of a non-positive value")
        return Tower(0, math.log(self.top))

    def add_small(self, delta: float) -> "Tower":
        """self + delta, dropping what falls below double resolution."""
        if self.level == 0:
            return Tower(0, self.top + delta).normalized()
        if self.level == 1:
            return Tower(1, self.top + math.log1p(delta * math.exp(-self.top))).normalized()
        return self

    def to_float(self) -> float:
        if self.level == 0:
            return self.top
        if self.level == 1:
            return math.exp(self.top)
        return math.inf

    def _key(self):
        return (self.level, self.top)

    def __lt__(self, other: "Tower") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Tower") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Tower") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Tower") -> bool:
        return self._key() >= other._key()

    def __str__(self) -> str:
        if self.level == 0:
            return repr(self.top)
        return "exp^" + str(self.level) + "(" + repr(self.top) + ")"


@dataclass(frozen=True)
class Arc:
    """Closed counterclockwise arc from ``lo`` to ``hi``.

    ``lo`` lies in [0, 2pi); ``hi < lo`` means the arc wraps through 0.
    The full circle is ``Arc(0, 2pi)``.
    """

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("arc endpoints must be finite")
        length = hi - lo
        if length < 0 or length > TWO_PI:
            length = length % TWO_PI if length < 0 else TWO_PI
        if length >= TWO_PI:
            lo, hi = 0.0, TWO_PI
        else:
            lo = lo % TWO_PI
            hi = lo + length
            if hi > TWO_PI:
                hi -= TWO_PI
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def measure(self) -> float:
        return self.hi - self.lo if self.hi >= self.lo else self.hi + TWO_PI - self.lo

    @property
    def wraps(self) -> bool:
        return self.hi < self.lo

    def pieces(self) -> list[tuple[float, float]]:
        if self.wraps:
            return [(self.lo, TWO_PI), (0.0, self.hi)]
        return [(self.lo, self.hi)]

    def contains(self, theta: float, tol: float = 0.0) -> bool:
        return DirectionSet.from_arcs([self]).contains(theta, tol)

    def midpoint(self) -> float:
        return (self.lo + self.measure / 2) % TWO_PI


def _merge(intervals: Iterable[tuple[float, float]], gap: float = 0.0) -> list[tuple[float, float]]:
    ivs = sorted((max(0.0, a), min(TWO_PI, b)) for a, b in intervals if b >= a)
    out: list[list[float]] = []
    for a, b in ivs:
        if out and a <= out[-1][1] + gap:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


class DirectionSet:
    """Finite union of closed arcs on R/2piZ."""

    def __init__(self, intervals: Iterable[tuple[float, float]] = ()):
        self._iv = tuple(_merge(intervals))

    @classmethod
    def from_arcs(cls, arcs: Iterable[Arc]) -> "DirectionSet":
        pieces: list[tuple[float, float]] = []
        for arc in arcs:
            pieces.extend(arc.pieces())
        return cls(pieces)

    @classmethod
    def full(cls) -> "DirectionSet":
        return cls([(0.0, TWO_PI)])

    @classmethod
    def points(cls, thetas: Iterable[float]) -> "DirectionSet":
        return cls([(t % TWO_PI, t % TWO_PI) for t in thetas])

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return self._iv

    @property
    def arcs(self) -> list[Arc]:
        """Maximal arcs, joining pieces that meet at 0 = 2pi."""
        iv = list(self._iv)
        if not iv:
            return []
        if len(iv) == 1 and iv[0][0] <= 0.0 and iv[0][1] >= TWO_PI:
            return [Arc(0.0, TWO_PI)]
        if len(iv) > 1 and iv[0][0] <= 0.0 and iv[-1][1] >= TWO_PI:
            first = iv.pop(0)
            last = iv.pop()
            iv.append((last[0], first[1] + TWO_PI))
        return [Arc(a, b) for a, b in iv]

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self._iv))

    def is_empty(self) -> bool:
        return not self._iv

    def __len__(self) -> int:
        return len(self.arcs)

    def __eq__(self, other) -> bool:
        return isinstance(other, DirectionSet) and self._iv == other._iv

    def __repr__(self) -> str:
        inner = ", ".join(f"[{a.lo:.6g}, {a.hi:.6g}]" for a in self.arcs)
        return f"DirectionSet({inner})"

    def union(self, other: "DirectionSet") -> "DirectionSet":
        return DirectionSet(self._iv + other._iv)

    def intersection(self, other: "DirectionSet") -> "DirectionSet":
        out = []
        i = j = 0
        a, b = self._iv, other._iv
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return DirectionSet(out)

    def complement(self) -> "DirectionSet":
        out = []
        cur = 0.0
        for a, b in self._iv:
            if a > cur:
                out.append((cur, a))
            cur = max(cur, b)
        if cur < TWO_PI:
            out.append((cur, TWO_PI))
        return DirectionSet(out)

    def dilate(self, eps: float) -> "DirectionSet":
        """Grow every arc by ``eps`` on both sides (circularly)."""
        if eps <= 0:
            return self
        arcs = [Arc(arc.lo - eps, arc.lo + arc.measure + eps) for arc in self.arcs]
        return DirectionSet.from_arcs(arcs)

    def symmetric_difference_measure(self, other: "DirectionSet") -> float:
        return max(0.0, self.measure + other.measure - 2.0 * self.intersection(other).measure)

    def contains(self, theta: float, tol: float = 0.0) -> bool:
        t = float(theta) % TWO_PI
        for a, b in self._iv:
            if a - tol <= t <= b + tol:
                return True
            if a - tol <= t - TWO_PI <= b + tol or a - tol <= t + TWO_PI <= b + tol:
                return True
        return False

    def is_subset(self, other: "DirectionSet", tol: float = 0.0, atol: float = 1e-12) -> bool:
        """True if every point of self lies within ``tol`` of ``other``."""
        grown = other.dilate(tol)
        return self.measure - self.intersection(grown).measure <= atol and all(
            grown.contains(a) and grown.contains(b) for a, b in self._iv
        )


def bin_centers(n_bins: int) -> np.ndarray:
    """Centres ``(b + 1/2) 2pi/B`` of the B equal angular bins."""
    if n_bins < 1:
        raise ValueError("need at least one bin")
    return (np.arange(n_bins) + 0.5) * (TWO_PI / n_bins)


def arcs_from_bins(flags: Sequence[bool], gap_tolerance: int = 1) -> DirectionSet:
    """Closure of the flagged bins, bridging gaps of up to ``gap_tolerance`` bins.

    Bin ``b`` of B covers [b w, (b+1) w] with w = 2pi/B; bins wrap around.
    """
    f = np.asarray(flags, dtype=bool).copy()
    n = f.size
    if n == 0 or not f.any():
        return DirectionSet()
    if gap_tolerance > 0 and not f.all():
        filled = f.copy()
        idx = np.flatnonzero(f)
        # fill short circular gaps between consecutive flagged bins
        nxt = np.roll(idx, -1)
        gaps = (nxt - idx - 1) % n
        for start, g in zip(idx, gaps):
            if 0 < g <= gap_tolerance:
                for k in range(1, g + 1):
                    filled[(start + k) % n] = True
        f = filled
    if f.all():
        return DirectionSet.full()
    w = TWO_PI / n
    intervals = []
    b = 0
    while b < n:
        if f[b]:
            e = b
            while e + 1 < n and f[e + 1]:
                e += 1
            intervals.append((b * w, (e + 1) * w if e + 1 < n else TWO_PI))
            b = e + 1
        else:
            b += 1
    return DirectionSet(intervals)


def arc_union_measure(arcs: "DirectionSet | Iterable[Arc]") -> float:
    """Lebesgue measure of a union of arcs."""
    if isinstance(arcs, DirectionSet):
        return arcs.measure
    return DirectionSet.from_arcs(arcs).measure


def direction_set_distance(a: DirectionSet, b: DirectionSet) -> float:
    """Measure of the symmetric difference of two direction sets."""
    return a.symmetric_difference_measure(b)


def hausdorff_distance(a: DirectionSet, b: DirectionSet) -> float:
    """Hausdorff distance on the circle; pi if exactly one set is empty."""
    if a.is_empty() and b.is_empty():
        return 0.0
    if a.is_empty() or b.is_empty():
        return math.pi
    return max(_directed(a, b), _directed(b, a))


def _point_dist(t: float, s: DirectionSet) -> float:
    best = math.pi
    for lo, hi in s.intervals:
        for shift in (-TWO_PI, 0.0, TWO_PI):
            u = t + shift
            if lo <= u <= hi:
                return 0.0
            best = min(best, abs(u - lo), abs(u - hi))
    return best


def _directed(a: DirectionSet, b: DirectionSet) -> float:
    # the sup of dist(., b) over a is attained at an endpoint of a or at a
    # point of a midway between two endpoints of b
    cand = []
    for lo, hi in a.intervals:
        cand += [lo, hi]
    ends = sorted({x % TWO_PI for iv in b.intervals for x in iv})
    for i, e in enumerate(ends):
        nxt = ends[(i + 1) % len(ends)] + (TWO_PI if i + 1 == len(ends) else 0.0)
        cand.append(((e + nxt) / 2) % TWO_PI)
    return max((_point_dist(t, b) for t in cand if a.contains(t)), default=0.0)
