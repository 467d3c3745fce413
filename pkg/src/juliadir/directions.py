"""Growth profiles, transcendental-direction estimates, order estimates, and
the measure quantities attached to them.

A growth profile samples log|f(r e^{i theta_b})| / ln r on bin centres
theta_b = (b + 1/2) 2pi/B for a list of radii.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .construction import PoleConfiguration
from .numerics import TWO_PI, Arc, DirectionSet, arcs_from_bins, bin_centers
from .zoo import PoleSeries, log_eval

__all__ = [
    "GrowthProfile",
    "OrderEstimate",
    "DegenerateFitError",
    "sample_growth_profile",
    "estimate_TD",
    "estimate_order_entire",
    "estimate_order_from_poles",
    "log_N",
    "lower_bound_measure",
    "lambda_threshold_set",
    "threshold_set",
    "geometric_radii",
    "write_direction_set_csv",
    "read_direction_set_csv",
]


class DegenerateFitError(ValueError):
    """The growth functional is not positive, so its logarithm cannot be fitted."""


def geometric_radii(r0: float, multiplier: float = 2.0, count: int = 3) -> list[float]:
    if r0 <= 0 or multiplier <= 1 or count < 1:
        raise ValueError("need r0 > 0, multiplier > 1 and count >= 1")
    return [r0 * multiplier ** k for k in range(count)]


@dataclass(frozen=True)
class GrowthProfile:
    radii: np.ndarray
    bins: int
    indicator: np.ndarray  # shape (B, len(radii))
    flagged: np.ndarray  # pole-adjacent or undefined samples

    @property
    def thetas(self) -> np.ndarray:
        return bin_centers(self.bins)

    def to_csv(self, path) -> None:
        th = self.thetas
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "theta", "indicator"])
            for j, r in enumerate(self.radii):
                for b in range(self.bins):
                    w.writerow([repr(float(r)), repr(float(th[b])), repr(float(self.indicator[b, j]))])


def _pole_adjacent(spec, z: np.ndarray, eps: float) -> np.ndarray:
    if not isinstance(spec, PoleSeries):
        return np.zeros(z.shape, dtype=bool)
    near = np.zeros(z.shape, dtype=bool)
    for a, _ in spec.terms():
        near |= np.abs(z - a) < eps
    return near


def sample_growth_profile(spec, radii: Sequence[float], B: int = 3600, pole_eps: float = 1e-8) -> GrowthProfile:
    """log|f| / ln r on the (bin centre, radius) grid."""
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 1:
        raise ValueError("radii must be a non-empty list")
    if np.any(radii < 2):
        raise ValueError("radii must be at least 2")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    if B < 8:
        raise ValueError("need at least 8 bins")
    th = bin_centers(B)
    z = radii[None, :] * np.exp(1j * th)[:, None]
    lm, _ = log_eval(spec, z)
    ind = lm / np.log(radii)[None, :]
    flagged = np.isnan(ind) | _pole_adjacent(spec, z, pole_eps * np.maximum(1.0, radii)[None, :])
    ind = np.where(flagged, np.nan, ind)
    # bins that are mostly flagged inherit the larger finite neighbour value
    heavy = flagged.mean(axis=1) > 0.5
    if heavy.any():
        left = np.roll(ind, 1, axis=0)
        right = np.roll(ind, -1, axis=0)
        inherit = np.fmax(left, right)
        ind = np.where(heavy[:, None] & flagged, inherit, ind)
    return GrowthProfile(radii, int(B), ind, flagged)


def estimate_TD(profile: GrowthProfile, tau: float = 20.0, gap_tolerance: int = 1) -> DirectionSet:
    """Bins whose indicator exceeds tau at the top radius and is non-decreasing
    over the top three radii."""
    ind = profile.indicator
    if ind.shape[1] < 3:
        raise ValueError("need at least three radii")
    a, b, c = ind[:, -3], ind[:, -2], ind[:, -1]
    with np.errstate(invalid="ignore"):
        flags = (c > tau) & (a <= b) & (b <= c)
    return arcs_from_bins(flags, gap_tolerance)


@dataclass(frozen=True)
class OrderEstimate:
    rho: float
    samples: tuple  # (ln r, ln of the growth functional)
    method: str  # "max_modulus" or "pole_counting"


def _slope_top_half(x: np.ndarray, y: np.ndarray) -> float:
    n = len(x)
    k = max(2, (n + 1) // 2)
    xs, ys = x[-k:], y[-k:]
    slope = float(np.polyfit(xs, ys, 1)[0])
    return max(slope, 0.0)


def estimate_order_entire(spec, radii: Sequence[float], B: int = 360) -> OrderEstimate:
    """Slope of ln ln M(r) against ln r over the top half of the radii."""
    radii = np.asarray(radii, dtype=float)
    if radii.size < 2 or radii.max() / radii.min() < 10 - 1e-12:
        raise ValueError("radii must span at least one decade")
    th = bin_centers(B)
    log_M = np.empty(radii.size)
    for j, r in enumerate(radii):
        lm, _ = log_eval(spec, r * np.exp(1j * th))
        log_M[j] = np.nanmax(lm)
    if np.any(~(log_M > 0)):
        raise DegenerateFitError("ln M(r) <= 0 at some radius")
    x = np.log(radii)
    y = np.log(log_M)
    return OrderEstimate(_slope_top_half(x, y), tuple(zip(x.tolist(), y.tolist())), "max_modulus")


def log_N(config: PoleConfiguration, r: float) -> float:
    """ln N(r) with N(r) = sum_{r_k <= r} m_k ln(r / r_k), the integrated counting function."""
    lr = math.log(r)
    terms = []
    c = config.sorted()
    for k in range(len(c)):
        d = lr - c.log_r[k]
        if d > 0:
            terms.append(c.log_m[k] + math.log(d))
    if not terms:
        return -math.inf
    t = np.array(terms)
    peak = t.max()
    return float(peak + math.log(np.sum(np.exp(t - peak))))


def estimate_order_from_poles(config: PoleConfiguration, radii: Sequence[float]) -> OrderEstimate:
    """Slope of ln N(r) against ln r over the top half of the radii."""
    if len(config) == 0:
        raise ValueError("empty pole configuration")
    radii = np.asarray(sorted(radii), dtype=float)
    x = np.log(radii)
    y = np.array([log_N(config, r) for r in radii])
    if np.any(~np.isfinite(y[-max(2, (len(y) + 1) // 2):])):
        raise DegenerateFitError("N(r) vanishes on the fitted radii")
    return OrderEstimate(_slope_top_half(x, y), tuple(zip(x.tolist(), y.tolist())), "pole_counting")


def lower_bound_measure(mu: float, delta: float) -> float:
    """min(2pi, (4/mu) arcsin sqrt(delta/2))."""
    if not mu > 0 or not (0 < delta <= 1):
        raise ValueError("need mu > 0 and 0 < delta <= 1")
    return min(TWO_PI, 4.0 / mu * math.asin(math.sqrt(delta / 2.0)))


def threshold_set(g: Callable[[np.ndarray], np.ndarray], B: int = 3600, refine: bool = True,
                  iters: int = 60) -> DirectionSet:
    """{theta : g(theta) > 0} from bin-centre signs, with endpoints located by bisection.

    Without refinement the set is the union of flagged bins (no gap bridging).
    """
    th = bin_centers(B)
    v = g(th) > 0
    if v.all():
        return DirectionSet.full()
    if not v.any():
        return DirectionSet()
    if not refine:
        return arcs_from_bins(v, gap_tolerance=0)
    w = TWO_PI / B
    # crossings between centre b and centre b+1 (circularly)
    nxt = np.roll(v, -1)
    idx = np.flatnonzero(v != nxt)
    lo = th[idx].copy()
    hi = lo + w
    rising = ~v[idx]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = g(mid % TWO_PI) > 0
        move_hi = pos == rising
        hi = np.where(move_hi, mid, hi)
        lo = np.where(move_hi, lo, mid)
    cross = (0.5 * (lo + hi)) % TWO_PI
    starts = [c for c, r in zip(cross, rising) if r]
    ends = [c for c, r in zip(cross, rising) if not r]
    starts.sort()
    ends.sort()
    # pair every start with the next end counterclockwise
    arcs = []
    ends_arr = np.array(ends)
    for s in starts:
        later = ends_arr[ends_arr > s]
        e = later.min() if later.size else ends_arr.min() + TWO_PI
        arcs.append((s, e))
    return DirectionSet.from_arcs(Arc(s, e) for s, e in arcs)


def lambda_threshold_set(spec, r: float, T_of_r: float, B: int = 3600, refine: bool = True) -> DirectionSet:
    """{theta : log|f(r e^{i theta})| > Lambda(r)} with Lambda(r) = sqrt(T(r) ln r)."""
    if r < 2 or not T_of_r > 0:
        raise ValueError("need r >= 2 and T(r) > 0")
    lam = math.sqrt(T_of_r * math.log(r))

    def g(theta):
        lm, _ = log_eval(spec, r * np.exp(1j * np.asarray(theta)))
        return lm - lam

    return threshold_set(g, B, refine)


def write_direction_set_csv(ds: DirectionSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lo", "hi"])
        for arc in ds.arcs:
            w.writerow([repr(float(arc.lo)), repr(float(arc.hi))])


def read_direction_set_csv(path) -> DirectionSet:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return DirectionSet.from_arcs(Arc(float(r["lo"]), float(r["hi"])) for r in rows)
