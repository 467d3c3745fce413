"""Grid verification of the explicit inequalities behind the constructions
and the Theorem-4 map, with slack reports.

Every report carries the minimum slack (lhs - rhs, so >= 0 means the
inequality holds) and where it was attained.  Slacks for the map are taken
from f(z) - z = -(1 - e^{-z}) / (z (z^2 + 4pi^2)) directly, which avoids the
cancellation in Re f(z) - R; the margins involved are of size R^-3.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .construction import (
    LN2,
    CoefficientPlan,
    PoleConfiguration,
    _sup_log_on_overlap,
    build_m_sequence,
    gap_start_index,
)
from .numerics import TWO_PI
from .zoo import PoleSeries, _e0_log, _pole_log, _theorem4_ratio

__all__ = [
    "InequalityReport",
    "Lemma5Result",
    "DEFAULT_R_GRID",
    "DEFAULT_T_FRACTIONS",
    "check_lemma5",
    "check_component_bounds",
    "component_sweep",
    "implied_lemma5_slacks",
    "check_coefficient_constraints",
    "check_pole_invariants",
    "format_reports",
    "write_reports_csv",
    "read_reports_csv",
]

FOUR_PI2 = 4.0 * math.pi ** 2
DEFAULT_R_GRID = tuple(float(r) for r in range(5, 201, 5))
DEFAULT_T_FRACTIONS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
FAR_T_FRACTIONS = (0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    grid: str
    min_slack: float
    argmin: tuple
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.min_slack >= 0))

    def argmin_text(self) -> str:
        return "(" + ",".join(repr(float(v)) if not isinstance(v, int) else str(v) for v in self.argmin) + ")"

    def line(self) -> str:
        return f"name={self.name} passed={str(self.passed).lower()} min_slack={self.min_slack!r} argmin={self.argmin_text()}"


def _report(name: str, grid: str, slack: np.ndarray, where: Sequence[tuple]) -> InequalityReport:
    slack = np.asarray(slack, dtype=float)
    if slack.size == 0:
        return InequalityReport(name, grid, math.inf, ())
    # NaN counts as a failure
    s = np.where(np.isnan(slack), -math.inf, slack)
    i = int(np.argmin(s))
    return InequalityReport(name, grid, float(s[i]), tuple(where[i]))


# ---------------------------------------------------------------------------
# quadrant-invariance inequalities on the boundary curves


def _t_grid(R: float, fractions: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """(near, far) t values: fractions * R within [0, R/2] and {R/2, R, 2R, 5R, 10R}."""
    near = np.array(sorted({f * R for f in fractions if 0 <= f <= 0.5}))
    far = np.array(sorted({f * R for f in FAR_T_FRACTIONS} | {f * R for f in fractions if f >= 0.5}))
    return near, far


def _curve(R: float, t: np.ndarray, curve: int) -> np.ndarray:
    if curve == 1:
        return (R + t) + 1j * R
    return R + 1j * (R + t)


def _lemma5_slacks(R: float, t: np.ndarray, curve: int) -> dict[str, np.ndarray]:
    """Slacks of the three items for one curve family; keys a (all t), b (t <= R/2), c (t >= R/2)."""
    z = _curve(R, t, curve)
    delta = -_theorem4_ratio(z)
    R3 = R ** -3
    with np.errstate(divide="ignore"):
        t3 = np.where(t > 0, t ** -3.0, np.inf)
    if curve == 1:
        along, across = t + delta.real, delta.imag  # Re f - R, Im f - R
    else:
        along, across = t + delta.imag, delta.real  # Im f - R, Re f - R
    return {"a": along - R3 / 50.0, "b": across - R3 / 10.0, "c": across - t3 / 5.0}


@dataclass
class Lemma5Result:
    reports: list
    l0: float | None  # smallest grid R from which all six items hold
    l0_per: dict  # same per item
    per_R: dict  # item -> list of (R, min slack at that R)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self) -> int:
        return len(self.reports)

    @property
    def passed(self) -> bool:
        """All six items hold for every grid R >= l0 (and l0 exists)."""
        return self.l0 is not None


def _l0_from(per_r: list[tuple[float, float]]) -> float | None:
    l0 = None
    for R, s in reversed(per_r):
        if not s >= 0:
            break
        l0 = R
    return l0


def check_lemma5(R_grid: Sequence[float] = DEFAULT_R_GRID,
                 t_fractions: Sequence[float] = DEFAULT_T_FRACTIONS) -> Lemma5Result:
    """Six quadrant-invariance items on gamma_{1,R} and gamma_{2,R}, evaluated from f directly.

    Item 1: Re f(g1) >= R + R^-3/50; Im f(g1) >= R + R^-3/10 (t <= R/2);
            Im f(g1) >= R + t^-3/5 (t >= R/2).
    Item 2: the same with Re and Im exchanged on g2.
    """
    R_grid = sorted(float(r) for r in R_grid)
    if not R_grid or not len(t_fractions):
        raise ValueError("grids must be non-empty")
    if R_grid[0] <= 0 or min(t_fractions) < 0:
        raise ValueError("need R > 0 and t fractions >= 0")
    names = [f"lemma5_{c}{k}" for c in (1, 2) for k in "abc"]
    slacks = {n: [] for n in names}
    where = {n: [] for n in names}
    per_R = {n: [] for n in names}
    for R in R_grid:
        near, far = _t_grid(R, t_fractions)
        allt = np.unique(np.concatenate([near, far]))
        for c in (1, 2):
            for key, ts in (("a", allt), ("b", near), ("c", far)):
                s = _lemma5_slacks(R, ts, c)[key]
                n = f"lemma5_{c}{key}"
                slacks[n].extend(s.tolist())
                where[n].extend((R, float(t)) for t in ts)
                per_R[n].append((R, float(np.min(np.where(np.isnan(s), -np.inf, s))) if s.size else math.inf))
    grid = f"R in [{R_grid[0]!r},{R_grid[-1]!r}] ({len(R_grid)} values); t fractions {list(t_fractions)} + far"
    reports = [_report(n, grid, np.array(slacks[n]), where[n]) for n in names]
    l0_per = {n: _l0_from(per_R[n]) for n in names}
    l0 = None if any(v is None for v in l0_per.values()) else max(l0_per.values())
    return Lemma5Result(reports, l0, l0_per, per_R)


# ---------------------------------------------------------------------------
# component bounds


def _components(z: np.ndarray):
    """(g1 - z, |g2|, |g3|) with g1 = z - z^-3, g2 = e^{-z}/z^3, g3 = (1 - e^{-z})/z^3 * 4pi^2/(z^2 + 4pi^2)."""
    e1 = -(z ** -3)
    lz = np.log(np.abs(z))
    g2 = np.exp(-z.real - 3.0 * lz)
    g3 = np.abs(-np.expm1(-z)) * FOUR_PI2 * np.exp(-3.0 * lz) / np.abs(z * z + FOUR_PI2)
    return e1, g2, g3


def _component_slacks(R: float, t: float, curve: int) -> dict[str, float]:
    if curve not in (1, 2):
        raise ValueError("curve must be 1 or 2")
    z = _curve(R, np.array([float(t)]), curve)
    e1, g2, g3 = (float(v[0]) if np.isrealobj(v) else complex(v[0]) for v in _components(z))
    out = {}
    g2_bound = R ** -3 * math.exp(-(R + t)) if curve == 1 else R ** -3 * math.exp(-R)
    out[f"g2_c{curve}"] = g2_bound - g2
    out[f"g3_pre_c{curve}"] = 8 * math.pi ** 2 * ((R + t) ** 2 + R ** 2) ** -2.5 - g3
    near = t <= R / 2
    far = t >= R / 2
    if near:
        out[f"g3_near_c{curve}"] = 25.0 * R ** -5 - g3
    if far:
        out[f"g3_far_c{curve}"] = 98.0 * t ** -5 - g3
    R3 = R ** -3
    if curve == 1:
        re1, im1 = t + e1.real, e1.imag  # Re g1 - R, Im g1 - R
        if near:
            out["est1_re"] = re1 - R3 / 46.0
            out["est1_im"] = im1 - R3 / 6.0
        if far:
            out["est2_re"] = re1 - R / 3.0
            out["est2_im"] = im1 - 1.0 / (4.0 * t ** 3)
    else:
        re1, im1 = e1.real, t + e1.imag
        if near:
            out["est3_re_near"] = re1 - R3 / 6.0
            out["est3_im_near"] = im1 - R3 / 46.0
        if far:
            out["est3_re_far"] = re1 - 1.0 / (4.0 * t ** 3)
            out["est3_im_far"] = im1 - R / 3.0
    return out


def check_component_bounds(R: float, t: float, curve: int) -> list[InequalityReport]:
    """Each piece of f = g1 + g2 + g3 on gamma_{curve,R}(t) against its stated bound."""
    if R < 10:
        raise ValueError("component bounds are stated for R >= 10")
    if t < 0:
        raise ValueError("t must be non-negative")
    grid = f"R={R!r} t={t!r} curve={curve}"
    return [InequalityReport(n, grid, float(s), (float(R), float(t)))
            for n, s in _component_slacks(float(R), float(t), curve).items()]


def component_sweep(R_grid: Sequence[float] = DEFAULT_R_GRID, t_fractions: Sequence[float] = DEFAULT_T_FRACTIONS,
                    R_min: float = 30.0) -> list[InequalityReport]:
    """check_component_bounds over the grid (R >= R_min), reduced per bound."""
    Rs = sorted(float(r) for r in R_grid if r >= R_min)
    if not Rs:
        raise ValueError("no grid radius at or above R_min")
    vals: dict[str, list] = {}
    where: dict[str, list] = {}
    for R in Rs:
        near, far = _t_grid(R, t_fractions)
        for t in np.unique(np.concatenate([near, far])):
            for c in (1, 2):
                for n, s in _component_slacks(R, float(t), c).items():
                    vals.setdefault(n, []).append(s)
                    where.setdefault(n, []).append((R, float(t)))
    grid = f"R in [{Rs[0]!r},{Rs[-1]!r}]; t fractions {list(t_fractions)} + far"
    return [_report(n, grid, np.array(vals[n]), where[n]) for n in vals]


def implied_lemma5_slacks(R: float, t: float) -> dict[str, float]:
    """Invariance slacks implied by the stated component bounds (triangle inequality)."""
    R3 = R ** -3
    g3 = 25.0 * R ** -5 if t <= R / 2 else 98.0 * t ** -5
    g2_1 = R3 * math.exp(-(R + t))
    g2_2 = R3 * math.exp(-R)
    out = {}
    if t <= R / 2:
        out["lemma5_1a"] = R3 / 46.0 - g2_1 - g3 - R3 / 50.0
        out["lemma5_1b"] = R3 / 6.0 - g2_1 - g3 - R3 / 10.0
        out["lemma5_2a"] = R3 / 46.0 - g2_2 - g3 - R3 / 50.0
        out["lemma5_2b"] = R3 / 6.0 - g2_2 - g3 - R3 / 10.0
    else:
        out["lemma5_1a"] = R / 3.0 - g2_1 - g3 - R3 / 50.0
        out["lemma5_1c"] = 1.0 / (4.0 * t ** 3) - g2_1 - g3 - 1.0 / (5.0 * t ** 3)
        out["lemma5_2a"] = R / 3.0 - g2_2 - g3 - R3 / 50.0
        out["lemma5_2c"] = 1.0 / (4.0 * t ** 3) - g2_2 - g3 - 1.0 / (5.0 * t ** 3)
    return out


def lemma5_slacks_at(R: float, t: float) -> dict[str, float]:
    """Direct invariance slacks at one (R, t), with the same keys as implied_lemma5_slacks."""
    ts = np.array([float(t)])
    out = {}
    for c in (1, 2):
        s = _lemma5_slacks(float(R), ts, c)
        out[f"lemma5_{c}a"] = float(s["a"][0])
        if t <= R / 2:
            out[f"lemma5_{c}b"] = float(s["b"][0])
        if t >= R / 2:
            out[f"lemma5_{c}c"] = float(s["c"][0])
    return out


# ---------------------------------------------------------------------------
# coefficient plan


def _disk_max_log(c_bound: float, r0: float, n: int = 4096) -> float:
    """max log|E0| on |w| = r0 (maximum principle gives the disk)."""
    th = np.arange(n) * (TWO_PI / n)
    lm, _ = _e0_log(c_bound, r0 * np.exp(1j * th))
    return float(np.max(lm))


def check_coefficient_constraints(plan: CoefficientPlan, n_grid: int = 2000) -> list[InequalityReport]:
    """Re-verify a plan on a grid 10x finer than the default construction grid.

    Reports, per k >= 1 (the coefficient a_{k+1}):
      cap       a_{k+1} <= 2^-k
      overlap   |a_{k+1} f_{k+1}| <= 2^-k on the overlap with earlier strips
      disk      |a_{k+1} f_{k+1}| <= 2^-k R' on D(0, R0)
    and the constants C R0^-2 < 1/3 and 2R' <= R0.
    """
    dirs = plan.directions
    logs = plan.coeff_logs
    if len(dirs) != len(logs):
        raise ValueError("plan has mismatched directions and coefficients")
    cap, over, disk = [], [], []
    disk_log = plan.lam_log + _disk_max_log(plan.c_bound, plan.r0)
    for k in range(1, len(dirs)):
        a = math.exp(logs[k])
        bound = math.exp(-k * LN2)
        cap.append(bound - a)
        sup = _sup_log_on_overlap(dirs[k], dirs[:k], plan.lam_log, plan.c_bound, n_grid)
        over.append(bound - (math.exp(logs[k] + sup) if sup > -math.inf else 0.0))
        disk.append(bound * plan.r_prime - math.exp(logs[k] + disk_log))
    ks = [(k,) for k in range(1, len(dirs))]
    grid = f"overlap grid {n_grid}x{n_grid}; k=1..{len(dirs) - 1}"
    reports = []
    if ks:
        reports += [_report("coeff_cap", grid, np.array(cap), ks),
                    _report("coeff_overlap", grid, np.array(over), ks),
                    _report("coeff_disk", grid, np.array(disk), ks)]
    reports.append(InequalityReport("lemma4_CR0", "constants", 1.0 / 3.0 - plan.c_bound / plan.r0 ** 2, ()))
    reports.append(InequalityReport("lemma4_Rprime", "constants", plan.r0 - 2.0 * plan.r_prime, ()))
    return reports


# ---------------------------------------------------------------------------
# pole configurations


def _covering_samples(config: PoleConfiguration, n: int, seed: int = 0) -> np.ndarray:
    """Quasi-random points at distance >= 2 from every representable pole.

    Half lie in annuli 2 <= |z - a_k| <= 6 around the poles, half in the disk
    of radius 2 max r_k.
    """
    poles = np.array([config.position(k) for k in range(len(config)) if config.position(k) is not None])
    rmax = float(np.max(np.abs(poles))) if poles.size else 10.0
    sampler = _halton(d=3, scramble=True, seed=seed)
    u = sampler.random(n)
    half = n // 2
    near = np.empty(0, dtype=complex)
    if poles.size:
        idx = np.minimum((u[:half, 0] * poles.size).astype(int), poles.size - 1)
        rad = 2.0 + 4.0 * u[:half, 1]
        near = poles[idx] + rad * np.exp(1j * TWO_PI * u[:half, 2])
    rr = 2.0 * rmax * np.sqrt(u[half:, 0])
    disk = rr * np.exp(1j * TWO_PI * u[half:, 1])
    z = np.concatenate([near, disk])
    if poles.size:
        dmin = np.min(np.abs(z[:, None] - poles[None, :]), axis=1)
        z = z[dmin >= 2.0]
    return z


def check_pole_invariants(config: PoleConfiguration, gap: float = 100.0, n_samples: int = 10_000) -> list[InequalityReport]:
    """Recursion (exact integers), log2 m_k >= 2^{k-1}, the radius gap from k0 on,
    and |g0| < 1 away from the poles together with sum 2^{-m_k} < 1."""
    if config.label != "canonical":
        raise ValueError("pole invariants apply to the canonical configuration")
    reports = []
    exact = [m for m in config.m if m is not None]
    if exact:
        ref = build_m_sequence(len(exact))
        rec = [0.0 if exact[k] == ref[k] else -1.0 for k in range(len(exact))]
        reports.append(_report("recursion", f"exact m_1..m_{len(exact)}", np.array(rec),
                               [(k + 1,) for k in range(len(exact))]))
    log2m = np.asarray(config.log_m, dtype=float) / LN2
    ks = np.arange(1, len(config) + 1)
    with np.errstate(over="ignore"):
        reports.append(_report("log2_bound", f"k=1..{len(config)}", log2m - 2.0 ** (ks - 1), [(int(k),) for k in ks]))
    k0 = gap_start_index(config, gap)
    lr = np.asarray(config.log_r, dtype=float)
    gaps, where = [], []
    start = k0 if k0 is not None else 1
    for k in range(start - 1, len(lr) - 1):
        a, b = lr[k], lr[k + 1]
        g = math.inf if b > 700 and b > a else math.exp(b) - math.exp(a)
        gaps.append(g - gap)
        where.append((k + 1,))
    name = f"gap_k0={k0}" if k0 is not None else "gap_k0=none"
    rep = _report(name, f"r_(k+1) - r_k >= {gap!r} for k >= k0", np.array(gaps), where)
    if k0 is None and rep.passed:
        rep = InequalityReport(name, rep.grid, -math.inf, rep.argmin)
    reports.append(rep)
    rep_cfg = config.representable()
    with np.errstate(over="ignore"):
        m_all = np.array([config.multiplicity_float(k) for k in range(len(config))])
    total = float(np.sum(np.exp2(-m_all)))
    reports.append(InequalityReport("sum_2^-m", f"k=1..{len(config)}", 1.0 - total, ()))
    z = _covering_samples(rep_cfg, n_samples)
    lm, _ = _pole_log(PoleSeries(rep_cfg), z)
    vals = np.exp(lm)
    reports.append(_report("covering_g0", f"{z.size} samples, pole distance >= 2", 1.0 - vals,
                           [(float(v.real), float(v.imag)) for v in z]))
    return reports


# ---------------------------------------------------------------------------
# export


def format_reports(reports: Iterable[InequalityReport]) -> str:
    return "".join(r.line() + "\n" for r in reports)


def write_reports_csv(reports: Iterable[InequalityReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "passed", "min_slack", "argmin", "grid"])
        for r in reports:
            w.writerow([r.name, str(r.passed).lower(), repr(r.min_slack), r.argmin_text(), r.grid])


def read_reports_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _halton(d: int, scramble: bool, seed: int):
    from scipy.stats import qmc  # slow import, only needed here

    return qmc.Halton(d=d, scramble=scramble, seed=seed)
