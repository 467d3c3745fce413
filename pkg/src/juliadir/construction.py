"""Generators for the two inverse-problem constructions and the interval
decomposition used to build entire functions with prescribed direction sets.

* poles a_k = r_k e^{i theta_k} with multiplicities m_1 = 2,
  m_{k+1} = 2^(m_1 + ... + m_k), placed on rays from a finite set E;
* coefficients a_n for S(z) = sum a_n lambda e^{i theta_n} E0(e^{-i theta_n} z),
  chosen so each new strip term is small on its overlap with earlier strips;
* the split of an arc J into pieces of length pi/rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numerics import TWO_PI, Arc, wrap_arg
from .zoo import _e0_log

__all__ = [
    "EXACT_M_CAP",
    "PoleConfiguration",
    "CoefficientPlan",
    "Lemma4Constants",
    "Piece",
    "IntervalDecomposition",
    "UnboundedOverlapError",
    "build_m_sequence",
    "log_m_sequence",
    "build_pole_configuration",
    "mild_pole_configuration",
    "gap_start_index",
    "solve_lemma4_constants",
    "overlap_extent",
    "overlap_mask",
    "choose_coefficients",
    "partition_interval",
    "eval_growth_indicator",
    "count_growth_ties",
]

# m_5 = 2^(2^70 + 70) has about 2^70 bits, so exact integers stop at m_4
EXACT_M_CAP = 4
LOG_R_REPRESENTABLE = 700.0
LN2 = math.log(2.0)


class UnboundedOverlapError(ValueError):
    """Two strip directions coincide, so their overlap is unbounded."""


# ---------------------------------------------------------------------------
# multiplicities and poles


def build_m_sequence(K: int) -> list[int]:
    """Exact m_1..m_K; only K <= EXACT_M_CAP is feasible."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > EXACT_M_CAP:
        raise ValueError(f"exact m_k is capped at K = {EXACT_M_CAP}; use log_m_sequence")
    m = [2]
    while len(m) < K:
        m.append(1 << sum(m))
    return m


def log_m_sequence(K: int) -> np.ndarray:
    """ln m_k for k = 1..K via ln m_{k+1} = (m_1 + ... + m_k) ln 2 (inf once it overflows)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    exact = build_m_sequence(min(K, EXACT_M_CAP))
    logs = [math.log(m) for m in exact]
    total = float(sum(exact))
    while len(logs) < K:
        logs.append(total * LN2)
        with np.errstate(over="ignore"):
            total = total + float(np.exp(logs[-1])) if logs[-1] < 709.7 else math.inf
    return np.array(logs)


@dataclass(frozen=True)
class PoleConfiguration:
    """Poles a_k = r_k e^{i theta_k} with multiplicities m_k.

    ``m`` holds exact integers where known (None beyond the exact cap);
    ``log_m`` and ``log_r`` are always available.  ``rho`` is the order tag:
    0, a positive real, or ``math.inf``.
    """

    thetas: tuple
    log_r: tuple
    log_m: tuple
    m: tuple
    rho: float
    label: str = "canonical"
    r_exact: tuple = ()  # radii computed from exact m_k where representable

    def __len__(self) -> int:
        return len(self.thetas)

    def position(self, k: int) -> complex | None:
        """a_k as a complex number, or None when r_k is not representable."""
        lr = self.log_r[k]
        if lr > LOG_R_REPRESENTABLE:
            return None
        r = self.r_exact[k] if k < len(self.r_exact) and self.r_exact[k] is not None else math.exp(lr)
        return complex(r * math.cos(self.thetas[k]), r * math.sin(self.thetas[k]))

    def multiplicity_float(self, k: int) -> float:
        if self.m[k] is not None:
            return float(self.m[k])
        return float(np.exp(self.log_m[k])) if self.log_m[k] < 709.7 else math.inf

    @property
    def entries(self) -> list[tuple[complex | None, int | None]]:
        return [(self.position(k), self.m[k]) for k in range(len(self))]

    def radii(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(self.log_r, dtype=float))

    def representable(self) -> "PoleConfiguration":
        """Keep the poles that can be placed in double precision with exact m."""
        keep = [k for k in range(len(self)) if self.log_r[k] <= LOG_R_REPRESENTABLE and self.m[k] is not None]
        return self.subset(keep)

    def truncate(self, K: int) -> "PoleConfiguration":
        return self.subset(range(min(K, len(self))))

    def subset(self, idx) -> "PoleConfiguration":
        idx = list(idx)
        return PoleConfiguration(
            thetas=tuple(self.thetas[k] for k in idx),
            log_r=tuple(self.log_r[k] for k in idx),
            log_m=tuple(self.log_m[k] for k in idx),
            m=tuple(self.m[k] for k in idx),
            rho=self.rho,
            label=self.label,
            r_exact=tuple(self.r_exact[k] if k < len(self.r_exact) else None for k in idx),
        )

    def sorted(self) -> "PoleConfiguration":
        order = sorted(range(len(self)), key=lambda k: (self.log_r[k], self.thetas[k]))
        return self.subset(order)

    def counting(self, r: float) -> int:
        """n(r) = sum of m_k over poles with r_k <= r (exact where m_k is known)."""
        lr = math.log(r)
        total = 0
        for k in range(len(self)):
            if self.log_r[k] <= lr:
                if self.m[k] is None:
                    raise OverflowError("counting past the exact multiplicity cap")
                total += self.m[k]
        return total


def _log_r(log_m: float, rho: float, k: int) -> float:
    if rho == 0:
        return k * log_m
    if math.isinf(rho):
        return log_m / k
    return log_m / rho


def build_pole_configuration(E: Sequence[float], rho: float, K: int) -> PoleConfiguration:
    """Canonical configuration: theta_k round-robin over E, r_k from m_k per the rho branch.

    rho = 0 gives r_k = m_k^k, rho = inf gives r_k = m_k^(1/k), otherwise m_k^(1/rho).
    """
    E = [float(t) % TWO_PI for t in E]
    if not E:
        raise ValueError("E must be non-empty")
    if K < 1:
        raise ValueError("K must be at least 1")
    if rho < 0 or math.isnan(rho):
        raise ValueError("rho must be 0, positive, or inf")
    logs = log_m_sequence(K)
    exact = build_m_sequence(min(K, EXACT_M_CAP))
    m = tuple(exact[k] if k < len(exact) else None for k in range(K))
    log_r = tuple(_log_r(float(logs[k]), rho, k + 1) for k in range(K))
    thetas = tuple(E[k % len(E)] for k in range(K))
    r_exact = tuple(_r_exact(m[k], rho, k + 1) if log_r[k] <= LOG_R_REPRESENTABLE else None for k in range(K))
    return PoleConfiguration(thetas, log_r, tuple(float(v) for v in logs), m, float(rho), "canonical", r_exact)


def _r_exact(m: int | None, rho: float, k: int) -> float | None:
    """r_k from the integer m_k (exact for integer powers such as rho = 1)."""
    if m is None:
        return None
    if rho == 0:
        return float(m ** k)
    if math.isinf(rho):
        return float(m) ** (1.0 / k)
    return float(m) ** (1.0 / rho)


def mild_pole_configuration(E: Sequence[float], rho: float, K: int = 30) -> PoleConfiguration:
    """Synthetic many-pole configuration with counting function n(r_k) = r_k^rho.

    m_k = k and r_k = (m_1 + ... + m_k)^(1/rho).  Not one of the canonical
    configurations; used to exercise the order estimator.
    """
    if not rho > 0 or math.isinf(rho):
        raise ValueError("mild configuration needs a finite rho > 0")
    E = [float(t) % TWO_PI for t in E]
    m = tuple(range(1, K + 1))
    cum = np.cumsum(m)
    log_r = tuple(float(math.log(c) / rho) for c in cum)
    thetas = tuple(E[k % len(E)] for k in range(K))
    return PoleConfiguration(thetas, log_r, tuple(math.log(v) for v in m), m, float(rho), "mild")


def gap_start_index(config: PoleConfiguration, gap: float = 100.0) -> int | None:
    """Smallest k0 (1-based) with r_{k+1} - r_k >= gap for every listed k >= k0."""
    lr = np.asarray(config.log_r, dtype=float)
    ok = []
    for k in range(len(lr) - 1):
        a, b = lr[k], lr[k + 1]
        if b <= a:
            ok.append(False)
        elif b > 700:
            # r_{k+1} - r_k = r_{k+1} (1 - e^{a-b}) with r_{k+1} astronomically large
            ok.append(True)
        else:
            ok.append(math.exp(b) - math.exp(a) >= gap)
    if ok and not ok[-1]:
        return None
    k0 = len(ok)
    while k0 > 0 and ok[k0 - 1]:
        k0 -= 1
    return k0 + 1


# ---------------------------------------------------------------------------
# coefficient plan


@dataclass(frozen=True)
class Lemma4Constants:
    r0: float
    log_lam0: float
    r_prime: float


def solve_lemma4_constants(c_bound: float = 1.0) -> Lemma4Constants:
    """R0 with C R0^-2 < 1/3 (1% margin), lambda0 and R' with 2R' < R0.

    lambda0 = (R0/2) / ((exp(e^R0 + R0) + 1/3) * 1.01), so that
    R' = lambda0 (exp(e^R0 + R0) + 1/3) = R0 / 2.02.
    """
    if not c_bound > 0:
        raise ValueError("c_bound must be positive")
    r0 = max(math.sqrt(3.0 * c_bound) * 1.01, 1.0)
    big = math.exp(r0) + r0
    log_bracket = float(np.logaddexp(big, math.log(1.0 / 3.0)))
    log_lam0 = math.log(r0 / 2.0) - log_bracket - math.log(1.01)
    r_prime = math.exp(log_lam0 + log_bracket)
    return Lemma4Constants(r0, log_lam0, r_prime)


@dataclass(frozen=True)
class CoefficientPlan:
    directions: tuple
    coeff_logs: tuple
    c_bound: float
    r0: float
    log_lam0: float
    r_prime: float
    lam_log: float

    def to_series(self, n_terms: int | None = None):
        from .zoo import SeriesS

        n = len(self.directions) if n_terms is None else n_terms
        return SeriesS(self.directions[:n], self.coeff_logs[:n], self.lam_log, self.c_bound)


def overlap_extent(theta_new: float, previous: Sequence[float]) -> float | None:
    """Largest Re w over the overlap of strip theta_new with earlier strips, in the
    rotated coordinate w = e^{-i theta_new} z; None if the overlap is empty."""
    xmax = None
    for th in previous:
        phi = (theta_new - th) % TWO_PI
        if min(phi, TWO_PI - phi) < 1e-12:
            raise UnboundedOverlapError("strip directions coincide mod 2pi")
        s = math.sin(phi)
        c = math.cos(phi)
        if abs(s) < 1e-15:
            continue  # opposite strips are disjoint
        x = math.pi * (1.0 + abs(c)) / abs(s)
        xmax = x if xmax is None else max(xmax, x)
    return xmax


def overlap_mask(theta_new: float, previous: Sequence[float], w: np.ndarray) -> np.ndarray:
    """Points w (rotated coordinates of strip theta_new) lying in some earlier strip."""
    mask = np.zeros(w.shape, dtype=bool)
    for th in previous:
        u = np.exp(1j * (theta_new - th)) * w
        mask |= (u.real > 0) & (np.abs(u.imag) <= math.pi)
    return mask


def _sup_log_on_overlap(theta_new, previous, lam_log, c_bound, n_grid, refine=True):
    """Estimate max log|lambda E0(w)| over the overlap; -inf when the overlap is empty."""
    xmax = overlap_extent(theta_new, previous)
    if xmax is None:
        return -math.inf
    xs = np.linspace(0.0, xmax, n_grid)
    ys = np.linspace(-math.pi, math.pi, n_grid)
    w = xs[None, :] + 1j * ys[:, None]
    mask = overlap_mask(theta_new, previous, w)
    if not mask.any():
        return -math.inf
    lm, _ = _e0_log(c_bound, w)
    lm = np.where(mask, lm + lam_log, -np.inf)
    best = float(lm.max())
    if refine:
        i, j = np.unravel_index(int(np.argmax(lm)), lm.shape)
        dx = xs[1] - xs[0]
        dy = ys[1] - ys[0]
        xf = np.clip(np.linspace(xs[j] - 2 * dx, xs[j] + 2 * dx, 81), 0.0, xmax)
        yf = np.clip(np.linspace(ys[i] - 2 * dy, ys[i] + 2 * dy, 81), -math.pi, math.pi)
        wf = xf[None, :] + 1j * yf[:, None]
        mf = overlap_mask(theta_new, previous, wf)
        if mf.any():
            lf, _ = _e0_log(c_bound, wf)
            best = max(best, float(np.where(mf, lf + lam_log, -np.inf).max()))
    return best


def choose_coefficients(directions: Sequence[float], c_bound: float = 1.0, lam_log: float | None = None,
                        n_grid: int = 200, safety: float = 2.0) -> CoefficientPlan:
    """a_1 = 1 and a_{k+1} = min(2^-k, 2^-k / (safety M_{k+1})).

    M_{k+1} is the sampled supremum of |lambda E0| on the overlap of strip k+1
    with the earlier strips, refined around the grid maximiser.  ``safety``
    covers the gap between the sampled and the true supremum.
    """
    dirs = tuple(float(t) % TWO_PI for t in directions)
    if not dirs:
        raise ValueError("need at least one direction")
    consts = solve_lemma4_constants(c_bound)
    lam = consts.log_lam0 if lam_log is None else float(lam_log)
    logs = [0.0]
    for k in range(1, len(dirs)):
        sup = _sup_log_on_overlap(dirs[k], dirs[:k], lam, c_bound, n_grid)
        cap = -k * LN2
        if sup == -math.inf:
            logs.append(cap)
        else:
            logs.append(cap - max(0.0, sup + math.log(safety)))
    return CoefficientPlan(dirs, tuple(logs), float(c_bound), consts.r0, consts.log_lam0, consts.r_prime, lam)


# ---------------------------------------------------------------------------
# interval decomposition


@dataclass(frozen=True)
class Piece:
    kind: str  # "full" or "partial"
    arc: Arc
    theta_offset: float = 0.0


@dataclass(frozen=True)
class IntervalDecomposition:
    J: Arc
    rho: float
    pieces: tuple


def partition_interval(J: Arc, rho: float, tol: float = 1e-9) -> IntervalDecomposition:
    """Split J into pieces of length pi/rho; a remainder is merged with the last piece."""
    if not rho > 0.5:
        raise ValueError("rho must exceed 1/2")
    l = J.measure
    step = math.pi / rho
    if l < step - 1e-12:
        raise ValueError(f"arc measure {l:.6g} is below pi/rho = {step:.6g}")
    q = l / step
    n = round(q)
    pieces = []
    if abs(q - n) <= tol:
        for k in range(n):
            a = J.lo + k * step
            b = J.lo + (k + 1) * step if k + 1 < n else J.lo + l
            pieces.append(Piece("full", Arc(a, b)))
    else:
        L = int(math.floor(q))
        for k in range(L - 1):
            pieces.append(Piece("full", Arc(J.lo + k * step, J.lo + (k + 1) * step)))
        start = J.lo + (L - 1) * step
        l_tilde = l - (L - 1) * step
        pieces.append(Piece("partial", Arc(start, J.lo + l), l_tilde - step))
    return IntervalDecomposition(J, float(rho), tuple(pieces))


def _u1(x, rho):
    x = wrap_arg(np.asarray(x, dtype=float))
    h = math.pi / (2.0 * rho)
    return np.where(np.abs(x) < h, np.cos(rho * x), 0.0)


def eval_growth_indicator(beta, rho: float, theta0: float = 0.0):
    """max(u1(beta), u2(beta)) with u1 = chi_(-pi/2rho, pi/2rho)(x) cos(rho x), u2(x) = u1(x - theta0)."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    b = np.asarray(beta, dtype=float)
    out = np.maximum(_u1(b, rho), _u1(b - theta0, rho))
    return float(out) if out.ndim == 0 else out


def count_growth_ties(rho: float, theta0: float, n: int = 100_000) -> int:
    """Sign changes of u1 - u2 on the support of either, over one period."""
    x = np.linspace(-math.pi, math.pi, n, endpoint=False)
    u1 = _u1(x, rho)
    u2 = _u1(x - theta0, rho)
    sup = (u1 != 0) | (u2 != 0)
    d = np.sign(u1 - u2)[sup]
    d = d[d != 0]
    return int(np.count_nonzero(d[1:] != d[:-1]))
