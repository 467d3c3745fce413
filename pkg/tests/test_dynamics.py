import cmath
import math

import numba
import numpy as np
import pytest

from juliadir.construction import build_pole_configuration
from juliadir.dynamics import (
    BOUNDED,
    ESCAPED,
    EscapeParams,
    QuadrantRegion,
    check_forward_invariance,
    classify_orbit,
    classify_points,
    estimate_L,
    render_fate_grid,
    set_threads,
    track_real_orbit_log,
)
from juliadir.numerics import TWO_PI, Arc, DirectionSet, direction_set_distance
from juliadir.zoo import E0Model, Exponential, MittagLeffler, PoleSeries, Theorem4, eval_theorem4

B = 3600
W = TWO_PI / B


def brute_exp_fate(lam, z, max_iter):
    """Plain-python orbit with the same predicates as the kernel."""
    for n in range(1, max_iter + 1):
        zn = lam * cmath.exp(z)
        if zn.real > 50:
            return ESCAPED, n
        if abs(zn - z) <= 1e-12 * max(1.0, abs(zn)):
            return BOUNDED, n
        z = zn
    return BOUNDED, max_iter


def test_classify_examples():
    f = classify_orbit(Exponential(1.0), 10, 100)
    assert f.kind == "escaped" and f.at_iter <= 3
    f = classify_orbit(Exponential(0.3), 0, 500)
    assert f.kind == "bounded" and f.channel == "converged"
    f = classify_orbit(Theorem4(), 0, 500)
    assert f.kind == "escaped" and f.channel == "left"


def test_exponential_kernel_matches_brute_force():
    rng = np.random.default_rng(1)
    z = rng.uniform(-6, 6, 300) + 1j * rng.uniform(-6, 6, 300)
    kind, its, _ = classify_points(Exponential(0.3), z, 200)
    for k in range(z.size):
        bk, bn = brute_exp_fate(0.3, complex(z[k]), 200)
        assert (kind[k], its[k]) == (bk, bn)


def test_exponential_overflow_is_classified():
    # Re z far beyond exp's range: the image half-plane decides
    kind, _, _ = classify_points(Exponential(0.3), np.array([1e5 + 0j, 1e5 + 1j * math.pi]), 50)
    assert kind[0] == ESCAPED
    assert kind[1] == BOUNDED


def test_fixed_point_of_e03():
    z = 0.4894
    for _ in range(200):
        z = 0.3 * cmath.exp(z)
    assert z.real == pytest.approx(0.48940, abs=1e-4)


def test_render_mixed_fates_and_ppm(tmp_path):
    g = render_fate_grid(Exponential(0.3), 0, 8, 8, 64, 64, 500)
    c = g.counts()
    assert c.get("bounded:converged", 0) > 0 and c.get("escaped:generic", 0) > 0
    g.to_ppm(tmp_path / "a.ppm")
    data = (tmp_path / "a.ppm").read_bytes()
    assert data.startswith(b"P6\n64 64\n255\n") and len(data) == len(b"P6\n64 64\n255\n") + 64 * 64 * 3
    with pytest.raises(ValueError):
        render_fate_grid(Exponential(0.3), 0, 8, 8, 8, 64)


def test_render_inside_u20_stays_in_u():
    g = render_fate_grid(Theorem4(), 30 + 30j, 10, 10, 32, 32, 300)
    labels = set(g.counts())
    assert labels <= {"escaped:U", "bounded:unresolved"}


def test_pole_series_gap_region_bounded():
    cfg = build_pole_configuration([0.0, math.pi], 1.0, 4)
    spec = PoleSeries(cfg, 1.0)
    # a window on the imaginary axis, far from every pole
    g = render_fate_grid(spec, 20j, 4, 4, 16, 16, 200)
    assert set(g.counts()) == {"bounded:converged"}


def test_ld_exponential_dichotomy():
    ann = [(1e5, 2e5), (2e5, 4e5)]
    full = estimate_L(Exponential(1.0), ann, B)
    assert full.measure >= TWO_PI - 0.1
    half = estimate_L(Exponential(0.3), ann, B)
    target = DirectionSet.from_arcs([Arc(3 * math.pi / 2, math.pi / 2)])
    assert direction_set_distance(half, target) <= 2 * W + 1e-9


def test_ld_theorem4_symmetric_and_direction_zero():
    L = estimate_L(Theorem4(), [(20, 110), (110, 200)], B)
    assert L.contains(0.0)
    mirror = DirectionSet.from_arcs([Arc(TWO_PI - a.hi, TWO_PI - a.lo) for a in L.arcs])
    assert direction_set_distance(L, mirror) <= 2 * W
    assert L.intersection(DirectionSet.from_arcs([Arc(0.2, math.pi / 2 - 0.2)])).is_empty()


def test_ld_pole_cluster_shrinks():
    cfg = build_pole_configuration([0.0, math.pi], 1.0, 6)
    spec = PoleSeries(cfg, 1.0)
    prev = math.inf
    for lo in (1.0, 5.0, 30.0, 100.0, 1e3):
        L = estimate_L(spec, [(lo, math.inf)], B, mode="pole_cluster")
        assert L.contains(0.0) and L.contains(math.pi)
        assert L.measure <= prev + 1e-12
        prev = L.measure
    with pytest.raises(ValueError):
        estimate_L(spec, [(10, 100)], B, mode="boundary")
    with pytest.raises(ValueError):
        estimate_L(spec, [], B)


def test_forward_invariance():
    for kind in ("U", "V"):
        rep = check_forward_invariance(Theorem4(), QuadrantRegion(kind, 20), 10_000, 1e3)
        assert rep.passed and rep.min_slack >= 0 and rep.n_checked >= 10_000
    low = check_forward_invariance(Theorem4(), QuadrantRegion("U", 2), 2000, 1e3)
    assert not low.passed
    with pytest.raises(ValueError):
        QuadrantRegion("W", 3)


def test_conjugation_symmetry():
    z = np.array([3 + 4j, 25 - 30j, -2 + 0.5j])
    assert np.allclose(np.conj([eval_theorem4(v) for v in z]), [eval_theorem4(v) for v in np.conj(z)])


def test_real_orbit():
    orb = track_real_orbit_log(0.0, 100)
    assert orb.signs[1] == -1
    assert math.exp(orb.log_abs[1].top) == pytest.approx(1 / (4 * math.pi ** 2))
    assert orb.log_mode_start > 0
    assert orb.increasing_in_log_mode(10)
    nxt = eval_theorem4(-10.0)
    assert nxt.real == pytest.approx(-25.79, abs=0.01)


def test_thread_count_does_not_change_fates():
    pts = (np.linspace(-4, 4, 97)[None, :] + 1j * np.linspace(-4, 4, 89)[:, None])
    res = []
    for n in (1, numba.config.NUMBA_NUM_THREADS):
        set_threads(n)
        res.append(classify_points(Theorem4(), pts, 300))
    set_threads(None)
    for a, b in zip(*res):
        assert np.array_equal(a, b)


def test_generic_fallback_paths():
    # -5 -> |z|^-2 = 0.04 lands in the strip, then e^{e^z + z} explodes
    f = classify_orbit(E0Model(1.0), -5 + 0j, 100)
    assert f.kind == "escaped" and f.at_iter == 3
    f = classify_orbit(MittagLeffler(1.5), 30 + 0j, 50)
    assert f.kind == "escaped"


def test_escape_params_are_used():
    strict = EscapeParams(exp_re=1e3)
    f1 = classify_orbit(Exponential(1.0), 10, 100)
    f2 = classify_orbit(Exponential(1.0), 10, 100, strict)
    assert f2.at_iter >= f1.at_iter
