import math

import numpy as np
import pytest

from juliadir.construction import build_pole_configuration, mild_pole_configuration
from juliadir.directions import (
    DegenerateFitError,
    estimate_order_entire,
    estimate_order_from_poles,
    estimate_TD,
    geometric_radii,
    lambda_threshold_set,
    log_N,
    lower_bound_measure,
    read_direction_set_csv,
    sample_growth_profile,
    threshold_set,
    write_direction_set_csv,
)
from juliadir.numerics import TWO_PI, Arc, DirectionSet, direction_set_distance
from juliadir.zoo import E0Model, Exponential, MittagLeffler, PoleSeries

B = 3600
W = TWO_PI / B
RIGHT_HALF = DirectionSet.from_arcs([Arc(3 * math.pi / 2, math.pi / 2)])


def test_td_exponential():
    prof = sample_growth_profile(Exponential(1.0), geometric_radii(1e6, 2, 3), B)
    td = estimate_TD(prof)
    assert direction_set_distance(td, RIGHT_HALF) <= 2 * W


def test_td_mittag_leffler_sector():
    prof = sample_growth_profile(MittagLeffler(1.5), [1e4, 2e4, 4e4], B)
    td = estimate_TD(prof)
    target = DirectionSet.from_arcs([Arc(-math.pi / 3, math.pi / 3)])
    assert direction_set_distance(td, target) <= 4 * W


def test_profile_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        sample_growth_profile(Exponential(1.0), [10, 5, 20], B)
    with pytest.raises(ValueError):
        sample_growth_profile(Exponential(1.0), [1.5], B)
    prof = sample_growth_profile(Exponential(1.0), [10, 20, 40], 16)
    prof.to_csv(tmp_path / "p.csv")
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "r,theta,indicator" and len(rows) == 1 + 16 * 3
    with pytest.raises(ValueError):
        estimate_TD(sample_growth_profile(Exponential(1.0), [10, 20], 16))


def test_profile_flags_pole_adjacent_samples():
    cfg = build_pole_configuration([0.0], 1.0, 3)
    spec = PoleSeries(cfg)
    prof = sample_growth_profile(spec, [2.0, 3.0, 4.0], 8)
    assert prof.flagged.shape == (8, 3)
    assert np.all(np.isfinite(prof.indicator) | prof.flagged)


@pytest.mark.parametrize("alpha", [0.75, 1.0, 2.0])
def test_order_mittag_leffler(alpha):
    est = estimate_order_entire(MittagLeffler(alpha), [40 * 2 ** k for k in range(8)])
    assert est.rho == pytest.approx(alpha, abs=0.1)
    assert est.method == "max_modulus"


def test_order_exponential_and_errors():
    est = estimate_order_entire(Exponential(1.0), [10 * 2 ** k for k in range(8)])
    assert est.rho == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        estimate_order_entire(Exponential(1.0), [10, 20])
    with pytest.raises(DegenerateFitError):
        estimate_order_entire(Exponential(1e-300), [10, 100])


def test_log_N_against_direct_sum():
    cfg = mild_pole_configuration([0.0], 1.0, 12)
    r = 50.0
    direct = sum(m * math.log(r / rk) for m, rk in zip(cfg.m, cfg.radii()) if rk <= r)
    assert log_N(cfg, r) == pytest.approx(math.log(direct), rel=1e-12)
    assert log_N(cfg, 0.5) == -math.inf


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_order_from_mild_poles(rho):
    cfg = mild_pole_configuration([0.0, math.pi], rho, 30)
    r = cfg.radii()
    est = estimate_order_from_poles(cfg, np.geomspace(r[4], r[-1], 12))
    assert abs(est.rho - rho) <= 0.1 * rho


def test_lower_bound_measure():
    assert lower_bound_measure(1, 1) == pytest.approx(math.pi, abs=1e-12)
    assert lower_bound_measure(0.4, 1) == pytest.approx(TWO_PI, abs=1e-12)
    assert lower_bound_measure(2, 0.5) == pytest.approx(math.pi / 3, abs=1e-12)
    with pytest.raises(ValueError):
        lower_bound_measure(0, 1)
    with pytest.raises(ValueError):
        lower_bound_measure(1, 1.5)


def test_lambda_threshold_set_exponential():
    for r in (100.0, 1000.0, 1e4):
        lam = math.sqrt(r / math.pi * math.log(r))
        ds = lambda_threshold_set(Exponential(1.0), r, r / math.pi)
        assert ds.measure == pytest.approx(2 * math.acos(lam / r), abs=1e-6)


def test_threshold_set_refinement_and_wrap():
    ds = threshold_set(lambda t: np.cos(t) - 0.5, 360)
    assert len(ds.arcs) == 1 and ds.arcs[0].wraps
    assert ds.measure == pytest.approx(2 * math.pi / 3, abs=1e-12)
    coarse = threshold_set(lambda t: np.cos(t) - 0.5, 360, refine=False)
    assert abs(coarse.measure - 2 * math.pi / 3) <= 2 * TWO_PI / 360
    assert threshold_set(lambda t: np.ones_like(t), 16).measure == TWO_PI
    assert threshold_set(lambda t: -np.ones_like(t), 16).is_empty()


def test_direction_set_csv_round_trip(tmp_path):
    ds = DirectionSet.from_arcs([Arc(5.0, 1.0), Arc(2.0, 2.5)])
    write_direction_set_csv(ds, tmp_path / "d.csv")
    back = read_direction_set_csv(tmp_path / "d.csv")
    assert direction_set_distance(ds, back) == 0.0


def test_td_e0_model_single_direction():
    prof = sample_growth_profile(E0Model(1.0), [20.0, 40.0, 80.0], B)
    td = estimate_TD(prof)
    assert td.contains(0.0, tol=2 * W)
    # the strip |Im z| <= pi subtends about 2 asin(pi/r) at radius r
    assert td.measure <= 2 * math.asin(math.pi / 20.0) + 2 * W
