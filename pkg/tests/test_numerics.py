import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from juliadir.numerics import (
    TWO_PI,
    Arc,
    DirectionSet,
    LogComplex,
    Tower,
    arc_union_measure,
    arcs_from_bins,
    bin_centers,
    direction_set_distance,
    hausdorff_distance,
    log_gamma,
    log_sum,
    wrap_arg,
)

finite = st.floats(-50, 50, allow_nan=False)
nonzero = st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e6, allow_nan=False, allow_infinity=False)
angles = st.floats(0, TWO_PI, allow_nan=False, exclude_max=True)


def close(a: complex, b: complex, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@given(nonzero, nonzero)
def test_logcomplex_arithmetic_matches_complex(a, b):
    A, B = LogComplex.from_complex(a), LogComplex.from_complex(b)
    assert close((A * B).to_complex(), a * b)
    assert close((A / B).to_complex(), a / b)
    s = (A + B).to_complex()
    assert abs(s - (a + b)) <= 1e-12 * (abs(a) + abs(b))


def test_logcomplex_beyond_double_range():
    big = LogComplex(5000.0, 0.3)
    prod = big * big
    assert prod.log_mag == 10000.0 and prod.arg == pytest.approx(0.6)
    with pytest.raises(OverflowError):
        big.to_complex()
    # cancellation to exact zero
    assert (big - big).is_zero
    assert LogComplex.from_complex(0).is_zero


def test_log_sum_peak_rescaling():
    lm, ar = log_sum(np.array([1000.0, 1000.0 + math.log(3.0)]), np.array([0.0, 0.0]))
    assert lm == pytest.approx(1000.0 + math.log(4.0), rel=1e-15)
    assert ar == 0.0
    lm, _ = log_sum(np.array([0.0, 0.0]), np.array([0.0, math.pi]))
    assert lm == -math.inf or lm < -30


@given(st.floats(0.01, 170))
def test_log_gamma_matches_mpmath(x):
    assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-13)


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_gamma(0.0)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_wrap_arg_range(a):
    w = wrap_arg(a)
    assert -math.pi < w <= math.pi
    assert cmath.isclose(cmath.exp(1j * w), cmath.exp(1j * a), abs_tol=1e-9)


def test_tower_round_trip_and_order():
    t = Tower.from_float(800.0)
    assert t.level == 1 and t.top == pytest.approx(math.log(800.0))
    assert t.to_float() == pytest.approx(800.0)
    e = t.exp()  # e^800, not a double
    assert e.level == 2 and e > t
    assert e.log() == t
    assert Tower.from_float(3.0) < Tower.from_float(4.0) < t < e


def test_arc_normalisation():
    assert Arc(-0.5, 0.5).wraps and Arc(-0.5, 0.5).measure == pytest.approx(1.0)
    assert Arc(0, TWO_PI).measure == TWO_PI
    assert Arc(1.0, 1.0).measure == 0.0


def arc_strategy():
    return st.tuples(angles, st.floats(0, 3.0)).map(lambda p: Arc(p[0], p[0] + p[1]))


@settings(max_examples=200)
@given(st.lists(arc_strategy(), max_size=4), st.lists(arc_strategy(), max_size=4))
def test_direction_set_measure_identities(a, b):
    A, B = DirectionSet.from_arcs(a), DirectionSet.from_arcs(b)
    union = A.union(B).measure
    inter = A.intersection(B).measure
    assert union + inter == pytest.approx(A.measure + B.measure, abs=1e-9)
    assert A.complement().measure == pytest.approx(TWO_PI - A.measure, abs=1e-9)
    assert direction_set_distance(A, B) == pytest.approx(union - inter, abs=1e-9)
    assert direction_set_distance(A, A) == 0.0


def test_direction_set_wraparound_and_subset():
    d = DirectionSet.from_arcs([Arc(3 * math.pi / 2, math.pi / 2)])
    assert d.contains(0.0) and d.contains(6.2) and not d.contains(math.pi)
    assert len(d.arcs) == 1 and d.arcs[0].wraps
    assert d.measure == pytest.approx(math.pi)
    small = DirectionSet.from_arcs([Arc(-0.1, 0.1)])
    assert small.is_subset(d)
    assert not d.is_subset(small)
    assert d.dilate(0.1).measure == pytest.approx(math.pi + 0.2)


def test_arcs_from_bins_bridges_single_gaps_and_wraps():
    B = 36
    flags = np.zeros(B, dtype=bool)
    flags[[0, 1, 3, 34, 35]] = True
    ds = arcs_from_bins(flags, gap_tolerance=1)
    w = TWO_PI / B
    assert len(ds.arcs) == 1
    assert ds.measure == pytest.approx(6 * w)
    assert arcs_from_bins(flags, gap_tolerance=0).measure == pytest.approx(5 * w)
    assert arcs_from_bins(np.ones(B, dtype=bool)).measure == TWO_PI


def test_bin_centers():
    c = bin_centers(4)
    assert np.allclose(c, [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4])


def test_union_measure_and_hausdorff():
    arcs = [Arc(0, 1), Arc(0.5, 1.5), Arc(3, 3.5)]
    assert arc_union_measure(arcs) == pytest.approx(2.0)
    a = DirectionSet.points([0.0])
    b = DirectionSet.points([0.3])
    assert hausdorff_distance(a, b) == pytest.approx(0.3)
    assert hausdorff_distance(DirectionSet.points([0.1]), DirectionSet.points([TWO_PI - 0.1])) == pytest.approx(0.2)
