"""Numerical toolkit for Julia limiting directions and transcendental
directions of entire and meromorphic functions."""

from .numerics import (
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
)
from .zoo import (
    E0Model,
    Exponential,
    MittagLeffler,
    PoleSeries,
    RotatedE0,
    SeriesS,
    Theorem4,
    Theorem4Component,
    eval_E0_model,
    eval_exponential,
    eval_g_components,
    eval_mittag_leffler,
    eval_pole_series,
    eval_S,
    eval_theorem4,
    evaluate,
    log_eval,
)
from .construction import (
    CoefficientPlan,
    PoleConfiguration,
    build_m_sequence,
    build_pole_configuration,
    choose_coefficients,
    gap_start_index,
    mild_pole_configuration,
    partition_interval,
    solve_lemma4_constants,
)
from .directions import (
    estimate_order_entire,
    estimate_order_from_poles,
    estimate_TD,
    lambda_threshold_set,
    lower_bound_measure,
    sample_growth_profile,
)
from .dynamics import (
    EscapeParams,
    Fate,
    QuadrantRegion,
    check_forward_invariance,
    classify_orbit,
    estimate_L,
    render_fate_grid,
    track_real_orbit_log,
)

__version__ = "0.1.0"
