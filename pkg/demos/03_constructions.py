"""Building functions with prescribed direction sets.

An entire series S(z) = sum a_k E0(e^{-i theta_k} z) grows only along the
chosen directions theta_k, so its transcendental directions are exactly those
rays.  A meromorphic function with poles clustered on a few rays, at radii
fixed by the doubly exponential sequence m_1 = 2, m_{k+1} = 2^(m_1 + ... + m_k),
does the same for Julia directions.
"""

import math

from juliadir import (
    build_m_sequence,
    build_pole_configuration,
    choose_coefficients,
    estimate_TD,
    sample_growth_profile,
)
from juliadir.verification import check_coefficient_constraints, check_pole_invariants, format_reports

if __name__ == "__main__":
    m = build_m_sequence(4)
    print(f"m sequence: {m[:3]} and 2^{m[3].bit_length() - 1}")

    cfg = build_pole_configuration([0.0, math.pi], 1.0, 6)
    print(f"order-1 pole layout: n(64) = {cfg.counting(64)}, ln n / ln r = {math.log(70) / math.log(64):.4f}")
    print(format_reports(check_pole_invariants(cfg)))

    dirs = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
    plan = choose_coefficients(dirs)
    print(f"\ncoefficients for three directions: log a_k = {[round(a, 3) for a in plan.coeff_logs]}")
    print(format_reports(check_coefficient_constraints(plan, n_grid=500)))
    td = estimate_TD(sample_growth_profile(plan.to_series(), [250, 500, 1000], 3600))
    print("TD of the truncated series:", ", ".join(f"{a.midpoint():.4f}" for a in td.arcs))
