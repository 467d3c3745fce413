"""A map whose Julia directions are a half-plane of directions plus one ray.

f(z) = z - (1 - e^{-z}) / (z (z^2 + 4 pi^2)) is close to the identity on the
right half-plane, with two parabolic-type petals in the quadrants
U_L = {Re z >= L, Im z >= L} and V_L (its mirror image).  Points on the
positive real axis are pushed away from the petals, which leaves a single
Julia direction at 0.  The left half-plane is dominated by e^{-z}.
"""

import math
import sys
from pathlib import Path

from juliadir import (
    QuadrantRegion,
    Theorem4,
    check_forward_invariance,
    estimate_L,
    render_fate_grid,
    track_real_orbit_log,
)

if __name__ == "__main__":
    f = Theorem4()
    for kind in ("U", "V"):
        rep = check_forward_invariance(f, QuadrantRegion(kind, 20), 10_000)
        print(f"{kind}_20 maps into itself: {rep.passed} ({rep.n_checked} samples, min slack {rep.min_slack:.3e})")

    orb = track_real_orbit_log(0.0, 100)
    print(f"\nreal orbit from 0 switches to log mode at step {orb.log_mode_start};"
          f" divergence indicator increasing for 10 steps: {orb.increasing_in_log_mode(10)}")

    L = estimate_L(f, [(20, 110), (110, 200)], 3600)
    print("\nJulia directions on annuli 20..200:")
    for a in L.arcs:
        print(f"  [{a.lo:.4f}, {a.hi:.4f}]  ({a.measure:.4f} rad)")
    print(f"contains 0: {L.contains(0.0)}; contains pi: {L.contains(math.pi)}")
    print("the arcs around pi/2 and 3pi/2 sit slightly inside; the edge moves out like 3 ln r / r")

    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("theorem4.ppm")
    grid = render_fate_grid(f, 0, 60, 60, 240, 240, 400)
    grid.to_ppm(out)
    print(f"\nfate picture of [-30, 30]^2 written to {out}: {grid.counts()}")
