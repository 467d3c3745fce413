"""Growth directions versus Julia directions for the exponential family.

For f(z) = lam * e^z the function grows super-polynomially exactly on the
closed right half-plane of directions.  Whether the Julia set reaches out
along every direction depends on lam: for lam = 1 it is the whole plane, for
lam = 0.3 there is an attracting fixed point whose basin owns the left side.
"""

import math

from juliadir import Exponential, estimate_L, estimate_TD, sample_growth_profile

B = 3600


def show(label, ds):
    arcs = ", ".join(f"[{a.lo:.4f}, {a.hi:.4f}]" for a in ds.arcs)
    print(f"{label:<12} measure={ds.measure:.4f}  arcs: {arcs}")


if __name__ == "__main__":
    print("transcendental directions from log|f| / log r at r = 1e6, 2e6, 4e6")
    td = estimate_TD(sample_growth_profile(Exponential(1.0), [1e6, 2e6, 4e6], B))
    show("TD(E_1)", td)
    print(f"expected arcs [3pi/2, 2pi) and [0, pi/2], total pi = {math.pi:.4f}\n")

    print("Julia directions from fate boundaries on annuli 1e5..4e5")
    for lam in (1.0, 0.3):
        show(f"L(E_{lam:g})", estimate_L(Exponential(lam), [(1e5, 2e5), (2e5, 4e5)], B))
    print("lam = 1: every direction; lam = 0.3: only the right half-plane")
