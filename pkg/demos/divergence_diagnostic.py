"""Divergence of spherical means for a critically singular density.

The density |ubar v|^{-(2n-1)} |log |ubar v||^{-alpha} lies in L^{p2} for
alpha > 1/p2, yet the truncated spherical mean at a fixed probe grows
without bound as the truncation 2^{-j} shrinks, like j^{1-alpha}.

Run with: python3 demos/divergence_diagnostic.py
"""

from heislab import stein_growth_exponent, stein_probe_curve


def main():
    alpha = 0.9
    curve = stein_probe_curve(alpha, 30, j_lo=10)
    print(f"alpha = {alpha}: truncated mean at the probe x = (3/2, 0, 0)")
    for j, value in curve[::4]:
        print(f"  cutoff 2^-{int(j):2d}   mean = {value:.6f}")
    expo = stein_growth_exponent(curve)
    print(f"fitted growth exponent in log(1/cutoff): {expo:.3f} "
          f"(expected about {1 - alpha:.1f})")
    print("the mean increases at every step, so the maximal function of "
          "the untruncated density is infinite at the probe")


if __name__ == "__main__":
    main()
