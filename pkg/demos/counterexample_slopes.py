"""Scaling exponents of the quick counterexample families.

Run with: python3 demos/counterexample_slopes.py
(The slower H^2 ladders run through the CLI; see the README.)
"""

import math

from heislab import (ball_example, fit_exponent, moment_example,
                     predicted_exponent, run_ladder, scaling_example,
                     standard_heisenberg)


def main():
    s1 = standard_heisenberg(1)
    deltas = [2.0 ** -k for k in range(3, 8)]
    jobs = [
        ("ball", lambda d: ball_example(s1, d), 1.0, math.inf,
         predicted_exponent("ball", 1, 1, 1, math.inf)),
        ("scaling", lambda d: scaling_example(s1, d), 2.0, 2.0,
         predicted_exponent("scaling", 1, 1, 2, 2)),
        ("moment", lambda d: moment_example(d), 2.0, 2.0,
         predicted_exponent("moment", 1, 1, 2, 2)),
    ]
    for name, make, p, q, predicted in jobs:
        rows = run_ladder(make, deltas, p, q)
        fit = fit_exponent(rows)
        print(f"{name:8s} predicted exponent {str(predicted):>4s}   "
              f"fitted slope {fit.slope:+.3f}   r^2 = {fit.r_squared:.5f}")
        for delta, ratio in rows:
            print(f"    delta = {delta:.5f}   ratio = {ratio:.6e}")


if __name__ == "__main__":
    main()
