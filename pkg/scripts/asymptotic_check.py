"""Finite-n deviation for the three reference spectra against their limits.

Prints the theta-form deviation at growing n next to the closed form, and
for the exponential spectrum the radius at which the deviation vanishes.

    python3 scripts/asymptotic_check.py --c 1 --rb 1 --sigma1 1
"""

import argparse
import math

import numpy as np

from momentconf.deviation import closed_form, finite_n_nonidentifiable_radius_sq, theta_deviation


def log_spectrum(kind, n, sigma1):
    i = np.arange(1, n + 1, dtype=float)
    if kind == "constant":
        return np.full(n, math.log(sigma1))
    if kind == "polynomial":
        return math.log(sigma1) - np.log(i)
    return math.log(sigma1) - (i - 1)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--rb", type=float, default=1.0)
    p.add_argument("--sigma1", type=float, default=1.0)
    args = p.parse_args()
    for kind in ("constant", "polynomial", "exponential"):
        limit = closed_form(kind, args.c, args.rb, args.sigma1)
        print(f"{kind}: limit {limit:.6f}")
        for n in (10, 100, 1000, 10000, 100000):
            d = theta_deviation(log_spectrum(kind, n, args.sigma1), args.c, args.rb, log_scale=True)
            print(f"  n={n:<7} {d:.6f}")
    for n in (10, 100, 2000):
        rb2 = finite_n_nonidentifiable_radius_sq(log_spectrum("exponential", n, args.sigma1), log_scale=True)
        print(f"exponential radius^2 at n={n}: {rb2:.6f} (limit {math.e * args.sigma1 / 2:.6f})")


if __name__ == "__main__":
    main()
