"""Hole probability decay for the infinite ensemble.

Prints the log hole probability, its bracketing bounds and the ratio to the
leading scale r^(4/n), which should drift toward -n/4 as r grows.

    python3 scripts/hole_decay.py --n 1 2 3 --radii 2 4 8 16 32
"""
import argparse
import csv
import sys
import warnings

from ginibre.hole import hole_bounds_infinite, hole_infinite_log


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--radii", type=float, nargs="+", default=[2.0, 4.0, 8.0, 16.0])
    p.add_argument("--tol", type=float, default=1e-12)
    args = p.parse_args(argv)

    out = csv.writer(sys.stdout)
    out.writerow(["n", "r", "log_hole", "lower", "upper", "normalized", "limit", "rank"])
    for n in args.n:
        for r in args.radii:
            value, K = hole_infinite_log(n, r, args.tol)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                lower, upper = hole_bounds_infinite(n, r, args.tol)
            scale = r ** (4.0 / n)
            out.writerow([n, r, f"{value.log_value:.10g}", f"{lower:.10g}", f"{upper:.10g}",
                          f"{value.log_value / scale:.6f}", -n / 4, K])


if __name__ == "__main__":
    main()
