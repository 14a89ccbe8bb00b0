"""Finite-N hole probability: exact value against the large-r asymptotic formula.

The log gap should shrink roughly like r^(-2/n); the last column is the gap
ratio between consecutive radii.

    python3 scripts/finite_hole_asymptotics.py --n 2 --N 2 --radii 10 20 40 80 160
"""
import argparse

from ginibre.core import EnsembleParams
from ginibre.hole import hole_asympt_log, hole_exact_log


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--radii", type=float, nargs="+", default=[10.0, 20.0, 40.0, 80.0, 160.0])
    args = p.parse_args(argv)

    params = EnsembleParams(args.n, args.N)
    print(f"{'r':>8} {'exact':>16} {'asympt':>16} {'gap':>12} {'ratio':>8}")
    prev = None
    for r in args.radii:
        exact = hole_exact_log(params, r).log_value
        approx = hole_asympt_log(params, r)
        gap = abs(exact - approx)
        ratio = "" if prev is None else f"{gap / prev:.3f}"
        print(f"{r:8.1f} {exact:16.8f} {approx:16.8f} {gap:12.4e} {ratio:>8}")
        prev = gap


if __name__ == "__main__":
    main()
