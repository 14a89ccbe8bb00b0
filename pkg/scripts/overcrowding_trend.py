"""Overcrowding bounds at growing m, normalized by (1/2) n m^2 ln m.

Both normalized bounds should approach 1 as m grows; for small m a Monte
Carlo estimate is printed alongside the bracket.

    python3 scripts/overcrowding_trend.py --n 1 --r 1 --m 2 3 10 100 1000
"""
import argparse
import math

from ginibre.overcrowd import MAX_MC_M, overcrowd_report


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--m", type=int, nargs="+", default=[2, 3, 10, 100, 1000])
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    print(f"{'m':>6} {'lower_log':>14} {'upper_log':>14} {'-up/scale':>10} {'-lo/scale':>10} {'mc':>10}")
    for m in args.m:
        samples = args.mc_samples if m <= MAX_MC_M else None
        rep = overcrowd_report(args.n, args.r, m, samples, args.seed)
        up, lo = rep.normalized
        mc = "" if rep.mc_estimate is None else f"{rep.mc_estimate:.4g}"
        fmt = lambda x: "" if math.isnan(x) else f"{x:.4f}"
        print(f"{m:6d} {rep.lower_log:14.5g} {rep.upper_log:14.5g} {fmt(up):>10} {fmt(lo):>10} {mc:>10}")


if __name__ == "__main__":
    main()
