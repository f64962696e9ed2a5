"""Fit the growth exponent of |Q_M(t)| over dyadic t and compare with the
two-term asymptotic for the dimension."""

import argparse

from zaremba_lab.cantor import estimate_dimension


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 3, 4, 5, 6, 8, 10])
    ap.add_argument("--k-min", type=int, default=6)
    ap.add_argument("--k-max", type=int, default=10)
    ap.add_argument("--max-nodes", type=int, default=10**7)
    args = ap.parse_args()
    grid = [2.0**k for k in range(args.k_min, args.k_max + 1)]
    print(f"{'M':>3} {'w_fit':>9} {'w_asym':>9} {'diff':>8} {'|Q_M(t_max)|':>13}")
    for M in args.M:
        e = estimate_dimension(M, grid, max_nodes=args.max_nodes)
        print(f"{M:>3} {e.w_fit:9.5f} {e.w_hensley:9.5f} {e.w_fit - e.w_hensley:8.4f} {e.samples[-1][1]:>13}")


if __name__ == "__main__":
    main()
