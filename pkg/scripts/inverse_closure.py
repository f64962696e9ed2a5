"""Measure how far the admissible numerator sets are from being closed under
a -> a^{-1} mod q, and which relaxations restore closure."""

import argparse

from zaremba_lab.cf_core import expand
from zaremba_lab.zaremba import find_numerators


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-max", type=int, default=2000)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 3, 5])
    args = ap.parse_args()
    total = outside = outside_M1 = outside_alt = 0
    first = None
    for M in args.M:
        for q in range(2, args.q_max + 1):
            nums = set(find_numerators(q, M).numerators)
            wider = set(find_numerators(q, M + 1).numerators)
            for a in nums:
                total += 1
                b = pow(a, -1, q)
                if b in nums:
                    continue
                outside += 1
                first = first or (q, M, a, b, expand(b, q).digits)
                outside_M1 += b not in wider
                ds = list(expand(b, q).digits)
                # the expansion ending in (c_s - 1, 1) has these digits
                outside_alt += max(ds[:-1] + [ds[-1] - 1, 1]) > M
    print(f"{total} admissible numerators, {outside} inverses outside the set")
    print(f"inverses outside the set for bound M+1: {outside_M1}")
    print(f"inverses whose (..., c_s - 1, 1) expansion exceeds M: {outside_alt}")
    print(f"first counterexample (q, M, a, a^-1, digits of a^-1/q): {first}")


if __name__ == "__main__":
    main()
