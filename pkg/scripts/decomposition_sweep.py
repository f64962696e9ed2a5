"""Run lengths of the interval decomposition of Z_M(t) at t = floor(q^theta),
against the window [floor(q/t^2), 8(M+1)q/t^2 + 1]."""

import argparse
import math

from zaremba_lab.cantor import decompose_ZM


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-min", type=int, default=16)
    ap.add_argument("--q-max", type=int, default=3000)
    ap.add_argument("--theta", type=float, default=0.4)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 3, 5])
    args = ap.parse_args()
    for M in args.M:
        runs = short = long_ = 0
        examples = []
        for q in range(args.q_min, args.q_max + 1):
            t = math.floor(q**args.theta)
            lo, hi = q // (t * t), 8 * (M + 1) * q / (t * t) + 1
            for s, n in decompose_ZM(q, M, t).intervals:
                runs += 1
                short += n < lo
                long_ += n > hi
                if n < lo and len(examples) < 3:
                    examples.append((q, t, s, n, lo))
        print(f"M={M}: {runs} runs, {short} below the lower end, {long_} above the upper end; e.g. {examples}")


if __name__ == "__main__":
    main()
