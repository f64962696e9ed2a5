"""Export min S(a) over coprime a for every q in a range, with the ratios to
log q and log q * sqrt(log log q)."""

import argparse

import numpy as np

from zaremba_lab.zaremba import min_sum_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-min", type=int, default=3)
    ap.add_argument("--q-max", type=int, default=20000)
    ap.add_argument("--out", default="larcher_ratios.csv")
    args = ap.parse_args()
    table = min_sum_table(max(3, args.q_min), args.q_max)
    q, a, S = (table[:, i].astype(float) for i in range(3))
    per_log = S / np.log(q)
    per_loglog = per_log / np.sqrt(np.log(np.log(q)))
    np.savetxt(
        args.out, np.column_stack([q, a, S, per_log, per_loglog]), delimiter=",",
        fmt=["%d", "%d", "%d", "%.6f", "%.6f"], header="q,a,minS,minS_per_logq,minS_per_logq_sqrtloglogq", comments="",
    )
    # block maxima show whether the per-log ratio drifts
    edges = np.unique(np.geomspace(q[0], q[-1] + 1, 8).astype(int))
    for lo, hi in zip(edges, edges[1:]):
        sel = (q >= lo) & (q < hi)
        if sel.any():
            print(f"q in [{lo:>6}, {hi:>6}): max minS/log q = {per_log[sel].max():.3f}, "
                  f"max minS/(log q sqrt(loglog q)) = {per_loglog[sel].max():.3f}")
    print(f"wrote {len(q)} rows to {args.out}")


if __name__ == "__main__":
    main()
