"""Harvest critical denominators in the k = 2 window, write the corpus, and
report repulsion failures at a fixed exponent t = q^theta for comparison
(both on harvested instances and on every a with a, a^-1 in Z_M(t))."""

import argparse
import itertools
from collections import defaultdict

from sympy import primerange

from zaremba_lab.cantor import membership_mask
from zaremba_lab.criterion import repulsion_check
from zaremba_lab.independence import default_k2_harvest, harvest, test_independence, write_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="k2_corpus.jsonl")
    ap.add_argument("--theta", type=float, default=0.4)
    ap.add_argument("--q-max", type=int, default=5000)
    args = ap.parse_args()

    corpus = default_k2_harvest()
    write_corpus(corpus, args.out)
    groups = defaultdict(set)
    for ins in corpus:
        groups[(ins.q, ins.M, ins.t, ins.node)].add(ins.x)
    pairs = [(q, p) for (q, *_), xs in groups.items() for p in itertools.combinations(sorted(xs), 2)]
    dep = sum(not test_independence(p, (1, 1), q).independent for q, p in pairs)
    fails = sum(not repulsion_check(i.a, i.q, i.M, i.t) for i in corpus)
    print(f"k=2 window: {len(corpus)} instances, {fails} repulsion failures, {len(pairs)} pairs, {dep} dependent")
    print(f"corpus written to {args.out}")

    for M in (2, 3):
        inst = harvest(primerange(1000, args.q_max + 1), M, lambda q: q**args.theta)
        bad = [(i.q, i.a, i.x) for i in inst if not repulsion_check(i.a, i.q, M, i.t)]
        print(f"t = q^{args.theta}, M={M}: {len(inst)} harvested instances, {len(bad)} repulsion failures, e.g. {bad[:3]}")
        # every a with a and a^{-1} in Z_M(t), not only those carrying a critical denominator
        total, bad = 0, []
        for q in primerange(1000, args.q_max + 1):
            t = q**args.theta
            mask = membership_mask(q, M, t)
            for a in range(1, q):
                if mask[a] and mask[pow(a, -1, q)]:
                    total += 1
                    r = repulsion_check(a, q, M, t)
                    if not r:
                        bad.append((q, a, r.witness))
        print(f"t = q^{args.theta}, M={M}: {total} a with a, a^-1 in Z_M(t), {len(bad)} repulsion failures, e.g. {bad[:3]}")


if __name__ == "__main__":
    main()
