"""Rank distribution from the row-by-row chain versus brute force.

The chain treats the rank as a Markov state with step probabilities p(i, n).
That is exact for uniform coefficients (p0 = 1/q) but drifts for sparse ones,
because staying at rank i changes which subspaces are likely. This prints
both distributions and their largest gap.
"""

import argparse
from fractions import Fraction

from srlnc.analysis import rank_dist_nested
from srlnc.field import gf
from srlnc.oracle import oracle_rank_census


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--grid", default="1/4,1/2,3/4,9/10")
    args = ap.parse_args(argv)

    spec = gf(args.q)
    census = oracle_rank_census(args.m, args.n, spec)
    for tok in args.grid.split(","):
        p0 = Fraction(tok)
        chain = rank_dist_nested(args.m, args.n, spec, p0).values()
        brute = [c.evaluate(p0) for c in census]
        gap = max(abs(a - b) for a, b in zip(chain, brute))
        print(f"p0={p0}: max gap {float(gap):.3e}")
        for r, (a, b) in enumerate(zip(chain, brute)):
            print(f"  r={r}  chain {float(a):.6f}  brute {float(b):.6f}")


if __name__ == "__main__":
    main()
