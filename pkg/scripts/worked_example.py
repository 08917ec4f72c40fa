"""The 3x3 binary worked example: dependency probabilities, the full-rank
polynomial and the brute-force weight census."""

from fractions import Fraction

from srlnc.analysis import full_rank_prob, p_in
from srlnc.field import gf
from srlnc.oracle import format_census, oracle_full_rank_poly


def main():
    spec = gf(2)
    for i in range(3):
        print(f"p({i},3) = {p_in(i, 3, spec)}")
    p = full_rank_prob(3, 3, spec)
    print(f"P(3x3)  = {p}")
    poly, census = oracle_full_rank_poly(3, 3, spec)
    print(format_census(census))
    print("oracle agrees:", p.expr.den.degree == 0 and p.expr.num == poly)
    for x in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        v = p.evaluate(x)
        print(f"  p0={x}: {v} ({float(v):.6f})")


if __name__ == "__main__":
    main()
