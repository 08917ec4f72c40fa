"""Acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the terminal
summary prints one PASS/FAIL line per criterion.
"""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from srlnc import analysis as an
from srlnc.codec import SimConfig, run_trials
from srlnc.field import gf
from srlnc.linalg import (
    FqMatrix,
    column_basis_decompose,
    enumerate_full_rank,
    membership_criterion,
    vec_mat,
)
from srlnc.oracle import batch_rank, oracle_full_rank_poly
from srlnc.poly import ONE

WORKED_3X3 = [0, 0, 18, -90, 234, -414, 492, -360, 144, -24]


def grid():
    """(q, n, m) with q in {2,3}, n <= 3, n <= m <= n+2, q^(mn) <= 2^20."""
    return [(q, n, m) for q in (2, 3) for n in range(1, 4) for m in range(n, n + 3)
            if q ** (m * n) <= 1 << 20]


def grid_p_in():
    """Every (q, i, m) whose p(i, m) enters a product over the grid."""
    return sorted({(q, i, m) for q, n, m in grid() for i in range(n)})


@pytest.fixture
def cold():
    an.clear_caches()
    yield
    an.clear_caches()


@pytest.mark.criterion(1, "3x3 binary polynomial, coefficient for coefficient, < 1 s")
def test_c1_worked_3x3_exact(cold):
    t = time.perf_counter()
    p = an.full_rank_prob(3, 3, gf(2))
    secs = time.perf_counter() - t
    assert p.expr.den == ONE
    assert list(p.expr.num.coeffs) == [Fraction(c) for c in WORKED_3X3]
    assert secs < 1.0, f"took {secs:.3f}s"


@pytest.mark.criterion(2, "3x3 binary weight census 6,36,72,36,18 at weights 3..7, < 1 s")
def test_c2_worked_3x3_census():
    t = time.perf_counter()
    _, census = oracle_full_rank_poly(3, 3, gf(2))
    secs = time.perf_counter() - t
    assert census == [0, 0, 0, 6, 36, 72, 36, 18, 0, 0]
    assert secs < 1.0, f"took {secs:.3f}s"


@pytest.mark.criterion(3, "product form equals brute-force oracle on the small grid, < 5 min")
def test_c3_oracle_equivalence(cold):
    t = time.perf_counter()
    cases = grid()
    assert len(cases) == 17
    for q, n, m in cases:
        spec = gf(q)
        expr = an.full_rank_prob(m, n, spec).expr
        opoly, _ = oracle_full_rank_poly(m, n, spec)
        assert expr.den == ONE and expr.num == opoly, (q, n, m)
    secs = time.perf_counter() - t
    assert secs < 300, f"took {secs:.1f}s"


@pytest.mark.criterion(4, "uniform-coefficient collapse at p0 = 1/q")
def test_c4_rlnc_collapse():
    for q, i, m in grid_p_in():
        u = Fraction(1, q)
        assert an.p_in(i, m, gf(q)).evaluate(u) == u ** (m - i), (q, i, m)
    for q, n, m in grid():
        u = Fraction(1, q)
        want = math.prod((1 - u ** (m - i) for i in range(n)), start=Fraction(1))
        assert an.full_rank_prob(m, n, gf(q)).evaluate(u) == want, (q, n, m)


@pytest.mark.criterion(5, "dependency probability below max(p0,(1-p0)/(q-1))^(n-i) on k/20")
def test_c5_bkw_dominance():
    points = [Fraction(k, 20) for k in range(1, 20)]
    for q, i, m in grid_p_in():
        expr = an.p_in(i, m, gf(q))
        for p in points:
            bound = max(p, (1 - p) / (q - 1)) ** (m - i)
            assert expr.evaluate(p) <= bound, (q, i, m, p)


@pytest.mark.criterion(6, "nested-sum and partial-fraction forms agree; sums are 1; identity holds")
def test_c6_form_equivalence():
    spec = gf(2)
    for m in (3, 4, 5):
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            a = an.rank_dist_nested(m, 3, spec, p).values()
            b = an.rank_dist_partial_fraction(m, 3, spec, p).values()
            assert a == b, (m, p)
            assert sum(a) == 1 and sum(b) == 1
    rnd = random.Random(20240)
    for _ in range(100):
        n = rnd.randint(0, 6)
        xs = set()
        while len(xs) < n + 1:
            xs.add(Fraction(rnd.randint(-50, 50), rnd.randint(1, 12)))
        assert an.partial_fraction_identity_check(sorted(xs)) == (-1) ** n


def _membership_exhaustive_q2():
    spec = gf(2)
    checked = 0
    for n in range(1, 6):
        hs = np.array(list(product(range(2), repeat=n)), dtype=np.int64)
        for i in range(1, min(3, n) + 1):
            mats = list(enumerate_full_rank(spec, i, n))
            arr = np.array([m.entries for m in mats], dtype=np.int64).reshape(-1, i, n)
            decs = [column_basis_decompose(m) for m in mats]
            for h in hs:
                stacked = np.concatenate([arr, np.broadcast_to(h, (len(arr), 1, n))], axis=1)
                ref = batch_rank(stacked, spec) == i
                hl = h.tolist()
                got = [membership_criterion(d, hl) for d in decs]
                assert got == ref.tolist(), (i, n, hl)
                checked += len(decs)
    return checked


def _membership_random_q3(count):
    spec = gf(3)
    rng = np.random.default_rng(77)
    done = hits = 0
    while done < count:
        n = int(rng.integers(1, 7))
        i = int(rng.integers(1, n + 1))
        a = rng.integers(0, 3, size=(i, n))
        if batch_rank(a[None], spec)[0] != i:
            continue
        if rng.random() < 0.5:
            h = np.array(vec_mat(spec, rng.integers(0, 3, size=i).tolist(),
                                 FqMatrix.from_rows(spec, a.tolist(), cols=n)))
        else:
            h = rng.integers(0, 3, size=n)
        ref = batch_rank(np.vstack([a, h])[None], spec)[0] == i
        d = column_basis_decompose(FqMatrix.from_rows(spec, a.tolist(), cols=n))
        assert membership_criterion(d, h.tolist()) == ref, (a.tolist(), h.tolist())
        hits += ref
        done += 1
    return hits


@pytest.mark.criterion(7, "membership criterion matches rank-based oracle (exhaustive q=2, 10^4 random q=3)")
def test_c7_membership():
    checked = _membership_exhaustive_q2()
    # sum over n <= 5, i <= min(3, n) of |full-rank i x n| * 2^n
    want = sum(
        math.prod(2**n - 2**j for j in range(i)) * 2**n
        for n in range(1, 6) for i in range(1, min(3, n) + 1)
    )
    assert checked == want
    hits = _membership_random_q3(10_000)
    assert 0 < hits < 10_000


@pytest.mark.criterion(8, "Monte Carlo within 4 standard errors at q=2, n=4, m=6, 10^5 trials, < 30 s")
def test_c8_monte_carlo():
    t = time.perf_counter()
    for p0 in (Fraction(1, 2), Fraction(7, 10)):
        rep = run_trials(SimConfig(q=2, n=4, m=6, p0=p0, L=4, trials=100_000, seed=2024))
        exact = float(an.full_rank_value(6, 4, gf(2), p0))
        se = math.sqrt(exact * (1 - exact) / rep.trials)
        z = (rep.empirical_success_rate - exact) / se
        print(f"p0={p0}: empirical {rep.empirical_success_rate:.5f} exact {exact:.5f} z {z:+.2f}")
        assert abs(z) <= 4, (p0, z)
    secs = time.perf_counter() - t
    assert secs < 30, f"took {secs:.1f}s"


@pytest.mark.criterion(9, "every product-form result is a polynomial (denominator 1)")
def test_c9_telescoping():
    for q, n, m in grid():
        expr = an.full_rank_prob(m, n, gf(q)).expr
        assert expr.den == ONE and expr.is_polynomial(), (q, n, m)
        # the factors themselves are genuine rational functions for i >= 1
        if n >= 2 and m >= 3:
            assert an.p_in(1, m, gf(q)).expr.den != ONE


CLI_RUNS = [
    ["exact", "--q", "2", "--n", "3", "--m", "3", "--symbolic"],
    ["exact", "--q", "3", "--n", "2", "--m", "3", "--p0", "0.35", "--format", "json"],
    ["pni", "--q", "2", "--n", "4", "--i", "2", "--p0", "0.6", "--bound"],
    ["rankdist", "--q", "2", "--n", "3", "--m", "5", "--p0", "1/4", "--form", "pf", "--format", "csv"],
    ["sweep", "--q", "2", "--n", "3", "--m-range", "3:5", "--p0-grid", "1/4,1/2,3/4"],
    ["simulate", "--q", "2", "--n", "3", "--m", "4", "--p0", "7/10", "--trials", "2000", "--seed", "42"],
    ["simulate", "--q", "4", "--n", "3", "--p0", "1/2", "--mode", "stream", "--N", "12",
     "--eps", "1/5", "--trials", "1000", "--seed", "7", "--threads", "2"],
    ["oracle", "--q", "3", "--n", "2", "--m", "2", "--format", "json"],
]


@pytest.mark.criterion(10, "repeated CLI invocations are byte-identical")
def test_c10_determinism():
    for argv in CLI_RUNS:
        outs = [subprocess.run([sys.executable, "-m", "srlnc", *argv], capture_output=True)
                for _ in range(2)]
        assert outs[0].returncode == outs[1].returncode == 0, argv
        assert outs[0].stdout and outs[0].stdout == outs[1].stdout, argv


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
