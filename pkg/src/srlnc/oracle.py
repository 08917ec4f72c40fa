"""Brute-force ground truth by enumerating every matrix over F_q.

Ranks are computed with a batched numpy elimination written here, not with
:mod:`srlnc.linalg`, so the oracle does not share the code it checks.
"""

from __future__ import annotations

import numpy as np

from .analysis import enumerator_poly
from .errors import BudgetExceededError
from .field import FieldSpec
from .poly import RationalFn, RationalPoly

ORACLE_BUDGET = 1 << 24
CHUNK = 1 << 15


def batch_rank(mats: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Ranks of a stack of matrices with shape (B, rows, cols)."""
    m = np.array(mats, dtype=np.int64, copy=True)
    b_count, nrows, ncols = m.shape
    rank = np.zeros(b_count, dtype=np.int64)
    row_ids = np.arange(nrows)
    for c in range(ncols):
        cand = (m[:, :, c] != 0) & (row_ids[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = np.argmax(cand[b], axis=1)
        r = rank[b]
        top = m[b, r].copy()
        m[b, r] = m[b, piv]
        m[b, piv] = top
        prow = m[b, r]
        prow = spec.np_mul(prow, spec.np_inv(prow[:, c])[:, None])
        m[b, r] = prow
        factors = np.where(row_ids[None, :] > r[:, None], m[b, :, c], 0)
        m[b] = spec.np_sub(m[b], spec.np_mul(factors[:, :, None], prow[:, None, :]))
        rank[b] += 1
    return rank


def _all_matrices(spec: FieldSpec, rows: int, cols: int, budget: int):
    """Yield every rows x cols matrix in chunks, lexicographic in entries."""
    q, k = spec.q, rows * cols
    total = q**k
    if total > budget:
        raise BudgetExceededError(total, budget)
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % q
        yield digits.reshape(-1, rows, cols)


def rank_weight_census(m: int, n: int, spec: FieldSpec, budget: int = ORACLE_BUDGET) -> np.ndarray:
    """counts[r, w]: number of m x n matrices of rank r and weight w."""
    counts = np.zeros((min(m, n) + 1, m * n + 1), dtype=np.int64)
    for block in _all_matrices(spec, m, n, budget):
        r = batch_rank(block, spec) if m and n else np.zeros(len(block), dtype=np.int64)
        w = (block != 0).reshape(len(block), -1).sum(axis=1)
        np.add.at(counts, (r, w), 1)
    return counts


def oracle_full_rank_poly(m: int, n: int, spec: FieldSpec, budget: int = ORACLE_BUDGET):
    """Sum of weight measures over full-column-rank m x n matrices.

    Returns ``(polynomial, census)`` where ``census[w]`` counts full-rank
    matrices of weight ``w``.
    """
    counts = rank_weight_census(m, n, spec, budget)
    full = min(m, n)
    census = [int(x) for x in counts[n]] if full == n else [0] * (m * n + 1)
    return enumerator_poly(census, m * n, spec.q), census


def oracle_rank_census(m: int, n: int, spec: FieldSpec, budget: int = ORACLE_BUDGET) -> list[RationalPoly]:
    """P(rank = r) for r = 0..n as polynomials in p0."""
    counts = rank_weight_census(m, n, spec, budget)
    out = []
    for r in range(n + 1):
        row = counts[r] if r < len(counts) else np.zeros(m * n + 1, dtype=np.int64)
        out.append(enumerator_poly([int(x) for x in row], m * n, spec.q))
    return out


def oracle_p_in(i: int, n: int, spec: FieldSpec, budget: int = ORACLE_BUDGET) -> RationalFn:
    """P(h in rowspace(A) | A full rank), A i x n and h 1 x n, by enumeration.

    Membership is decided by comparing rank(A) with rank of A stacked on h.
    """
    if not 0 <= i <= n - 1:
        raise ValueError(f"need 0 <= i <= n-1, got i={i}, n={n}")
    num = np.zeros((i + 1) * n + 1, dtype=np.int64)
    den = np.zeros(i * n + 1, dtype=np.int64)
    for block in _all_matrices(spec, i + 1, n, budget):
        top = block[:, :i, :]
        r_top = batch_rank(top, spec) if i else np.zeros(len(block), dtype=np.int64)
        r_all = batch_rank(block, spec)
        full = r_top == i
        dep = full & (r_all == i)
        w_top = (top != 0).reshape(len(block), -1).sum(axis=1)
        w_all = (block != 0).reshape(len(block), -1).sum(axis=1)
        # each A appears q^n times (once per h); count it once, at h = 0
        first = full & ~block[:, i, :].any(axis=1)
        np.add.at(den, w_top[first], 1)
        np.add.at(num, w_all[dep], 1)
    return RationalFn(
        enumerator_poly([int(x) for x in num], (i + 1) * n, spec.q),
        enumerator_poly([int(x) for x in den], i * n, spec.q),
    )


def format_census(census) -> str:
    """Two-row weight/count table."""
    w = " ".join(f"{k:>5}" for k in range(len(census)))
    c = " ".join(f"{int(x):>5}" for x in census)
    return f"weight {w}\ncount  {c}"
