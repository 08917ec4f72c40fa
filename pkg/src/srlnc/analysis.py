"""Exact decoding probabilities of sparse random linear network coding.

Everything is built symbolically in p0 first and evaluated later. Sums
over matrices are accumulated as integer weight enumerators (count of
objects per Hamming weight); a weight enumerator ``c`` over ``N`` entries
stands for the polynomial ``sum_w c[w] p0^(N-w) ((1-p0)/(q-1))^w``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import BudgetExceededError, CoincidentValuesError, DimensionError
from .field import FieldSpec, gf, iter_vectors
from .linalg import (
    DEFAULT_ENUM_BUDGET,
    FqMatrix,
    column_basis_decompose,
    full_rank_count,
    iter_full_rank_rows,
    partition_ranges,
    rref_key,
    vec_mat,
    weight,
)
from .poly import RationalFn, RationalPoly


class Formula(str, Enum):
    EQ2 = "eq2"
    EQ3 = "eq3"
    RLNC = "rlnc"
    BKW = "bkw"
    PARTIAL_FRACTION = "partial_fraction"
    NESTED_SUM = "nested_sum"
    ORACLE = "oracle"


@dataclass(frozen=True)
class ProbExpr:
    expr: RationalFn
    q: int
    meta: Formula

    def evaluate(self, p0):
        return self.expr.evaluate(p0)

    def __str__(self):
        return str(self.expr)


@dataclass(frozen=True)
class RankDistribution:
    """P(rank = r) for r = 0..n of a random m x n matrix.

    ``probs`` holds :class:`ProbExpr` when symbolic (``p0 is None``) and
    exact Fractions when evaluated at ``p0``.
    """

    q: int
    m: int
    n: int
    probs: tuple
    form: Formula
    p0: Fraction | None = None

    def total(self):
        if self.p0 is None:
            acc = RationalFn.lift(0)
            for p in self.probs:
                acc = acc + p.expr
            return acc
        return sum(self.probs, Fraction(0))

    def values(self) -> list[Fraction]:
        if self.p0 is None:
            raise ValueError("symbolic distribution; call .at(p0)")
        return list(self.probs)

    def at(self, p0) -> list[Fraction]:
        if self.p0 is not None:
            return list(self.probs)
        return [p.evaluate(Fraction(p0)) for p in self.probs]


# weight measures ----------------------------------------------------------


@lru_cache(maxsize=4096)
def _measure_poly(total: int, wt: int, q: int) -> RationalPoly:
    # p0^(total-wt) * (1-p0)^wt / (q-1)^wt, expanded
    scale = Fraction(1, (q - 1) ** wt)
    coeffs = [Fraction(0)] * (total + 1)
    for j in range(wt + 1):
        coeffs[total - wt + j] += scale * comb(wt, j) * (-1) ** j
    return RationalPoly(coeffs)


def weight_measure(v: "FqMatrix | Sequence[int]", total_entries: int | None = None, q: int | None = None) -> RationalPoly:
    """Probability of one specific realisation ``v`` under the sparse law."""
    if isinstance(v, FqMatrix):
        q = v.spec.q if q is None else q
        total = v.rows * v.cols if total_entries is None else total_entries
    else:
        if q is None:
            raise ValueError("q is required for plain vectors")
        total = len(v) if total_entries is None else total_entries
    wt = weight(v)
    if wt > total:
        raise DimensionError("weight exceeds entry count")
    return _measure_poly(total, wt, q)


def enumerator_poly(counts: Sequence[int], total: int, q: int) -> RationalPoly:
    """Polynomial of a weight enumerator over ``total`` entries."""
    acc = [Fraction(0)] * (total + 1)
    for w, c in enumerate(counts):
        if c:
            for k, v in enumerate(_measure_poly(total, w, q).coeffs):
                acc[k] += c * v
    return RationalPoly(acc)


# the inner sum of the dependency probability ------------------------------


def inner_counts(c: FqMatrix) -> tuple[int, ...]:
    """Weight enumerator of ``(z, z S)`` over all z, S from the column-basis split.

    By construction this enumerates exactly the row space of ``c`` (with
    columns permuted, which does not change weights).
    """
    d = column_basis_decompose(c)
    spec = c.spec
    i, n = c.rows, c.cols
    counts = [0] * (n + 1)
    for z in iter_vectors(spec, i):
        y = vec_mat(spec, z, d.s) if d.s.cols else []
        counts[weight(z) + weight(y)] += 1
    return tuple(counts)


def p_in_inner_uncached(c: FqMatrix) -> RationalPoly:
    return enumerator_poly(inner_counts(c), c.cols, c.spec.q)


@dataclass
class InnerSumCache:
    """Memo of :func:`inner_counts` keyed by the RREF of the matrix.

    The inner sum depends only on the row space, so the RREF is a valid key.
    """

    table: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0

    def counts(self, c: FqMatrix) -> tuple[int, ...]:
        key = (c.spec.q, c.cols, rref_key(c.spec, c.to_rows(), c.cols))
        got = self.table.get(key)
        if got is None:
            self.misses += 1
            got = self.table.setdefault(key, inner_counts(c))
        else:
            self.hits += 1
        return got

    def clear(self) -> None:
        self.table.clear()
        self.hits = self.misses = 0


DEFAULT_CACHE = InnerSumCache()


def p_in_inner_cached(c: FqMatrix, cache: InnerSumCache | None = None) -> RationalPoly:
    cache = DEFAULT_CACHE if cache is None else cache
    return enumerator_poly(cache.counts(c), c.cols, c.spec.q)


# dependency probability p(i, n) -------------------------------------------


def _p_in_partial(args):
    q, i, n, rng = args
    spec = gf(q)
    cache = InnerSumCache()
    num = [0] * (i * n + n + 1)
    den = [0] * (i * n + 1)
    for rows in iter_full_rank_rows(spec, i, n, budget=None, first_row_range=rng):
        c = FqMatrix(i, n, tuple(x for r in rows for x in r), spec)
        wc = weight(c.entries)
        den[wc] += 1
        for wv, k in enumerate(cache.counts(c)):
            if k:
                num[wc + wv] += k
    return num, den


_COUNTS_MEMO: dict = {}


def clear_caches() -> None:
    """Drop memoised enumerators and the shared inner-sum cache."""
    _COUNTS_MEMO.clear()
    DEFAULT_CACHE.clear()
    _measure_poly.cache_clear()


def _p_in_counts(q: int, i: int, n: int, workers: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    got = _COUNTS_MEMO.get((q, i, n))
    if got is not None:
        return got
    spec = gf(q)
    if workers > 1:
        ranges = partition_ranges(spec, n, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_p_in_partial, [(q, i, n, r) for r in ranges]))
    else:
        parts = [_p_in_partial((q, i, n, None))]
    num = [0] * (i * n + n + 1)
    den = [0] * (i * n + 1)
    # merge in range order so results do not depend on scheduling
    for pn, pd in parts:
        num = [a + b for a, b in zip(num, pn)]
        den = [a + b for a, b in zip(den, pd)]
    return _COUNTS_MEMO.setdefault((q, i, n), (tuple(num), tuple(den)))


def dependency_enumerators(spec: FieldSpec, i: int, n: int, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1):
    """Weight enumerators of the numerator and denominator sums of p(i, n).

    Numerator counts pairs (C, v) with C full rank and v in its row space,
    indexed by wt(C) + wt(v) over i*n + n entries; denominator counts C by
    wt(C) over i*n entries.
    """
    if not 0 <= i <= n - 1:
        raise DimensionError(f"need 0 <= i <= n-1, got i={i}, n={n}")
    need = full_rank_count(spec.q, i, n)
    if budget is not None and need > budget:
        raise BudgetExceededError(need, budget)
    return _p_in_counts(spec.q, i, n, max(1, workers))


def p_in(i: int, n: int, spec: FieldSpec, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1) -> ProbExpr:
    """Probability that a fresh sparse n-vector falls in the span of i
    independent sparse n-vectors, as an exact rational function of p0."""
    if not 0 <= i <= n - 1:
        raise DimensionError(f"need 0 <= i <= n-1, got i={i}, n={n}")
    if i == 0:
        return ProbExpr(RationalFn(RationalPoly.monomial(n)), spec.q, Formula.EQ2)
    num, den = dependency_enumerators(spec, i, n, budget, workers)
    expr = RationalFn(
        enumerator_poly(num, i * n + n, spec.q),
        enumerator_poly(den, i * n, spec.q),
    )
    return ProbExpr(expr, spec.q, Formula.EQ2)


# full-rank probability ----------------------------------------------------


def full_rank_prob(m: int, n: int, spec: FieldSpec, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1) -> ProbExpr:
    """P(rank M = n) for an m x n sparse random matrix, m >= n."""
    if m < n or n < 0:
        raise DimensionError(f"need m >= n >= 0, got m={m}, n={n}")
    acc = RationalFn.lift(1)
    for i in range(n):
        acc = acc * p_in(i, m, spec, budget, workers).expr.one_minus()
    return ProbExpr(acc, spec.q, Formula.EQ3)


def full_rank_value(m: int, n: int, spec: FieldSpec, p0, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1):
    """Evaluate the product form factor by factor.

    Stops at the first zero factor: later conditionals condition on an event
    of probability zero and may have a pole there.
    """
    if m < n:
        raise DimensionError(f"need m >= n, got m={m}, n={n}")
    value = Fraction(1)
    for i in range(n):
        f = p_in(i, m, spec, budget, workers).expr.one_minus().evaluate(Fraction(p0))
        value *= f
        if value == 0:
            break
    return float(value) if isinstance(p0, float) else value


# rank distributions ---------------------------------------------------------


def _nested(a: list, m: int, r: int):
    """prod_{i<r}(1-a_i) * sum over r-floored nondecreasing index chains.

    ``suffix[k]`` holds sum_{j>=k} a_j * S(steps-1, j), built one step at a
    time; S(0, .) = 1.
    """
    steps = m - r
    level = [1] * (r + 1)
    for _ in range(steps):
        new = [0] * (r + 1)
        run = 0
        for k in range(r, -1, -1):
            run = run + a[k] * level[k]
            new[k] = run
        level = new
    head = 1
    for i in range(r):
        head = head * (1 - a[i])
    return head * level[0]


def _check_dims(m: int, n: int) -> None:
    if not m >= n >= 0:
        raise DimensionError(f"need m >= n >= 0, got m={m}, n={n}")


def dependency_sequence(n: int, spec: FieldSpec, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1) -> list[RationalFn]:
    """[p(0,n), ..., p(n-1,n), 1]; the trailing 1 is p(n,n)."""
    return [p_in(i, n, spec, budget, workers).expr for i in range(n)] + [RationalFn.lift(1)]


def rank_dist_nested(m: int, n: int, spec: FieldSpec, p0=None, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1) -> RankDistribution:
    """Row-by-row Markov-chain rank distribution (nested-sum form).

    With ``p0`` given, the dependency probabilities are evaluated first and the
    chain runs in exact rationals; otherwise the result is symbolic.
    """
    _check_dims(m, n)
    a = dependency_sequence(n, spec, budget, workers)
    if p0 is None:
        probs = tuple(ProbExpr(RationalFn.lift(_nested(a, m, r)), spec.q, Formula.NESTED_SUM) for r in range(n + 1))
        return RankDistribution(spec.q, m, n, probs, Formula.NESTED_SUM)
    p0 = Fraction(p0)
    av = [x.evaluate(p0) for x in a]
    probs = tuple(Fraction(_nested(av, m, r)) for r in range(n + 1))
    return RankDistribution(spec.q, m, n, probs, Formula.NESTED_SUM, p0)


def partial_fraction_sum(xs: Sequence, power: int):
    """sum_k xs[k]^power / prod_{t != k} (xs[t] - xs[k])."""
    xs = list(xs)
    if len(set(xs)) != len(xs):
        raise CoincidentValuesError(f"values are not pairwise distinct: {xs}")
    total = Fraction(0)
    for k, xk in enumerate(xs):
        d = Fraction(1)
        for t, xt in enumerate(xs):
            if t != k:
                d *= xt - xk
        total += Fraction(xk) ** power / d
    return total


def partial_fraction_identity_check(xs: Sequence) -> Fraction:
    """For n+1 distinct points returns sum_k x_k^n / prod_{t!=k}(x_t - x_k); equals (-1)^n."""
    if len(xs) < 1:
        raise ValueError("need at least one point")
    return partial_fraction_sum([Fraction(x) for x in xs], len(xs) - 1)


def rank_dist_partial_fraction(m: int, n: int, spec: FieldSpec, p0, budget: int | None = DEFAULT_ENUM_BUDGET, workers: int = 1) -> RankDistribution:
    """Same chain as :func:`rank_dist_nested` in its partial-fraction form.

    Raises :class:`CoincidentValuesError` when two of the evaluated
    dependency probabilities collide; use the nested form there.
    """
    _check_dims(m, n)
    p0 = Fraction(p0)
    a = [x.evaluate(p0) for x in dependency_sequence(n, spec, budget, workers)]
    probs = []
    for r in range(n + 1):
        head = Fraction(1)
        for t in range(r):
            head *= a[t] - 1
        try:
            probs.append(head * partial_fraction_sum(a[: r + 1], m))
        except CoincidentValuesError as exc:
            raise CoincidentValuesError(
                f"p(i,{n}) values collide at p0={p0} for rank {r}; use the nested form"
            ) from exc
    return RankDistribution(spec.q, m, n, tuple(probs), Formula.PARTIAL_FRACTION, p0)


# reference expressions ------------------------------------------------------


@dataclass(frozen=True)
class BkwBound:
    """Piecewise upper bound max(p0, (1-p0)/(q-1))^(n-i) on p(i, n)."""

    i: int
    n: int
    q: int

    def evaluate(self, p0):
        as_float = isinstance(p0, float)
        p = Fraction(p0)
        v = max(p, (1 - p) / (self.q - 1)) ** (self.n - self.i)
        return float(v) if as_float else v

    __call__ = evaluate


def bkw_bound(i: int, n: int, spec: FieldSpec) -> BkwBound:
    if not 0 <= i <= n - 1:
        raise DimensionError(f"need 0 <= i <= n-1, got i={i}, n={n}")
    return BkwBound(i, n, spec.q)


def bkw_full_rank_lower_bound(m: int, n: int, spec: FieldSpec, p0):
    """prod_i (1 - bound(i, m)): lower bound on the full-rank probability."""
    v = Fraction(1)
    for i in range(n):
        v *= 1 - bkw_bound(i, m, spec).evaluate(Fraction(p0))
    return float(v) if isinstance(p0, float) else v


def rlnc_step(i: int, n: int, q: int) -> Fraction:
    """(1/q)^(n-i): chance a uniform n-vector lies in a fixed i-dim subspace."""
    return Fraction(1, q) ** (n - i)


def rlnc_full_rank(m: int, n: int, q: int) -> Fraction:
    v = Fraction(1)
    for i in range(n):
        v *= 1 - Fraction(1, q) ** (m - i)
    return v


def rlnc_closed_form(mode: str, n: int, spec: FieldSpec, *, i: int | None = None, m: int | None = None) -> Fraction:
    """Uniform-coefficient reference values: ``mode`` is "step" or "full"."""
    if mode == "step":
        if i is None:
            raise ValueError("step mode needs i")
        return rlnc_step(i, n, spec.q)
    if mode == "full":
        if m is None:
            raise ValueError("full mode needs m")
        return rlnc_full_rank(m, n, spec.q)
    raise ValueError(f"unknown mode {mode!r}")


def evaluated_rows(expr: ProbExpr, q: int, n: int, m: int | None, index: int, p0s) -> list[dict]:
    """CSV-ready rows (q, n, m, i_or_r, p0, value, formula)."""
    rows = []
    for p in p0s:
        v = expr.evaluate(Fraction(p))
        rows.append({
            "q": q, "n": n, "m": "" if m is None else m, "i_or_r": index,
            "p0": str(Fraction(p)), "value": str(v), "formula": expr.meta.value,
        })
    return rows
