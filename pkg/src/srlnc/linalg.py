"""Dense linear algebra over F_q.

Matrices are immutable and store entries as ints. Elimination is the
textbook cubic Gauss-Jordan; sizes in this package are small.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Sequence

from .errors import (
    BudgetExceededError,
    DimensionError,
    FieldMismatchError,
    NotFullRankError,
    SingularMatrixError,
)
from .field import FieldElement, FieldSpec, iter_vectors

DEFAULT_ENUM_BUDGET = 10**8


@dataclass(frozen=True)
class FqMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]
    spec: FieldSpec

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )
        q = self.spec.q
        if any(not 0 <= e < q for e in self.entries):
            raise ValueError(f"entries must lie in range({q})")

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None):
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r), spec)

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int):
        return cls(rows, cols, (0,) * (rows * cols), spec)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int):
        return cls(n, n, tuple(int(r == c) for r in range(n) for c in range(n)), spec)

    @classmethod
    def parse(cls, text: str, spec: FieldSpec):
        """Parse the ``"1 0 1; 0 1 1"`` literal format."""
        text = text.strip()
        if not text:
            return cls(0, 0, (), spec)
        rows = [r.split() for r in text.split(";")]
        return cls.from_rows(spec, [[int(x) for x in r] for r in rows])

    def __str__(self):
        return "; ".join(" ".join(str(x) for x in r) for r in self.to_rows())

    def __getitem__(self, idx):
        r, c = idx
        return FieldElement(self.entries[r * self.cols + c], self.spec)

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[r * c:(r + 1) * c]) for r in range(self.rows)]

    def row(self, r: int) -> tuple[int, ...]:
        return self.entries[r * self.cols:(r + 1) * self.cols]

    def transpose(self) -> "FqMatrix":
        rows = self.to_rows()
        return FqMatrix.from_rows(
            self.spec, [[rows[r][c] for r in range(self.rows)] for c in range(self.cols)],
            cols=self.rows,
        )

    def select_columns(self, cols: Sequence[int]) -> "FqMatrix":
        return FqMatrix.from_rows(
            self.spec, [[r[c] for c in cols] for r in self.to_rows()], cols=len(cols)
        )

    def stack(self, other: "FqMatrix | Sequence[int]") -> "FqMatrix":
        if not isinstance(other, FqMatrix):
            other = FqMatrix.from_rows(self.spec, [list(other)], cols=self.cols)
        if other.spec != self.spec:
            raise FieldMismatchError("stacking matrices over different fields")
        if other.cols != self.cols:
            raise DimensionError("column counts differ")
        return FqMatrix(self.rows + other.rows, self.cols, self.entries + other.entries, self.spec)

    def __matmul__(self, other: "FqMatrix") -> "FqMatrix":
        if other.spec != self.spec:
            raise FieldMismatchError("multiplying matrices over different fields")
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = other.transpose().to_rows()
        dot = self.spec.dot
        return FqMatrix.from_rows(
            self.spec, [[dot(r, c) for c in cols] for r in self.to_rows()], cols=other.cols
        )


def vec_mat(spec: FieldSpec, v: Sequence[int], m: FqMatrix) -> list[int]:
    """Row vector times matrix."""
    if len(v) != m.rows:
        raise DimensionError("vector length does not match matrix rows")
    out = [0] * m.cols
    rows = m.to_rows()
    for a, r in zip(v, rows):
        if a:
            out = spec.axpy(out, spec.neg(a), r)
    return out


def _rref_rows(spec: FieldSpec, rows: list[list[int]], ncols: int):
    """Gauss-Jordan on a list of int rows (modified in place).

    Pivots are chosen greedily: leftmost column first, topmost candidate row.
    Returns the nonzero reduced rows and the pivot columns.
    """
    r = 0
    pivots: list[int] = []
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((k for k in range(r, nrows) if rows[k][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = spec.scale(rows[r], spec.inv(lead))
        prow = rows[r]
        for k in range(nrows):
            if k != r and rows[k][c]:
                rows[k] = spec.axpy(rows[k], rows[k][c], prow)
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(m: FqMatrix) -> int:
    return len(_rref_rows(m.spec, m.to_rows(), m.cols)[1])


def rref(m: FqMatrix) -> tuple[FqMatrix, list[int]]:
    """Reduced row echelon form (zero rows kept at the bottom) and pivot columns."""
    red, piv = _rref_rows(m.spec, m.to_rows(), m.cols)
    red = red + [[0] * m.cols for _ in range(m.rows - len(red))]
    return FqMatrix.from_rows(m.spec, red, cols=m.cols), piv


def rref_key(spec: FieldSpec, rows: Sequence[Sequence[int]], ncols: int) -> tuple:
    """Canonical hashable key of the row space spanned by ``rows``."""
    red, _ = _rref_rows(spec, [list(r) for r in rows], ncols)
    return tuple(tuple(r) for r in red)


def invert(m: FqMatrix) -> FqMatrix:
    if m.rows != m.cols:
        raise SingularMatrixError(f"{m.rows}x{m.cols} matrix is not square")
    n = m.rows
    spec = m.spec
    aug = [r + [int(i == j) for j in range(n)] for i, r in enumerate(m.to_rows())]
    red, piv = _rref_rows(spec, aug, n)
    if len(piv) != n or (n and piv[-1] >= n):
        raise SingularMatrixError("matrix is singular")
    return FqMatrix.from_rows(spec, [r[n:] for r in red], cols=n)


def weight(x: "FqMatrix | Sequence[int]") -> int:
    """Number of nonzero entries."""
    entries = x.entries if isinstance(x, FqMatrix) else x
    return sum(1 for e in entries if e)


@dataclass(frozen=True)
class ColumnBasisDecomposition:
    """``A Q = (a1 | a2)`` with ``a1`` invertible and ``s = a1^-1 a2``.

    ``perm`` lists original column indices in their new order, so column
    ``j`` of ``A Q`` is column ``perm[j]`` of ``A``.
    """

    perm: tuple[int, ...]
    a1: FqMatrix
    a2: FqMatrix
    s: FqMatrix
    pivot_cols: tuple[int, ...]

    @property
    def i(self) -> int:
        return self.a1.rows

    @property
    def n(self) -> int:
        return len(self.perm)


def column_basis_decompose(a: FqMatrix) -> ColumnBasisDecomposition:
    _, piv = _rref_rows(a.spec, a.to_rows(), a.cols)
    if a.rows == 0 or len(piv) != a.rows:
        raise NotFullRankError(
            f"{a.rows}x{a.cols} matrix has rank {len(piv)}, needs full row rank"
        )
    pivset = set(piv)
    rest = [c for c in range(a.cols) if c not in pivset]
    a1 = a.select_columns(piv)
    a2 = a.select_columns(rest)
    s = invert(a1) @ a2
    return ColumnBasisDecomposition(tuple(piv + rest), a1, a2, s, tuple(piv))


def membership_criterion(d: ColumnBasisDecomposition, h: Sequence[int]) -> bool:
    """True iff ``h`` lies in the row space of the decomposed matrix.

    Permutes ``h`` like the columns, splits it into head (length i) and tail,
    and checks ``tail == head @ s``.
    """
    h = [int(x) for x in h]
    if len(h) != d.n:
        raise DimensionError(f"vector of length {len(h)} against {d.n} columns")
    hq = [h[c] for c in d.perm]
    head, tail = hq[:d.i], hq[d.i:]
    if d.s.cols == 0:
        return True
    return vec_mat(d.s.spec, head, d.s) == tail


def full_rank_count(q: int, i: int, n: int) -> int:
    """Number of full-row-rank i x n matrices over F_q."""
    return prod(q**n - q**j for j in range(i))


def partition_ranges(spec: FieldSpec, n: int, parts: int) -> list[tuple[int, int]]:
    """Split the lexicographic index range of the first row into ``parts`` chunks."""
    total = spec.q**n
    parts = max(1, min(parts, total))
    bounds = [total * k // parts for k in range(parts + 1)]
    return [(bounds[k], bounds[k + 1]) for k in range(parts) if bounds[k] < bounds[k + 1]]


def iter_full_rank_rows(
    spec: FieldSpec,
    i: int,
    n: int,
    budget: int | None = DEFAULT_ENUM_BUDGET,
    first_row_range: tuple[int, int] | None = None,
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield full-row-rank i x n matrices as tuples of row tuples.

    Order is lexicographic in the row-major entries. ``first_row_range``
    restricts the first row to lexicographic indices ``[lo, hi)`` so disjoint
    ranges can be consumed independently.
    """
    if not 0 <= i <= n:
        raise DimensionError(f"need 0 <= i <= n, got i={i}, n={n}")
    need = full_rank_count(spec.q, i, n)
    if budget is not None and need > budget:
        raise BudgetExceededError(need, budget)
    if i == 0:
        if first_row_range is None or first_row_range[0] == 0:
            yield ()
        return
    vectors = list(iter_vectors(spec, n))
    lo, hi = first_row_range or (0, len(vectors))
    add, mul = spec.add, spec.mul

    def extend(prefix, span):
        depth = len(prefix)
        pool = vectors[lo:hi] if depth == 0 else vectors
        for v in pool:
            if v in span:
                continue
            row_set = prefix + (v,)
            if depth + 1 == i:
                yield row_set
                continue
            new_span = set(span)
            for c in range(1, spec.q):
                cv = tuple(mul(c, x) for x in v)
                for s in span:
                    new_span.add(tuple(add(a, b) for a, b in zip(s, cv)))
            yield from extend(row_set, frozenset(new_span))

    yield from extend((), frozenset({(0,) * n}))


def enumerate_full_rank(
    spec: FieldSpec,
    i: int,
    n: int,
    budget: int | None = DEFAULT_ENUM_BUDGET,
    first_row_range: tuple[int, int] | None = None,
) -> Iterator[FqMatrix]:
    for rows in iter_full_rank_rows(spec, i, n, budget, first_row_range):
        yield FqMatrix(i, n, tuple(x for r in rows for x in r), spec)


def span(spec: FieldSpec, rows: Iterable[Sequence[int]], n: int) -> set[tuple[int, ...]]:
    """All vectors of the row space (small cases only)."""
    out = {(0,) * n}
    for r in rows:
        grown = set(out)
        for c in range(1, spec.q):
            cr = spec.scale(r, c)
            for s in out:
                grown.add(tuple(spec.add(a, b) for a, b in zip(s, cr)))
        out = grown
    return out
