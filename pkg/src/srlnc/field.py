"""Finite fields F_q: prime q < 2**16 and GF(2**k) for 2 <= k <= 8.

Elements are plain ints in ``range(q)`` inside hot loops; :class:`FieldElement`
wraps an int together with its :class:`FieldSpec` for the public API.
Binary-extension fields multiply through log/antilog tables built once per
spec.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import FieldMismatchError

# Irreducible polynomials (bitmask including the leading term), one per k.
MODULI = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
}

PRIME_LIMIT = 1 << 16


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def _clmul_mod(a: int, b: int, modulus: int, k: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k:
            a ^= modulus
    return r


@dataclass(frozen=True)
class FieldSpec:
    """Description of F_q plus its precomputed tables.

    Equality and hashing only look at ``q``: the modulus is fixed per order.
    """

    q: int
    kind: str = field(default="", compare=False)
    modulus: int = field(default=0, compare=False)
    _exp: tuple = field(default=(), compare=False, repr=False)
    _log: tuple = field(default=(), compare=False, repr=False)
    _inv: tuple = field(default=(), compare=False, repr=False)
    _mul_rows: tuple = field(default=(), compare=False, repr=False)
    _np_mul: object = field(default=None, compare=False, repr=False)
    _np_inv: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        q = self.q
        if not isinstance(q, int) or q < 2:
            raise ValueError(f"field order must be an integer >= 2, got {q!r}")
        if _is_prime(q):
            if q >= PRIME_LIMIT:
                raise ValueError(f"prime fields are limited to q < {PRIME_LIMIT}")
            kind, modulus = "prime", 0
        elif q & (q - 1) == 0 and (q.bit_length() - 1) in MODULI:
            kind, modulus = "binary-extension", MODULI[q.bit_length() - 1]
        else:
            raise ValueError(f"unsupported field order {q}")
        set_ = object.__setattr__
        set_(self, "kind", kind)
        set_(self, "modulus", modulus)
        if kind == "prime":
            inv = [0] + [pow(a, q - 2, q) for a in range(1, q)]
            set_(self, "_inv", tuple(inv))
            set_(self, "_np_inv", np.array(inv, dtype=np.int64))
            return
        k = q.bit_length() - 1
        gen = next(g for g in range(2, q) if self._order(g, k) == q - 1)
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        x = 1
        for e in range(q - 1):
            exp[e] = x
            log[x] = e
            x = _clmul_mod(x, gen, modulus, k)
        for e in range(q - 1, 2 * (q - 1)):
            exp[e] = exp[e - (q - 1)]
        inv = [0] + [exp[(q - 1 - log[a]) % (q - 1)] for a in range(1, q)]
        rows = []
        for a in range(q):
            if a == 0:
                rows.append((0,) * q)
            else:
                la = log[a]
                rows.append((0,) + tuple(exp[la + log[b]] for b in range(1, q)))
        set_(self, "_exp", tuple(exp))
        set_(self, "_log", tuple(log))
        set_(self, "_inv", tuple(inv))
        set_(self, "_mul_rows", tuple(rows))
        set_(self, "_np_mul", np.array(rows, dtype=np.int64))
        set_(self, "_np_inv", np.array(inv, dtype=np.int64))

    def _order(self, g: int, k: int) -> int:
        x, e = g, 1
        while x != 1:
            x = _clmul_mod(x, g, self.modulus, k)
            e += 1
            if e > self.q:
                return 0
        return e

    @property
    def is_binary(self) -> bool:
        return self.kind == "binary-extension"

    @property
    def characteristic(self) -> int:
        return 2 if self.is_binary else self.q

    # int-level arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b if self.is_binary else (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return a ^ b if self.is_binary else (a - b) % self.q

    def neg(self, a: int) -> int:
        return a if self.is_binary else (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        if self.is_binary:
            return self._mul_rows[a][b]
        return a * b % self.q

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # row operations used by every elimination routine ---------------------

    def axpy(self, row: Sequence[int], c: int, other: Sequence[int]) -> list[int]:
        """Return ``row - c * other`` entrywise."""
        if self.is_binary:
            mrow = self._mul_rows[c]
            return [a ^ mrow[b] for a, b in zip(row, other)]
        q = self.q
        return [(a - c * b) % q for a, b in zip(row, other)]

    def scale(self, row: Sequence[int], c: int) -> list[int]:
        if self.is_binary:
            mrow = self._mul_rows[c]
            return [mrow[b] for b in row]
        q = self.q
        return [c * b % q for b in row]

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        if self.is_binary:
            r = 0
            rows = self._mul_rows
            for a, b in zip(u, v):
                r ^= rows[a][b]
            return r
        return sum(a * b for a, b in zip(u, v)) % self.q

    # vectorised arithmetic on int64 arrays ---------------------------------

    def np_add(self, a, b):
        return np.bitwise_xor(a, b) if self.is_binary else (a + b) % self.q

    def np_sub(self, a, b):
        return np.bitwise_xor(a, b) if self.is_binary else (a - b) % self.q

    def np_mul(self, a, b):
        if self.is_binary:
            return self._np_mul[a, b]
        return (a * b) % self.q

    def np_inv(self, a):
        return self._np_inv[a]

    def np_combine(self, coeffs, rows):
        """Linear combinations ``coeffs @ rows`` over F_q.

        ``coeffs`` has shape (k, n) and ``rows`` shape (n, L).
        """
        coeffs = np.asarray(coeffs, dtype=np.int64)
        rows = np.asarray(rows, dtype=np.int64)
        if not self.is_binary:
            return (coeffs @ rows) % self.q
        prods = self._np_mul[coeffs[:, :, None], rows[None, :, :]]
        return np.bitwise_xor.reduce(prods, axis=1) if prods.shape[1] else np.zeros(
            (coeffs.shape[0], rows.shape[1]), dtype=np.int64
        )


@lru_cache(maxsize=None)
def gf(q: int) -> FieldSpec:
    """Shared, cached :class:`FieldSpec` for order ``q``."""
    return FieldSpec(q)


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"{self.value} is not an element of F_{self.spec.q}")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise FieldMismatchError(
                f"F_{self.spec.q} element combined with F_{other.spec.q} element"
            )

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.spec.add(self.value, other.value), self.spec)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.spec.sub(self.value, other.value), self.spec)

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.spec.mul(self.value, other.value), self.spec)

    def __truediv__(self, other):
        self._check(other)
        return FieldElement(self.spec.div(self.value, other.value), self.spec)

    def __neg__(self):
        return FieldElement(self.spec.neg(self.value), self.spec)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec.inv(self.value), self.spec)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"F{self.spec.q}({self.value})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def enumerate_elements(spec: FieldSpec) -> list[FieldElement]:
    """All elements of F_q, zero first, ascending by integer value."""
    return [FieldElement(v, spec) for v in range(spec.q)]


def _as_probability(p0) -> Fraction | float:
    if isinstance(p0, float):
        if not 0.0 <= p0 <= 1.0:
            raise ValueError(f"sparsity must lie in [0, 1], got {p0}")
        return p0
    p = Fraction(p0)
    if not 0 <= p <= 1:
        raise ValueError(f"sparsity must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class SparseDist:
    """Coefficient law: 0 with probability ``p0``, else uniform on F_q \\ {0}."""

    p0: Fraction | float
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "p0", _as_probability(self.p0))

    def pmf(self, t: int):
        if t == 0:
            return self.p0
        return (1 - self.p0) / (self.spec.q - 1)

    def sample_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Draw an int64 array of i.i.d. coefficients."""
        zero = rng.random(shape) < float(self.p0)
        vals = rng.integers(1, self.spec.q, size=shape, dtype=np.int64)
        vals[zero] = 0
        return vals

    def sample_nonzero_rows(self, rng: np.random.Generator, k: int, n: int) -> np.ndarray:
        """Draw ``k`` rows of length ``n``, redrawing all-zero rows.

        Gives the conditional law of a coding vector given that it is nonzero.
        """
        if n == 0 or float(self.p0) == 1.0:
            raise ValueError("nonzero rows are impossible with n = 0 or p0 = 1")
        out = self.sample_array(rng, (k, n))
        bad = ~out.any(axis=1)
        while bad.any():
            out[bad] = self.sample_array(rng, (int(bad.sum()), n))
            bad = ~out.any(axis=1)
        return out


def sample(dist: SparseDist, rng: np.random.Generator) -> FieldElement:
    return FieldElement(int(dist.sample_array(rng, 1)[0]), dist.spec)


def iter_vectors(spec: FieldSpec, length: int) -> Iterator[tuple[int, ...]]:
    """All vectors of F_q^length in lexicographic order."""
    from itertools import product

    return product(range(spec.q), repeat=length)
