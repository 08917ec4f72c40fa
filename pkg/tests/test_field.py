from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from srlnc.errors import FieldMismatchError
from srlnc.field import (
    MODULI,
    FieldElement,
    FieldSpec,
    SparseDist,
    add,
    enumerate_elements,
    gf,
    inv,
    mul,
    sample,
)

SMALL_FIELDS = [2, 3, 4, 5, 7, 8, 11, 13, 16]


def E(v, q):
    return FieldElement(v, gf(q))


def test_add_examples():
    assert add(E(1, 2), E(1, 2)) == E(0, 2)
    assert add(E(3, 5), E(4, 5)) == E(2, 5)
    assert add(E(2, 4), E(3, 4)) == E(1, 4)


def test_mul_examples():
    assert mul(E(1, 2), E(1, 2)) == E(1, 2)
    assert mul(E(3, 5), E(4, 5)) == E(2, 5)
    # x * x = x^2 = x + 1 mod x^2 + x + 1
    assert mul(E(2, 4), E(2, 4)) == E(3, 4)


def test_inv_examples():
    assert inv(E(2, 5)) == E(3, 5)
    assert inv(E(1, 2)) == E(1, 2)
    for a in range(1, 8):
        assert mul(inv(E(a, 8)), E(a, 8)) == E(1, 8)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        inv(E(0, 7))


def test_mismatched_fields():
    with pytest.raises(FieldMismatchError):
        add(E(1, 2), E(1, 3))
    with pytest.raises(FieldMismatchError):
        mul(E(1, 4), E(1, 5))


def _slow_gf2k_mul(a, b, modulus, k):
    # schoolbook carry-less product then long division by the modulus
    p = 0
    for bit in range(k):
        if (b >> bit) & 1:
            p ^= a << bit
    for bit in range(2 * k - 2, k - 1, -1):
        if (p >> bit) & 1:
            p ^= modulus << (bit - k)
    return p


@pytest.mark.parametrize("k", sorted(MODULI))
def test_binary_tables_match_schoolbook(k):
    q = 1 << k
    spec = gf(q)
    assert spec.is_binary and spec.modulus == MODULI[k]
    rng = np.random.default_rng(k)
    pairs = rng.integers(0, q, size=(500, 2)) if q > 32 else product(range(q), repeat=2)
    for a, b in pairs:
        assert spec.mul(int(a), int(b)) == _slow_gf2k_mul(int(a), int(b), MODULI[k], k)


@pytest.mark.parametrize("q", SMALL_FIELDS)
def test_field_axioms_exhaustive(q):
    spec = gf(q)
    els = range(q)
    for a, b in product(els, repeat=2):
        assert spec.add(a, b) == spec.add(b, a)
        assert spec.mul(a, b) == spec.mul(b, a)
        assert spec.sub(spec.add(a, b), b) == a
    for a, b, c in product(els, repeat=3):
        assert spec.add(spec.add(a, b), c) == spec.add(a, spec.add(b, c))
        assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
        assert spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b), spec.mul(a, c))
    for a in els:
        assert spec.add(a, 0) == a
        assert spec.mul(a, 1) == a
        assert spec.add(a, spec.neg(a)) == 0
        if a:
            assert spec.mul(a, spec.inv(a)) == 1


def test_gf256_inverse_exhaustive():
    spec = gf(256)
    for a in range(1, 256):
        assert spec.mul(a, spec.inv(a)) == 1


@pytest.mark.parametrize("q", [1, 6, 9, 12, 512, 65537])
def test_unsupported_orders(q):
    with pytest.raises(ValueError):
        FieldSpec(q)


def test_large_prime_supported():
    spec = gf(65521)
    assert spec.kind == "prime"
    assert spec.mul(65520, 65520) == 1


def test_enumerate_elements():
    assert [e.value for e in enumerate_elements(gf(2))] == [0, 1]
    assert [e.value for e in enumerate_elements(gf(3))] == [0, 1, 2]
    for q in SMALL_FIELDS:
        vals = [e.value for e in enumerate_elements(gf(q))]
        assert len(vals) == q and len(set(vals)) == q and vals[0] == 0


def test_sample_point_masses():
    rng = np.random.default_rng(1)
    assert all(sample(SparseDist(1, gf(5)), rng).value == 0 for _ in range(200))
    assert all(sample(SparseDist(0, gf(2)), rng).value == 1 for _ in range(200))


def test_sample_rejects_bad_p0():
    with pytest.raises(ValueError):
        SparseDist(Fraction(3, 2), gf(2))
    with pytest.raises(ValueError):
        SparseDist(-0.1, gf(2))


def test_pmf_sums_to_one():
    d = SparseDist(Fraction(2, 7), gf(5))
    assert sum(d.pmf(t) for t in range(5)) == 1


def test_uniform_at_one_over_q_chi_square():
    q, draws = 5, 10**6
    d = SparseDist(Fraction(1, q), gf(q))
    x = d.sample_array(np.random.default_rng(7), draws)
    counts = np.bincount(x, minlength=q)
    expected = draws / q
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # 4 degrees of freedom; 0.999 quantile is 18.47
    assert chi2 < 18.47


@pytest.mark.parametrize("q,p0", [(2, 0.7), (4, 0.3), (7, 0.9)])
def test_sparse_law_frequencies(q, p0):
    draws = 10**6
    x = SparseDist(p0, gf(q)).sample_array(np.random.default_rng(11), draws)
    zeros = (x == 0).mean()
    assert abs(zeros - p0) <= 4 * np.sqrt(p0 * (1 - p0) / draws)
    nz = x[x != 0]
    if q > 2:
        counts = np.bincount(nz, minlength=q)[1:]
        expected = len(nz) / (q - 1)
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < 30  # df <= 5, far in the tail


def test_nonzero_rows():
    d = SparseDist(Fraction(9, 10), gf(2))
    rows = d.sample_nonzero_rows(np.random.default_rng(3), 2000, 3)
    assert rows.any(axis=1).all()
