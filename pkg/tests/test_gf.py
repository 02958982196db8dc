import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvqkd.gf import (GaloisFieldError, canonical_field, gf_add, gf_build_tables,
                      gf_matvec, gf_mul)
from cvqkd.reconciliation import SparseParityMatrix

# GF(8) tables for x^3 + x + 1
A8 = np.array([
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 3, 2, 5, 4, 7, 6],
    [2, 3, 0, 1, 6, 7, 4, 5],
    [3, 2, 1, 0, 7, 6, 5, 4],
    [4, 5, 6, 7, 0, 1, 2, 3],
    [5, 4, 7, 6, 1, 0, 3, 2],
    [6, 7, 4, 5, 2, 3, 0, 1],
    [7, 6, 5, 4, 3, 2, 1, 0],
])
M8 = np.array([
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 2, 3, 4, 5, 6, 7],
    [0, 2, 4, 6, 3, 1, 7, 5],
    [0, 3, 6, 5, 7, 4, 1, 2],
    [0, 4, 3, 7, 6, 2, 5, 1],
    [0, 5, 1, 4, 2, 7, 3, 6],
    [0, 6, 7, 1, 5, 3, 2, 4],
    [0, 7, 5, 2, 1, 6, 4, 3],
])

TOY_H = np.array([[0, 0, 3, 0, 1], [2, 0, 0, 1, 0], [0, 1, 0, 2, 3]])


def poly_mulmod(a, b, poly, k):
    """Shift-and-add multiply with reduction after every shift."""
    out = 0
    for i in range(k):
        if (b >> i) & 1:
            out ^= a
        a <<= 1
        if a >> k:
            a ^= poly
    return out


def test_gf8_golden_tables():
    f = gf_build_tables(3, 0b1011)
    np.testing.assert_array_equal(f.add_table, A8)
    np.testing.assert_array_equal(f.mul_table, M8)


def test_worked_examples():
    f = canonical_field(3)
    assert gf_add(f, 5, 6) == 3
    assert gf_mul(f, 7, 6) == 4


def test_gf2_truth_tables():
    f = gf_build_tables(1)
    np.testing.assert_array_equal(f.add_table, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(f.mul_table, [[0, 0], [0, 1]])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_field_axioms_exhaustive(k):
    f = canonical_field(k)
    q = f.order
    A, M = f.add_table, f.mul_table
    e = np.arange(q)
    np.testing.assert_array_equal(A, A.T)
    np.testing.assert_array_equal(M, M.T)
    np.testing.assert_array_equal(np.diag(A), 0)
    np.testing.assert_array_equal(A[:, 0], e)
    np.testing.assert_array_equal(M[:, 1], e)
    np.testing.assert_array_equal(M[:, 0], 0)
    for a in range(1, q):
        assert sorted(M[a]) == list(range(q))
        assert M[a, f.inv(a)] == 1
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    np.testing.assert_array_equal(A[A[a, b], c], A[a, A[b, c]])
    np.testing.assert_array_equal(M[M[a, b], c], M[a, M[b, c]])
    np.testing.assert_array_equal(M[a, A[b, c]], A[M[a, b], M[a, c]])


@pytest.mark.parametrize("k", range(1, 9))
def test_tables_match_polynomial_arithmetic(k):
    f = canonical_field(k)
    for a, b in itertools.product(range(f.order), repeat=2):
        assert f.mul_table[a, b] == poly_mulmod(a, b, f.irreducible_poly, k)
        assert f.add_table[a, b] == a ^ b


def test_sub_equals_add():
    f = canonical_field(4)
    e = np.arange(16)
    np.testing.assert_array_equal(f.sub(e[:, None], e[None, :]), f.add(e[:, None], e[None, :]))


def test_canonical_polynomials():
    assert [canonical_field(k).irreducible_poly for k in (2, 3, 4, 8)] == [0b111, 0b1011, 0b10011, 0b100011011]


def test_reducible_polynomial_rejected():
    with pytest.raises(GaloisFieldError):
        gf_build_tables(2, 0b101)  # x^2 + 1 = (x + 1)^2
    with pytest.raises(GaloisFieldError):
        gf_build_tables(3, 0b111)  # degree 2


def test_out_of_range_elements():
    f = canonical_field(2)
    with pytest.raises(GaloisFieldError):
        gf_add(f, 4, 1)
    with pytest.raises(GaloisFieldError):
        gf_mul(f, 1, -1)
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_toy_matrix_syndrome():
    f = canonical_field(2)
    v = np.array([0, 0, 1, 1, 0])
    np.testing.assert_array_equal(gf_matvec(f, TOY_H, v), [3, 1, 2])
    sp = SparseParityMatrix.from_dense(TOY_H, 2)
    np.testing.assert_array_equal(gf_matvec(f, sp, v), [3, 1, 2])
    np.testing.assert_array_equal(gf_matvec(f, TOY_H, np.zeros(5, int)), [0, 0, 0])


def test_matvec_trivial_and_errors():
    f = canonical_field(4)
    assert list(gf_matvec(f, np.array([[1]]), np.array([9]))) == [9]
    with pytest.raises(GaloisFieldError):
        gf_matvec(f, TOY_H, np.zeros(4, int))


@given(st.integers(0, 2**32 - 1))
def test_matvec_linear(seed):
    rng = np.random.default_rng(seed)
    f = canonical_field(4)
    H = rng.integers(0, 16, size=(6, 11))
    u, v = rng.integers(0, 16, size=(2, 11))
    lhs = gf_matvec(f, H, u ^ v)
    np.testing.assert_array_equal(lhs, gf_matvec(f, H, u) ^ gf_matvec(f, H, v))
