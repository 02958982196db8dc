"""Table-driven arithmetic in GF(2^k), k <= 8.

Elements are plain integers whose bits are the coefficients of a binary
polynomial (bit i <-> x^i). Addition is XOR; multiplication is carry-less
polynomial multiplication reduced modulo an irreducible polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_K = 8

# bit-encoded irreducible polynomials, e.g. 0b1011 = x^3 + x + 1
CANONICAL_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
}


class GaloisFieldError(ValueError):
    """Raised for invalid field parameters or out-of-range elements."""


def _clmul_mod(a: int, b: int, poly: int, k: int) -> int:
    # shift-and-add multiply with on-the-fly reduction
    result = 0
    top = 1 << k
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return result


@dataclass(frozen=True, eq=False)
class GfField:
    """GF(2^k) with dense add/mul tables.

    ``inv_table[0]`` is 0 by convention (zero has no inverse).
    """

    order_exponent: int
    irreducible_poly: int
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.order_exponent

    @property
    def order(self) -> int:
        return 1 << self.order_exponent

    def check(self, *values) -> None:
        for v in values:
            arr = np.asarray(v)
            if arr.size and (arr.min() < 0 or arr.max() >= self.order):
                raise GaloisFieldError(
                    f"element out of range for GF(2^{self.k}): {v!r}")

    def add(self, a, b):
        return gf_add(self, a, b)

    sub = add

    def mul(self, a, b):
        return gf_mul(self, a, b)

    def inv(self, a: int) -> int:
        self.check(a)
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def div(self, a, b):
        self.check(a, b)
        if np.any(np.asarray(b) == 0):
            raise ZeroDivisionError("division by zero in GF(2^k)")
        return self.mul_table[a, self.inv_table[b]]


def gf_build_tables(k: int, irreducible_poly: int | None = None) -> GfField:
    """Materialize the add, mul and inverse tables of GF(2^k).

    :param k: field exponent, 1 <= k <= 8.
    :param irreducible_poly: bit-encoded degree-k polynomial; the canonical
        one for ``k`` is used when omitted.
    :raises GaloisFieldError: if the polynomial has the wrong degree or is
        reducible (detected as a nonzero element without inverse).
    """
    if not 1 <= k <= MAX_K:
        raise GaloisFieldError(f"k must be in [1, {MAX_K}], got {k}")
    poly = CANONICAL_POLYS[k] if irreducible_poly is None else int(irreducible_poly)
    if poly.bit_length() != k + 1:
        raise GaloisFieldError(f"polynomial {poly:#b} is not of degree {k}")

    size = 1 << k
    elems = np.arange(size, dtype=np.uint8 if k <= 8 else np.uint16)
    add = elems[:, None] ^ elems[None, :]
    mul = np.zeros((size, size), dtype=add.dtype)
    for a in range(size):
        for b in range(a, size):
            mul[a, b] = mul[b, a] = _clmul_mod(a, b, poly, k)

    inv = np.zeros(size, dtype=add.dtype)
    for a in range(1, size):
        hits = np.flatnonzero(mul[a] == 1)
        if hits.size != 1:
            raise GaloisFieldError(
                f"polynomial {poly:#b} is reducible: {a} has no inverse")
        inv[a] = hits[0]

    for t in (add, mul, inv):
        t.setflags(write=False)
    return GfField(k, poly, add, mul, inv)


@lru_cache(maxsize=None)
def canonical_field(k: int) -> GfField:
    """Cached GF(2^k) built from the canonical polynomial."""
    return gf_build_tables(k)


def gf_add(field: GfField, a, b):
    field.check(a, b)
    return np.bitwise_xor(a, b)


def gf_mul(field: GfField, a, b):
    field.check(a, b)
    out = field.mul_table[a, b]
    return int(out) if np.ndim(out) == 0 else out


def gf_matvec(field: GfField, H, v) -> np.ndarray:
    """Compute ``H v`` over the field.

    ``H`` is either a dense 2-D integer array or a sparse matrix object
    exposing ``l``, ``n``, ``edge_rows``, ``edge_cols`` and ``edge_vals``.
    """
    v = np.asarray(v)
    if hasattr(H, "edge_rows"):
        l, n = H.l, H.n
        rows, cols, vals = H.edge_rows, H.edge_cols, H.edge_vals
    else:
        dense = np.asarray(H)
        if dense.ndim != 2:
            raise GaloisFieldError("H must be two-dimensional")
        l, n = dense.shape
        rows, cols = np.nonzero(dense)
        vals = dense[rows, cols]
    if v.shape != (n,):
        raise GaloisFieldError(f"vector of shape {v.shape} does not match n={n}")
    field.check(v, vals)

    prods = field.mul_table[vals, v[cols]].astype(np.int64)
    out = np.zeros(l, dtype=np.int64)
    np.bitwise_xor.at(out, rows, prods)
    return out
