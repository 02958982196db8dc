"""Toeplitz-hash privacy amplification over GF(2).

Index convention for the ``r x n`` Toeplitz matrix defined by ``n + r - 1``
seed bits: ``seed[:r]`` is the first column and ``seed[r:]`` holds the first
row without its leading entry, so ``T[i, j] = seed[i - j]`` for ``i >= j`` and
``T[i, j] = seed[r - 1 + j - i]`` for ``j > i``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import fft
from scipy.linalg import toeplitz

# rounding margin for the floating-point convolution; counts are integers
ROUNDING_LIMIT = 0.25
CHUNK = 1 << 20


class PrecisionError(ArithmeticError):
    pass


@dataclass
class KeyMaterial:
    K_bob: np.ndarray
    K_alice: np.ndarray
    status: str
    seed_digest: str

    @property
    def agree(self) -> bool:
        return np.array_equal(self.K_bob, self.K_alice)


def _check(seed_bits, S, r):
    seed_bits = np.asarray(seed_bits, dtype=np.uint8)
    S = np.asarray(S, dtype=np.uint8)
    if r < 1:
        raise ValueError("r must be positive")
    if seed_bits.size != S.size + r - 1:
        raise ValueError(f"seed must have {S.size + r - 1} bits, got {seed_bits.size}")
    return seed_bits, S


def toeplitz_matrix(seed_bits, n: int, r: int) -> np.ndarray:
    seed_bits = np.asarray(seed_bits, dtype=np.uint8)
    col = seed_bits[:r]
    row = np.concatenate([seed_bits[:1], seed_bits[r:]])
    return toeplitz(col, row)


def toeplitz_hash_naive(seed_bits, S, r: int) -> np.ndarray:
    """Direct ``T S mod 2``; O(r n) reference."""
    seed_bits, S = _check(seed_bits, S, r)
    T = toeplitz_matrix(seed_bits, S.size, r).astype(np.int64)
    return ((T @ S.astype(np.int64)) & 1).astype(np.uint8)


def _circulant_product(c_def: np.ndarray, s_ext: np.ndarray) -> np.ndarray:
    L = len(c_def)
    prod = fft.irfft(fft.rfft(c_def.astype(float)) * fft.rfft(s_ext.astype(float)), n=L)
    counts = np.rint(prod)
    err = np.max(np.abs(prod - counts)) if L else 0.0
    if err >= ROUNDING_LIMIT:
        raise PrecisionError(f"FFT rounding error {err:.3f} too large")
    return counts.astype(np.int64)


def _fft_single(seed_bits, S, r):
    n = S.size
    # Circulant definition: first column, then the first row reversed. Zeros
    # inserted between the two give a larger circulant of fast FFT length
    # whose top-left r x n block is still T.
    L = fft.next_fast_len(n + r - 1, real=True)
    c_def = np.concatenate([seed_bits[:r], np.zeros(L - (n + r - 1), dtype=np.uint8),
                            seed_bits[r:][::-1]])
    s_ext = np.concatenate([S, np.zeros(L - n, dtype=np.uint8)])
    out = _circulant_product(c_def, s_ext)
    return (out[:r] & 1).astype(np.uint8)


def toeplitz_hash_fft(seed_bits, S, r: int, chunk: int = CHUNK) -> np.ndarray:
    """``T S mod 2`` through a circulant embedding and FFT convolution.

    Inputs longer than ``chunk`` bits are split column-wise; each column
    slice of ``T`` is again Toeplitz, and the partial products are summed
    mod 2. A slice whose rounding error reaches ``ROUNDING_LIMIT`` is split
    further.
    """
    seed_bits, S = _check(seed_bits, S, r)
    n = S.size
    key = np.zeros(r, dtype=np.uint8)
    start = 0
    while start < n:
        stop = min(n, start + chunk)
        # columns start..stop-1 use diagonals i - j in [-(stop-1), r-1-start]
        sub_seed = _column_slice_seed(seed_bits, r, start, stop)
        try:
            key ^= _fft_single(sub_seed, S[start:stop], r)
        except PrecisionError:
            if chunk <= 1024:
                raise
            key ^= toeplitz_hash_fft(sub_seed, S[start:stop], r, chunk // 4)
        start = stop
    return key


def _column_slice_seed(seed_bits, r, start, stop):
    """Seed of the Toeplitz submatrix ``T[:, start:stop]``."""
    # first column T[i, start]: diagonal i - start, negative for i < start
    k = min(start, r)
    col = np.concatenate([seed_bits[r + start - k:r + start][::-1], seed_bits[:r - k]])
    # rest of first row T[0, j], j = start+1 .. stop-1, lies on diagonals -j
    row = seed_bits[r + start:r + stop - 1]
    return np.concatenate([col, row])


def expand_seed(seed: int, length: int) -> np.ndarray:
    """Public Toeplitz seed: ``length`` bits from the counter-based Philox generator keyed by ``seed``."""
    gen = np.random.Generator(np.random.Philox(key=seed & ((1 << 64) - 1)))
    return gen.integers(0, 2, size=length, dtype=np.uint8)


def finalize_keys(S, S_hat, r: int, seed: int) -> KeyMaterial:
    """Compress both parties' strings with the same public Toeplitz matrix."""
    S = np.asarray(S, dtype=np.uint8)
    S_hat = np.asarray(S_hat, dtype=np.uint8)
    if S.shape != S_hat.shape:
        raise ValueError("S and S_hat must have equal length")
    empty = np.zeros(0, dtype=np.uint8)
    if r <= 0 or S.size == 0:
        return KeyMaterial(empty, empty, "no extractable key", "")
    seed_bits = expand_seed(seed, S.size + r - 1)
    digest = hashlib.sha256(np.packbits(seed_bits).tobytes()).hexdigest()
    K_bob = toeplitz_hash_fft(seed_bits, S, r)
    K_alice = toeplitz_hash_fft(seed_bits, S_hat, r)
    status = "ok" if np.array_equal(K_bob, K_alice) else "key mismatch"
    return KeyMaterial(K_bob, K_alice, status, digest)
