import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvqkd.privacy import (expand_seed, finalize_keys, toeplitz_hash_fft, toeplitz_hash_naive,
                           toeplitz_matrix)


def bits(rng, n):
    return rng.integers(0, 2, n, dtype=np.uint8)


def dense_oracle(seed, S, r):
    """T[i, j] written out entry by entry."""
    n = len(S)
    T = np.zeros((r, n), dtype=np.int64)
    for i in range(r):
        for j in range(n):
            T[i, j] = seed[i - j] if i >= j else seed[r - 1 + j - i]
    return (T @ S) % 2


def test_matrix_convention():
    rng = np.random.default_rng(0)
    seed = bits(rng, 9 + 4 - 1)
    T = toeplitz_matrix(seed, 9, 4)
    np.testing.assert_array_equal(T[:, 0], seed[:4])
    np.testing.assert_array_equal(T[0, 1:], seed[4:])
    S = bits(rng, 9)
    np.testing.assert_array_equal(toeplitz_hash_naive(seed, S, 4), dense_oracle(seed, S, 4))


def test_naive_examples():
    rng = np.random.default_rng(1)
    seed = bits(rng, 40)
    assert not toeplitz_hash_naive(seed, np.zeros(30, np.uint8), 11).any()
    assert toeplitz_hash_naive([1], [1], 1).tolist() == [1]
    T = toeplitz_matrix(seed, 30, 11)
    e = np.zeros(30, np.uint8)
    e[7] = 1
    np.testing.assert_array_equal(toeplitz_hash_naive(seed, e, 11), T[:, 7])
    with pytest.raises(ValueError):
        toeplitz_hash_naive(seed, e, 5)


@given(st.integers(1, 700), st.integers(1, 200), st.integers(0, 2**32 - 1), st.integers(1, 300))
def test_fft_equals_naive(n, r, seed, chunk):
    rng = np.random.default_rng(seed)
    sb, S = bits(rng, n + r - 1), bits(rng, n)
    ref = toeplitz_hash_naive(sb, S, r)
    np.testing.assert_array_equal(toeplitz_hash_fft(sb, S, r), ref)
    np.testing.assert_array_equal(toeplitz_hash_fft(sb, S, r, chunk=chunk), ref)


@given(st.integers(0, 2**32 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    n, r = 500, 60
    sb, a, b = bits(rng, n + r - 1), bits(rng, n), bits(rng, n)
    np.testing.assert_array_equal(toeplitz_hash_fft(sb, a ^ b, r),
                                  toeplitz_hash_fft(sb, a, r) ^ toeplitz_hash_fft(sb, b, r))


def test_seed_sensitivity():
    rng = np.random.default_rng(2)
    n, r = 4000, 200
    S = bits(rng, n)
    diffs = [np.sum(toeplitz_hash_fft(bits(rng, n + r - 1), S, r)
                    != toeplitz_hash_fft(bits(rng, n + r - 1), S, r)) for _ in range(100)]
    assert abs(np.mean(diffs) / (r / 2) - 1) < 0.1


def test_expand_seed_deterministic():
    np.testing.assert_array_equal(expand_seed(5, 100), expand_seed(5, 100))
    assert not np.array_equal(expand_seed(5, 100), expand_seed(6, 100))
    assert set(np.unique(expand_seed(7, 1000))) == {0, 1}


def test_finalize_keys():
    rng = np.random.default_rng(3)
    S = bits(rng, 3000)
    km = finalize_keys(S, S.copy(), 500, 42)
    assert km.status == "ok" and km.agree and km.K_bob.size == 500
    assert len(km.seed_digest) == 64
    flipped = S.copy()
    flipped[1234] ^= 1
    bad = finalize_keys(S, flipped, 500, 42)
    assert bad.status == "key mismatch" and not bad.agree
    assert 150 < np.sum(bad.K_bob != bad.K_alice) < 350
    empty = finalize_keys(S, S, 0, 42)
    assert empty.status == "no extractable key" and empty.K_bob.size == 0


def test_large_input_scaling():
    rng = np.random.default_rng(4)
    r = 1000
    times = []
    for n in (2**20, 2**22):
        sb, S = bits(rng, n + r - 1), bits(rng, n)
        best = np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            toeplitz_hash_fft(sb, S, r)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    assert times[1] / times[0] < 5
