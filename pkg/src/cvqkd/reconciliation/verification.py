"""Universal-hash verification of corrected blocks and EC success statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CHUNK_BITS = 32  # Q


@dataclass(frozen=True)
class HashFamily:
    """Public randomness of one verification: odd multipliers ``v`` and offset ``u``."""

    v: np.ndarray
    u: int
    out_bits: int  # Q*
    t: int


def hash_output_bits(eps_cor: float) -> int:
    return math.ceil(-math.log2(eps_cor))


def pad_symbols(n: int, q: int, Q: int = CHUNK_BITS) -> int:
    """Smallest ``s`` with ``(n + s) q`` divisible by ``Q``."""
    step = Q // math.gcd(q, Q)
    return (-n) % step


def bits_to_words(bits, q: int, Q: int = CHUNK_BITS) -> np.ndarray:
    """Pad a ``q``-bits-per-symbol string with whole zero symbols and pack into Q-bit words."""
    bits = np.asarray(bits, dtype=np.uint64)
    if bits.size % q:
        raise ValueError("bit string length must be a multiple of q")
    s = pad_symbols(bits.size // q, q, Q)
    bits = np.concatenate([bits, np.zeros(s * q, dtype=np.uint64)])
    weights = np.uint64(1) << np.arange(Q - 1, -1, -1, dtype=np.uint64)
    return (bits.reshape(-1, Q) * weights).sum(axis=1, dtype=np.uint64)


def draw_hash_family(n_words: int, t: int, rng: np.random.Generator,
                     Q: int = CHUNK_BITS) -> HashFamily:
    out_bits = Q + t - 1
    if out_bits > 63:
        raise ValueError("Q + t - 1 must fit in 63 bits")
    v = (rng.integers(0, 1 << (out_bits - 1), size=n_words, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    u = int(rng.integers(0, 1 << out_bits, dtype=np.uint64))
    return HashFamily(v, u, out_bits, t)


def multiply_add_hash(words: np.ndarray, fam: HashFamily) -> int:
    """Top ``t`` bits of ``(sum v_i x_i + u) mod 2^Q*``."""
    mask = np.uint64((1 << fam.out_bits) - 1)
    acc = (fam.v * words).sum(dtype=np.uint64) & mask  # wraps mod 2^64 first
    h = (int(acc) + fam.u) & int(mask)
    return h >> (fam.out_bits - fam.t)


def verify(bob_bits, alice_bits, q: int, eps_cor: float,
           rng: np.random.Generator, t: int | None = None) -> tuple[bool, int]:
    """Compare t-bit hashes of Bob's and Alice's binary top strings.

    Returns ``(passed, t)``.
    """
    if t is None:
        t = hash_output_bits(eps_cor)
    bob = bits_to_words(bob_bits, q)
    alice = bits_to_words(alice_bits, q)
    if bob.shape != alice.shape:
        raise ValueError("strings must have equal length")
    fam = draw_hash_family(len(bob), t, rng)
    return multiply_add_hash(bob, fam) == multiply_add_hash(alice, fam), t


@dataclass
class EcStatistics:
    p_SMT: float
    p_ver: float
    p_EC: float
    FER: float
    n_blocks: int
    n_ok: int


def ec_success_accounting(smt_passed, ver_passed) -> EcStatistics:
    """Block success frequencies; ``p_ver`` is conditional on passing SMT."""
    smt = np.asarray(smt_passed, dtype=bool)
    ver = np.asarray(ver_passed, dtype=bool) & smt
    if smt.size == 0:
        raise ValueError("need at least one block")
    n_smt = int(smt.sum())
    n_ok = int(ver.sum())
    p_smt = n_smt / smt.size
    p_ver = n_ok / n_smt if n_smt else 0.0
    p_ec = p_smt * p_ver
    return EcStatistics(p_smt, p_ver, p_ec, 1 - p_ec, int(smt.size), n_ok)
