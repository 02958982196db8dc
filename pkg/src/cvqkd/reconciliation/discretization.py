"""Normalization, lattice discretization, top/bottom splitting and soft priors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr


class ReconciliationError(ValueError):
    pass


class CodeRateError(ReconciliationError):
    """Requested efficiency cannot be met by any code rate in (0, 1]."""


@dataclass(frozen=True)
class DiscretizationScheme:
    """Uniform lattice on [-alpha, alpha] with 2^p bins; end bins are unbounded."""

    alpha: float
    p: int
    q: int

    def __post_init__(self):
        if self.q > self.p or self.q < 1:
            raise ReconciliationError("need 1 <= q <= p")
        if self.alpha <= 0:
            raise ReconciliationError("alpha must be positive")

    @property
    def d(self) -> int:
        return self.p - self.q

    @property
    def n_bins(self) -> int:
        return 1 << self.p

    @property
    def delta(self) -> float:
        return 2 * self.alpha / self.n_bins

    def left_borders(self) -> np.ndarray:
        a = -self.alpha + np.arange(self.n_bins) * self.delta
        a[0] = -np.inf
        return a

    def right_borders(self) -> np.ndarray:
        b = -self.alpha + (np.arange(self.n_bins) + 1) * self.delta
        b[-1] = np.inf
        return b


def normalize(x, y):
    """Scale both records to unit empirical variance.

    Returns ``(X, Y, sigma_x, sigma_y)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx, sy = float(np.std(x)), float(np.std(y))
    if sx == 0 or sy == 0:
        raise ReconciliationError("cannot normalize a record with zero variance")
    return x / sx, y / sy, sx, sy


def discretize(Y, scheme: DiscretizationScheme) -> np.ndarray:
    """Bin index ``k`` with ``Y`` in ``[a_k, b_k)``."""
    # searching the border array keeps membership exact at bin edges
    inner = scheme.left_borders()[1:]
    return np.searchsorted(inner, np.asarray(Y, dtype=float), side="right").astype(np.int64)


def split(K, q: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Top ``q`` bits and bottom ``d`` bits of each symbol."""
    if d < 0:
        raise ReconciliationError("d must be non-negative")
    K = np.asarray(K, dtype=np.int64)
    bottom = K & ((1 << d) - 1)
    top = (K - bottom) >> d
    return top, bottom


def combine(top, bottom, d: int) -> np.ndarray:
    return (np.asarray(top, dtype=np.int64) << d) + np.asarray(bottom, dtype=np.int64)


def empirical_entropy(K) -> float:
    """Shannon entropy (bits) of the empirical symbol frequencies."""
    K = np.asarray(K).ravel()
    if K.size == 0:
        raise ReconciliationError("empty record")
    _, counts = np.unique(K, return_counts=True)
    f = counts / K.size
    return float(-(f * np.log2(f)).sum())


def approx_entropy(p: int, alpha: float) -> float:
    """Fine-lattice approximation ``p + log2(sqrt(pi e / 2) / alpha)`` for a unit Gaussian."""
    return p + math.log2(math.sqrt(math.pi * math.e / 2) / alpha)


def compute_code_rate(snr_hat: float, beta: float, p: int, q: int, H_K: float) -> float:
    """LDPC rate giving reconciliation efficiency ``beta``.

    :raises CodeRateError: when the rate falls outside (0, 1].
    """
    if not 0 < beta < 1:
        raise CodeRateError("beta must lie in (0, 1)")
    r = (beta / 2 * math.log2(1 + snr_hat) + p - H_K) / q
    if r > 1 or r <= 0:
        raise CodeRateError(
            f"code rate {r:.4f} outside (0, 1] for beta={beta}, snr={snr_hat:.3f}, p={p}, q={q}")
    return r


def a_priori_probabilities(X, K_bottom, rho: float, scheme: DiscretizationScheme,
                           floor: float = 1e-300) -> np.ndarray:
    """Prior over the ``2^q`` top symbols for each position.

    Row ``i`` is ``P(top | X_i, bottom_i)``: the Gaussian mass of bin
    ``top * 2^d + bottom_i`` under ``Y | X ~ N(rho X, 1 - rho^2)``, normalized
    over ``top``.
    """
    if rho**2 >= 1:
        raise ReconciliationError("|rho| must be below 1")
    X = np.asarray(X, dtype=float)
    K_bottom = np.asarray(K_bottom, dtype=np.int64)
    d = scheme.d
    tops = np.arange(1 << scheme.q)
    kappa = (tops[None, :] << d) + K_bottom[:, None]
    a = scheme.left_borders()[kappa]
    b = scheme.right_borders()[kappa]
    s = math.sqrt(1 - rho**2)
    mean = rho * X[:, None]
    lo = (a - mean) / s
    hi = (b - mean) / s
    # use the upper tail when the bin is right of the mean to avoid cancellation
    P = np.where(lo > 0, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))
    P = np.maximum(P, floor)
    return P / P.sum(axis=1, keepdims=True)


def symbols_to_bits(symbols, width: int) -> np.ndarray:
    """Big-endian binary expansion, ``width`` bits per symbol, as uint8."""
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()
