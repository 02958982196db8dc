"""Finite-size parameter estimation from the sacrificed (x, y) pairs."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .channel import ConfigError
from .rates import confidence_factor, correlation_from_snr, holevo_from_estimates, mutual_information


class EstimationError(ValueError):
    pass


@dataclass
class Estimates:
    tau_hat: float
    sigma_z2_hat: float
    T_hat: float
    Xi_hat: float
    T_M: float
    Xi_M: float
    snr_hat: float
    rho_hat: float
    w: float
    m_used: int
    method: str = "regression"

    def to_dict(self) -> dict:
        return asdict(self)

    def report_dict(self) -> dict:
        keys = ("tau_hat", "T_hat", "Xi_hat", "T_M", "Xi_M", "snr_hat", "w", "m_used")
        return {k: getattr(self, k) for k in keys}


@dataclass
class PePartition:
    pe_indices: np.ndarray
    key_indices: list[np.ndarray]
    block_size: int

    @property
    def M(self) -> int:
        return len(self.pe_indices)


def select_pe_positions(total: int, M: int, rng: np.random.Generator,
                        n_blocks: int | None = None) -> PePartition:
    """Pick PE positions (0-based) uniformly without replacement.

    With ``n_blocks`` the record is ``n_blocks`` consecutive blocks and exactly
    ``M // n_blocks`` positions are drawn inside each block, so every block
    keeps the same number of key points. The ``M % n_blocks`` remainder is not
    drawn. Without it, ``M`` positions are drawn from the whole record and the
    whole record is treated as one block.
    """
    if M < 0 or M >= total:
        raise ConfigError(f"need 0 <= M < total, got M={M}, total={total}")
    if n_blocks is None:
        pe = np.sort(rng.choice(total, size=M, replace=False))
        mask = np.ones(total, dtype=bool)
        mask[pe] = False
        return PePartition(pe, [np.flatnonzero(mask)], total)

    if total % n_blocks:
        raise ConfigError("total must be a multiple of n_blocks")
    N = total // n_blocks
    m = M // n_blocks
    pe_all, keys = [], []
    for blk in range(n_blocks):
        local = np.sort(rng.choice(N, size=m, replace=False))
        mask = np.ones(N, dtype=bool)
        mask[local] = False
        pe_all.append(local + blk * N)
        keys.append(np.flatnonzero(mask))
    return PePartition(np.concatenate(pe_all), keys, N)


def _estimated_snr(mu, eta, v_el, T_hat, Xi_hat):
    noise = 1 + v_el + Xi_hat
    if noise <= 0:
        return math.inf  # noiseless fit
    return max((mu - 1) * eta * T_hat / noise, 0.0)


def estimate(x, y, mu: float, eta: float, v_el: float, eps_pe: float) -> Estimates:
    """Maximum-likelihood estimators and their worst-case values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = len(x)
    if m < 2 or len(y) != m:
        raise EstimationError("need at least two (x, y) pairs of equal length")
    if mu <= 1:
        raise EstimationError("estimation needs mu > 1")
    sxx = float(np.dot(x, x))
    if sxx == 0:
        raise EstimationError("sum of x^2 vanishes")
    tau = float(np.dot(x, y)) / sxx
    resid = y - tau * x
    sz2 = float(np.dot(resid, resid)) / m

    w = confidence_factor(eps_pe)
    d_tau = w * math.sqrt(sz2 / (m * (mu - 1)))
    d_sigma = w * sz2 * math.sqrt(2) / math.sqrt(m)
    T_hat = tau**2 / eta
    Xi_hat = sz2 - 1 - v_el
    low = tau - d_tau
    if low < 0:
        warnings.warn("worst-case transmissivity clamped at 0")
        low = 0.0
    snr = _estimated_snr(mu, eta, v_el, T_hat, Xi_hat)
    return Estimates(
        tau_hat=tau, sigma_z2_hat=sz2, T_hat=T_hat, Xi_hat=Xi_hat,
        T_M=low**2 / eta, Xi_M=Xi_hat + d_sigma,
        snr_hat=snr, rho_hat=correlation_from_snr(snr), w=w, m_used=m,
    )


def estimate_from_moments(x, y, mu: float, eta: float, v_el: float, eps_pe: float) -> Estimates:
    """Covariance-based estimators with Gaussian-approximation worst cases.

    ``sigma_x^2`` is the configured ``mu - 1``. The transmissivity estimator
    is ``C_xy^2 / (eta sigma_x^4)``, which is the unbiased form whose variance
    ``(4/m) T^2 (2 + sigma_z^2 / (eta T sigma_x^2))`` is used for the bound.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = len(x)
    if m < 2 or len(y) != m:
        raise EstimationError("need at least two (x, y) pairs of equal length")
    if mu <= 1:
        raise EstimationError("estimation needs mu > 1")
    if not np.any(x):
        raise EstimationError("sum of x^2 vanishes")
    var_x = mu - 1
    c_xy = float(np.dot(x, y)) / m
    tau = c_xy / var_x
    T_hat = tau**2 / eta
    resid = y - tau * x
    sz2 = float(np.dot(resid, resid)) / m

    w = confidence_factor(eps_pe)
    Xi_hat = sz2 - 1 - v_el
    if T_hat > 0:
        sigma_T = math.sqrt(4 / m * T_hat**2 * (2 + sz2 / (eta * T_hat * var_x)))
    else:
        sigma_T = 0.0
    sigma_Xi = math.sqrt(2 / m) * sz2
    T_M = T_hat - w * sigma_T
    if T_M < 0:
        warnings.warn("worst-case transmissivity clamped at 0")
        T_M = 0.0
    snr = _estimated_snr(mu, eta, v_el, T_hat, Xi_hat)
    return Estimates(
        tau_hat=tau, sigma_z2_hat=sz2, T_hat=T_hat, Xi_hat=Xi_hat,
        T_M=T_M, Xi_M=Xi_hat + w * sigma_Xi,
        snr_hat=snr, rho_hat=correlation_from_snr(snr), w=w, m_used=m,
        method="moments",
    )


def worst_case_holevo(est: Estimates, mu: float, eta: float, v_el: float) -> float:
    return holevo_from_estimates(mu, est.T_M, est.Xi_M, eta, v_el)


def early_termination_check(est: Estimates, mu: float, eta: float, v_el: float) -> bool:
    """True when the estimated mutual information beats the worst-case Holevo bound."""
    if est.T_M <= 0:
        return False
    return mutual_information(est.snr_hat) > worst_case_holevo(est, mu, eta, v_el)
