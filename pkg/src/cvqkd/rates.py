"""Information-theoretic quantities for the coherent-state homodyne protocol.

Mutual information, Gaussian covariance matrices of the entangling-cloner
purification, symplectic spectra, the Holevo bound on Bob's outcome, the
asymptotic and composable finite-size key rates and epsilon accounting.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize, special

I2 = np.eye(2)
Z2 = np.diag([1.0, -1.0])
PI2 = np.diag([1.0, 0.0])

MU_SEARCH_MAX = 200.0


class NumericalError(ArithmeticError):
    """Unphysical covariance matrix or failed spectral computation."""


def mutual_information(snr: float) -> float:
    if snr < 0:
        raise ValueError("snr must be non-negative")
    return 0.5 * math.log2(1.0 + snr)


def correlation_from_snr(snr: float) -> float:
    if math.isinf(snr):
        return 1.0
    return math.sqrt(snr / (1.0 + snr))


def confidence_factor(eps_pe: float) -> float:
    """``w = sqrt(2) erfinv(1 - eps_pe)``, evaluated as ``sqrt(2) erfcinv(eps_pe)``."""
    if not 0 < eps_pe <= 1:
        raise ValueError("eps_pe must lie in (0, 1]")
    return math.sqrt(2.0) * float(special.erfcinv(eps_pe))


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def von_neumann_h(nu: float, tol: float = 1e-9) -> float:
    """Entropy of a thermal mode with symplectic eigenvalue ``nu`` (bits)."""
    if nu < 1.0 - tol:
        raise ValueError(f"symplectic eigenvalue {nu} < 1")
    nu = max(nu, 1.0)
    return _xlog2x((nu + 1) / 2) - _xlog2x((nu - 1) / 2)


def symplectic_spectrum_2mode(V: np.ndarray, tol: float = 1e-9) -> tuple[float, float]:
    """Symplectic eigenvalues ``(nu_plus, nu_minus)`` of a 4x4 two-mode CM.

    Closed form: ``nu^2 = (D +- sqrt(D^2 - 4 det V)) / 2`` with
    ``D = det A + det B + 2 det C`` for ``V = [[A, C], [C^T, B]]``.
    """
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise NumericalError("expected a 4x4 covariance matrix")
    A, B, C = V[:2, :2], V[2:, 2:], V[:2, 2:]
    delta = np.linalg.det(A) + np.linalg.det(B) + 2 * np.linalg.det(C)
    det_v = np.linalg.det(V)
    disc = delta**2 - 4 * det_v
    scale = max(1.0, delta**2)
    if disc < -tol * scale:
        raise NumericalError(f"negative discriminant {disc}")
    root = math.sqrt(max(disc, 0.0))
    nu_p2 = (delta + root) / 2
    nu_m2 = (delta - root) / 2
    if nu_m2 < 0:
        # cancellation for huge delta; use det V = nu+^2 nu-^2 instead
        nu_m2 = det_v / nu_p2
    return math.sqrt(nu_p2), math.sqrt(max(nu_m2, 0.0))


def tmsv_cm(omega: float) -> np.ndarray:
    """CM of a two-mode squeezed vacuum with local variance ``omega``."""
    s = math.sqrt(max(omega**2 - 1.0, 0.0))
    return np.block([[omega * I2, s * Z2], [s * Z2, omega * I2]])


@dataclass(frozen=True)
class CmSymbols:
    """Entries of the joint CM of Alice's reference, Bob and Eve's two modes."""

    mu: float
    b: float
    c: float
    gamma: float
    zeta: float
    theta: float
    psi: float
    phi: float
    omega: float


def cm_symbols(mu: float, T: float, eta: float, xi: float, v_el: float) -> CmSymbols:
    omega = (T * xi) / (1 - T) + 1.0
    return CmSymbols(
        mu=mu,
        b=T * eta * (mu + xi) + 1 - T * eta + v_el,
        c=math.sqrt(T * eta * (mu**2 - 1)),
        gamma=math.sqrt(eta * (1 - T) * (omega**2 - 1)),
        zeta=-math.sqrt((1 - T) * (mu**2 - 1)),
        theta=math.sqrt(eta * T * (1 - T)) * (omega - mu),
        psi=math.sqrt(T * (omega**2 - 1)),
        phi=T * omega + (1 - T) * mu,
        omega=omega,
    )


def global_cm(mu, T, eta, xi, v_el) -> np.ndarray:
    """8x8 CM of modes (A', B, e, E')."""
    s = cm_symbols(mu, T, eta, xi, v_el)
    O = np.zeros((2, 2))
    return np.block([
        [s.mu * I2, s.c * Z2, O, s.zeta * Z2],
        [s.c * Z2, s.b * I2, s.gamma * Z2, s.theta * I2],
        [O, s.gamma * Z2, s.omega * I2, s.psi * Z2],
        [s.zeta * Z2, s.theta * I2, s.psi * Z2, s.phi * I2],
    ])


def eve_cms(mu, T, eta, xi, v_el) -> tuple[np.ndarray, np.ndarray]:
    """Eve's CM ``V_eE'`` and its conditional form given Bob's homodyne outcome."""
    s = cm_symbols(mu, T, eta, xi, v_el)
    V = np.block([[s.omega * I2, s.psi * Z2], [s.psi * Z2, s.phi * I2]])
    C = np.hstack([s.gamma * Z2, s.theta * I2])
    # pseudo-inverse of Pi (b I) Pi is Pi / b
    V_cond = V - C.T @ PI2 @ C / s.b
    return V, V_cond


def holevo_bound(mu: float, T: float, eta: float, xi: float, v_el: float) -> float:
    """Eve's Holevo information on Bob's homodyne outcome, bits per use."""
    if T >= 1.0 or mu <= 1.0:
        return 0.0
    V, V_cond = eve_cms(mu, T, eta, xi, v_el)
    nus = symplectic_spectrum_2mode(V)
    nus_c = symplectic_spectrum_2mode(V_cond)
    for nu in (*nus, *nus_c):
        if nu < 1 - 1e-7:
            raise NumericalError(f"unphysical CM, symplectic eigenvalue {nu}")
    chi = sum(von_neumann_h(v) for v in nus) - sum(von_neumann_h(v) for v in nus_c)
    return max(chi, 0.0)


def holevo_from_estimates(mu: float, T: float, Xi: float, eta: float, v_el: float) -> float:
    """Holevo bound at a transmissivity / excess-noise-variance pair.

    ``Xi = eta T xi`` is mapped back to ``xi``. ``T = 0`` means total loss:
    Bob's outcome is then pure noise and Eve holds all of Alice's signal, so
    the conditional state carries nothing more and the bound is the entropy
    Eve's modes hold about Alice's ensemble. This is evaluated at a tiny T.
    """
    T = max(T, 1e-12)
    if T >= 1.0:
        return 0.0
    xi = Xi / (eta * T)
    return holevo_bound(mu, T, eta, max(xi, 0.0), v_el)


def snr_value(mu: float, T: float, eta: float, xi: float, v_el: float) -> float:
    return (mu - 1.0) / (xi + (1.0 + v_el) / (T * eta))


def asymptotic_rate(beta: float, mu: float, eta: float, v_el: float, T: float, xi: float) -> float:
    """``beta I(x:y) - chi(E:y)`` for known channel parameters."""
    return beta * mutual_information(snr_value(mu, T, eta, xi, v_el)) \
        - holevo_bound(mu, T, eta, xi, v_el)


def optimal_modulation(beta: float, T: float, eta: float, xi: float, v_el: float,
                       mu_max: float = MU_SEARCH_MAX, xtol: float = 1e-3) -> float | None:
    """Modulation maximizing the asymptotic rate on ``[1, mu_max]``.

    Returns ``None`` when no positive rate exists anywhere on the interval.
    """
    def f(mu):
        return asymptotic_rate(beta, mu, eta, v_el, T, xi)

    res = optimize.minimize_scalar(lambda mu: -f(mu), bounds=(1.0, mu_max),
                                   method="bounded", options={"xatol": xtol})
    best_mu, best = float(res.x), -float(res.fun)
    # bounded Brent stops just short of an endpoint optimum
    if f(mu_max) >= best:
        best_mu, best = mu_max, f(mu_max)
    if best <= 0:
        return None
    return best_mu


def delta_aep(p: int, p_ec: float, eps_s: float) -> float:
    return 4 * math.log2(2 ** (1 + p / 2) + 1) * math.sqrt(math.log2(18 / (p_ec**2 * eps_s**4)))


def theta_term(p_ec: float, eps_s: float, eps_h: float) -> float:
    # read as 2 log2(sqrt(2) eps_h)
    return math.log2(p_ec * (1 - eps_s**2 / 3)) + 2 * math.log2(math.sqrt(2) * eps_h)


def composable_rate(R_M_EC: float, n: int, N: int, p: int, p_ec: float,
                    eps_s: float, eps_h: float) -> tuple[float, float]:
    """Composable rate ``R`` (bits/use) and the per-key-point rate ``R_tilde``.

    With no surviving blocks both are 0.
    """
    if not 0 <= p_ec <= 1:
        raise ValueError("p_ec must lie in [0, 1]")
    if n > N:
        raise ValueError("n must not exceed N")
    if p_ec == 0:
        return 0.0, 0.0
    r_tilde = R_M_EC - delta_aep(p, p_ec, eps_s) / math.sqrt(n) + theta_term(p_ec, eps_s, eps_h) / n
    return n * p_ec / N * r_tilde, r_tilde


def key_length(n_ok_blocks: int, n: int, r_tilde: float) -> int:
    """Final key length ``floor(p_EC n_bks n R_tilde)``, clamped at 0."""
    return max(0, math.floor(n_ok_blocks * n * r_tilde))


def worst_case_theoretical(T: float, Xi: float, sigma_z2: float, M: int, eta: float,
                           mu: float, w: float) -> tuple[float, float]:
    """Mean-value worst-case estimators ``(T*_M, Xi*_M)``."""
    root = math.sqrt(T) - w * math.sqrt(sigma_z2 / (M * eta * (mu - 1)))
    if root < 0:
        warnings.warn("theoretical worst-case transmissivity clamped at 0")
        root = 0.0
    return root**2, Xi + w * sigma_z2 * math.sqrt(2.0 / M)


def theoretical_rate(*, beta: float, p_ec: float, mu: float, T: float, eta: float,
                     xi: float, v_el: float, M: int, n: int, N: int, p: int,
                     eps_pe: float, eps_s: float, eps_h: float) -> float:
    """Composable rate predicted from true channel values and guessed (beta, p_EC)."""
    Xi = eta * T * xi
    sigma_z2 = 1 + v_el + Xi
    w = confidence_factor(eps_pe)
    T_star, Xi_star = worst_case_theoretical(T, Xi, sigma_z2, M, eta, mu, w)
    r_star = beta * mutual_information(snr_value(mu, T, eta, xi, v_el)) \
        - holevo_from_estimates(mu, T_star, Xi_star, eta, v_el)
    return composable_rate(r_star, n, N, p, p_ec, eps_s, eps_h)[0]


def epsilon_total(p_ec: float, eps_pe: float, eps_cor: float, eps_s: float, eps_h: float) -> float:
    # fsum keeps the total correctly rounded
    return math.fsum((p_ec * eps_pe, eps_cor, eps_s, eps_h))


@dataclass
class RateReport:
    R_asy: float
    I_xy: float
    chi_Ey: float
    I_xy_hat: float
    chi_M: float
    R_M: float
    R_M_EC: float
    R_tilde: float
    R_composable: float
    R_theoretical: float
    r_key_bits: int
    n_tilde: int
    epsilon_total: float
    p_EC: float
    FER: float

    def to_dict(self) -> dict:
        return asdict(self)
