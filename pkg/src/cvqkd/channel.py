"""Prepare-and-measure simulation of the Gaussian-modulated coherent-state link.

All quadrature values are in shot-noise units (vacuum variance 1). Gaussian
draws come from numpy's PCG64 generator with its ziggurat normal sampler, so a
given seed reproduces the same stream on every platform numpy supports.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

# sub-stream identifiers for the seed expansion scheme (see ``stage_rng``)
STAGE_PREPARE = 0
STAGE_CHANNEL = 1
STAGE_PE = 2
STAGE_CODE = 3
STAGE_HASH = 4
STAGE_PA = 5


class ConfigError(ValueError):
    """Invalid protocol configuration."""


@dataclass
class ProtocolConfig:
    """Protocol inputs (channel, detector, block, epsilon and code parameters).

    Exactly one of ``mu`` or ``snr`` fixes the modulation; ``mu="optimize"``
    requests a search for the asymptotically optimal modulation.
    ``M`` is the total PE count; when ``None`` it is ``pe_fraction * n_bks * N``.
    """

    L: float = 5.0
    A: float = 0.2
    xi: float = 0.01
    eta: float = 0.8
    v_el: float = 0.1
    beta: float = 0.9225
    n_bks: int = 10
    N: int = 200_000
    M: int | None = None
    p: int = 6
    q: int = 4
    alpha: float = 7.0
    iter_max: int = 100
    eps_pe: float = 2.0**-32
    eps_s: float = 2.0**-32
    eps_h: float = 2.0**-32
    eps_cor: float = 2.0**-32
    mu: float | str | None = None
    snr: float | None = 12.0
    seed: int = 12345
    pe_fraction: float = 0.1
    pe_method: str = "regression"
    p_ec_guess: float = 0.99
    workers: int = 1

    def __post_init__(self):
        self.validate()

    @property
    def pe_count(self) -> int:
        if self.M is not None:
            return int(self.M)
        return int(round(self.pe_fraction * self.n_bks * self.N))

    @property
    def optimize_mu(self) -> bool:
        return isinstance(self.mu, str) and self.mu == "optimize"

    def replace(self, **changes) -> "ProtocolConfig":
        data = asdict(self)
        data.update(changes)
        return ProtocolConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.L >= 0, "L must be non-negative")
        need(self.A >= 0, "A must be non-negative")
        need(self.xi >= 0, "xi must be non-negative")
        need(0 < self.eta <= 1, "eta must lie in (0, 1]")
        need(self.v_el >= 0, "v_el must be non-negative")
        need(0 < self.beta < 1, "beta must lie in (0, 1)")
        need(self.n_bks >= 1, "n_bks must be at least 1")
        need(self.N >= 2, "N must be at least 2")
        need(1 <= self.q <= 8, "q must lie in [1, 8]")
        need(self.q <= self.p, "q must not exceed p")
        need(self.alpha >= 3, "alpha must be at least 3")
        need(self.iter_max >= 1, "iter_max must be at least 1")
        for name in ("eps_pe", "eps_s", "eps_h", "eps_cor"):
            need(0 < getattr(self, name) < 1, f"{name} must lie in (0, 1)")
        need(0 < self.pe_count < self.N * self.n_bks,
             "M must satisfy 0 < M < N * n_bks")
        need(self.pe_method in ("regression", "moments"),
             "pe_method must be 'regression' or 'moments'")
        need(0 < self.p_ec_guess <= 1, "p_ec_guess must lie in (0, 1]")
        need(self.workers >= 1, "workers must be at least 1")
        if isinstance(self.mu, str):
            need(self.mu == "optimize", f"unknown mu flag {self.mu!r}")
        elif self.mu is not None:
            need(self.mu >= 1, "mu must be at least 1")
            need(self.snr is None, "give either mu or snr, not both")
        else:
            need(self.snr is not None, "one of mu or snr is required")
            need(self.snr >= 0, "snr must be non-negative")


CONFIG_FIELDS = {f.name for f in fields(ProtocolConfig)}


@dataclass
class DerivedParams:
    T: float
    sigma_z2: float
    Xi: float
    omega: float
    chi_noise: float
    mu: float
    snr: float
    rho: float
    m: int
    n: int
    delta: float
    d: int
    t: int
    gf_order: int

    def to_dict(self) -> dict:
        return asdict(self)


def transmissivity(L: float, A: float) -> float:
    return 10.0 ** (-A * L / 10.0)


def thermal_noise(T: float, xi: float) -> float:
    """Thermal variance of the environment; 1 for a lossless channel."""
    if T >= 1.0:
        return 1.0
    return (T * xi - T + 1.0) / (1.0 - T)


def equivalent_noise(T: float, eta: float, xi: float, v_el: float) -> float:
    return xi + (1.0 + v_el) / (T * eta)


def mu_for_snr(snr: float, T: float, eta: float, xi: float, v_el: float) -> float:
    return 1.0 + snr * equivalent_noise(T, eta, xi, v_el)


def resolve_mu(cfg: ProtocolConfig) -> float:
    """Modulation variance implied by ``cfg`` (not handling "optimize")."""
    if cfg.optimize_mu:
        raise ConfigError("mu='optimize' must be resolved by the rate optimizer")
    if cfg.mu is not None:
        return float(cfg.mu)
    T = transmissivity(cfg.L, cfg.A)
    return mu_for_snr(cfg.snr, T, cfg.eta, cfg.xi, cfg.v_el)


def derive_params(cfg: ProtocolConfig, mu: float | None = None) -> DerivedParams:
    """Dependent quantities of a configuration.

    Per-block PE count ``m`` is ``floor(M / n_bks)``; any remainder of ``M``
    is left unused.
    """
    if mu is None:
        mu = resolve_mu(cfg)
    if mu < 1:
        raise ConfigError("mu must be at least 1")
    T = transmissivity(cfg.L, cfg.A)
    if T * cfg.eta <= 0:
        raise ConfigError("channel transmits nothing (T * eta underflows)")
    Xi = cfg.eta * T * cfg.xi
    sigma_z2 = 1.0 + cfg.v_el + Xi
    chi_noise = equivalent_noise(T, cfg.eta, cfg.xi, cfg.v_el)
    snr = (mu - 1.0) / chi_noise
    m = cfg.pe_count // cfg.n_bks
    n = cfg.N - m
    if n <= 0:
        raise ConfigError("no key-generation points left per block (N <= M / n_bks)")
    return DerivedParams(
        T=T,
        sigma_z2=sigma_z2,
        Xi=Xi,
        omega=thermal_noise(T, cfg.xi),
        chi_noise=chi_noise,
        mu=mu,
        snr=snr,
        rho=math.sqrt(snr / (1.0 + snr)),
        m=m,
        n=n,
        delta=cfg.alpha / 2 ** (cfg.p - 1),
        d=cfg.p - cfg.q,
        t=math.ceil(-math.log2(cfg.eps_cor)),
        gf_order=2**cfg.q,
    )


def stage_rng(seed: int, stage: int, index: int = 0) -> np.random.Generator:
    """Independent generator for ``(stage, index)`` derived from the master seed.

    Uses ``SeedSequence(seed, spawn_key=(stage, index))`` feeding PCG64.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(stage, index))
    return np.random.Generator(np.random.PCG64(ss))


def prepare_states(mu: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Alice's symbols, i.i.d. N(0, mu - 1)."""
    if mu < 1:
        raise ConfigError("mu must be at least 1")
    return math.sqrt(mu - 1.0) * rng.standard_normal(count)


def transmit_and_measure(x: np.ndarray, T: float, eta: float, xi: float,
                         v_el: float, rng: np.random.Generator) -> np.ndarray:
    """Bob's homodyne outcomes ``y = sqrt(T eta) x + z``, z ~ N(0, 1 + v_el + eta T xi)."""
    sigma_z2 = 1.0 + v_el + eta * T * xi
    z = math.sqrt(sigma_z2) * rng.standard_normal(len(x))
    return math.sqrt(T * eta) * x + z


@dataclass
class QuadratureRecord:
    x: np.ndarray
    y: np.ndarray
    block_index: int

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have equal length")


def simulate_block(cfg: ProtocolConfig, mu: float, block_index: int) -> QuadratureRecord:
    """One block of N channel uses, reproducible from ``(cfg.seed, block_index)``."""
    T = transmissivity(cfg.L, cfg.A)
    x = prepare_states(mu, cfg.N, stage_rng(cfg.seed, STAGE_PREPARE, block_index))
    y = transmit_and_measure(x, T, cfg.eta, cfg.xi, cfg.v_el,
                             stage_rng(cfg.seed, STAGE_CHANNEL, block_index))
    return QuadratureRecord(x, y, block_index)


def dump_samples(path, record: QuadratureRecord, fmt: str = "binary") -> Path:
    """Write ``(x, y)`` pairs of a block.

    ``binary``: interleaved little-endian float64 ``x0 y0 x1 y1 ...``.
    ``csv``: header ``x,y`` then one pair per line.
    """
    path = Path(path)
    pairs = np.column_stack([record.x, record.y])
    if fmt == "binary":
        pairs.astype("<f8").tofile(path)
    elif fmt == "csv":
        np.savetxt(path, pairs, delimiter=",", header="x,y", comments="", fmt="%.17g")
    else:
        raise ValueError(f"unknown sample format {fmt!r}")
    return path


def load_samples(path, fmt: str = "binary", block_index: int = 0) -> QuadratureRecord:
    path = Path(path)
    if fmt == "binary":
        pairs = np.fromfile(path, dtype="<f8").reshape(-1, 2)
    elif fmt == "csv":
        pairs = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    else:
        raise ValueError(f"unknown sample format {fmt!r}")
    return QuadratureRecord(pairs[:, 0].copy(), pairs[:, 1].copy(), block_index)
