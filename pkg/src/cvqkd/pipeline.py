"""End-to-end protocol run: simulation, PE, EC, PA and composable-rate accounting."""

from __future__ import annotations

import hashlib
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import channel, rates
from .channel import ConfigError, ProtocolConfig
from .estimation import (
    Estimates,
    early_termination_check,
    estimate,
    estimate_from_moments,
    select_pe_positions,
    worst_case_holevo,
)
from .gf import canonical_field
from .privacy import finalize_keys
from .reconciliation import (
    CodeRateError,
    ConstructionError,
    DecoderGraph,
    DiscretizationScheme,
    a_priori_probabilities,
    approx_entropy,
    build_parity_matrix,
    compute_code_rate,
    decode,
    discretize,
    ec_success_accounting,
    empirical_entropy,
    normalize,
    split,
    symbols_to_bits,
    syndrome,
    verify,
)

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_ABORT_PE = "aborted: I ≤ χ"
STATUS_BAD_RATE = "invalid code rate"
STATUS_NO_MU = "aborted: no positive asymptotic rate"


@dataclass
class BlockRecord:
    block_index: int
    K_top: np.ndarray
    K_bottom: np.ndarray
    syndrome: np.ndarray
    K_hat: np.ndarray
    smt_passed: bool
    ver_passed: bool
    fnd_rnd: int
    leak_bits: int

    def transcript(self) -> dict:
        digest = hashlib.sha256(self.syndrome.astype("<i8").tobytes()).hexdigest()[:16]
        return {
            "block_index": self.block_index,
            "syndrome_digest": digest,
            "fnd": self.smt_passed,
            "fnd_rnd": self.fnd_rnd,
            "smt_passed": self.smt_passed,
            "ver_passed": self.ver_passed,
            "leak_bits": self.leak_bits,
        }


@dataclass
class RunReport:
    status: str
    config: dict
    derived: dict | None = None
    estimates: dict | None = None
    rates: dict | None = None
    code: dict = field(default_factory=dict)
    blocks: list[dict] = field(default_factory=list)
    p_EC: float = 0.0
    FER: float = 1.0
    mean_fnd_rnd: float = float("nan")
    R: float = 0.0
    r: int = 0
    n_tilde: int = 0
    epsilon: float = float("nan")
    key_digest: str = ""
    toeplitz_seed: int | None = None
    toeplitz_seed_digest: str = ""
    key_status: str = "no key"
    timings: dict = field(default_factory=dict)
    K_bob: np.ndarray | None = field(default=None, repr=False)
    K_alice: np.ndarray | None = field(default=None, repr=False)

    @property
    def key_emitted(self) -> bool:
        return self.K_bob is not None and self.K_bob.size > 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("K_bob")
        d.pop("K_alice")
        return d


def _diagnostic(fn, *args, **kwargs) -> float:
    """Rate quantities that only feed the report; numerical breakdown gives NaN."""
    try:
        return fn(*args, **kwargs)
    except rates.NumericalError as exc:
        log.warning("%s not evaluated: %s", getattr(fn, "__name__", fn), exc)
        return math.nan


def _sub_seed(seed: int, stage: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(stage,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class _Timer:
    def __init__(self, timings):
        self.timings = timings

    def __call__(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.timings[name] = timer.timings.get(name, 0.0) + time.perf_counter() - self.t0

        return _Ctx()


def _reconcile_block(b, cfg, scheme, field_, graph, H, X, Y, rho, n):
    K = discretize(Y, scheme)
    top, bottom = split(K, cfg.q, scheme.d)
    sd = syndrome(field_, H, top)
    priors = a_priori_probabilities(X, bottom, rho, scheme)
    res = decode(graph, sd, priors, cfg.iter_max)
    if res.found:
        assert np.array_equal(syndrome(field_, H, res.K_hat), sd), "decoder returned a non-matching string"
        ver, _ = verify(symbols_to_bits(top, cfg.q), symbols_to_bits(res.K_hat, cfg.q), cfg.q,
                        cfg.eps_cor, channel.stage_rng(cfg.seed, channel.STAGE_HASH, b))
    else:
        ver = False
    return BlockRecord(
        block_index=b, K_top=top, K_bottom=bottom, syndrome=sd, K_hat=res.K_hat,
        smt_passed=res.found, ver_passed=bool(ver), fnd_rnd=res.found_round,
        leak_bits=H.l * cfg.q + n * scheme.d,
    )


def run_protocol(cfg: ProtocolConfig) -> RunReport:
    """Execute the full protocol for ``cfg`` and return its report."""
    cfg.validate()
    timings: dict[str, float] = {}
    timed = _Timer(timings)
    t_start = time.perf_counter()
    report = RunReport(status=STATUS_OK, config=cfg.to_dict(), timings=timings)

    T = channel.transmissivity(cfg.L, cfg.A)
    with timed("modulation"):
        if cfg.optimize_mu:
            mu = rates.optimal_modulation(cfg.beta, T, cfg.eta, cfg.xi, cfg.v_el)
            if mu is None:
                report.status = STATUS_NO_MU
                return report
        else:
            mu = channel.resolve_mu(cfg)
    d = channel.derive_params(cfg, mu)
    report.derived = d.to_dict()
    n, m = d.n, d.m

    with timed("simulation"):
        recs = [channel.simulate_block(cfg, mu, b) for b in range(cfg.n_bks)]
        x_all = np.concatenate([r.x for r in recs])
        y_all = np.concatenate([r.y for r in recs])
        del recs

    I_true = rates.mutual_information(d.snr)
    chi_true = _diagnostic(rates.holevo_bound, mu, d.T, cfg.eta, cfg.xi, cfg.v_el)
    R_asy = cfg.beta * I_true - chi_true

    with timed("parameter_estimation"):
        part = select_pe_positions(cfg.N * cfg.n_bks, cfg.pe_count,
                                   channel.stage_rng(cfg.seed, channel.STAGE_PE), n_blocks=cfg.n_bks)
        est_fn = estimate if cfg.pe_method == "regression" else estimate_from_moments
        est: Estimates = est_fn(x_all[part.pe_indices], y_all[part.pe_indices],
                                mu, cfg.eta, cfg.v_el, cfg.eps_pe)
        # T_M = 0 aborts without evaluating the bound at full loss; a bound that
        # cannot be evaluated certifies nothing and aborts as well
        chi_M = _diagnostic(worst_case_holevo, est, mu, cfg.eta, cfg.v_el) if est.T_M > 0 else math.nan
        proceed = math.isfinite(chi_M) and early_termination_check(est, mu, cfg.eta, cfg.v_el)
        I_hat = rates.mutual_information(est.snr_hat)
        R_M = cfg.beta * I_hat - chi_M
    report.estimates = est.report_dict()

    R_theo = _diagnostic(
        rates.theoretical_rate,
        beta=cfg.beta, p_ec=cfg.p_ec_guess, mu=mu, T=d.T, eta=cfg.eta, xi=cfg.xi,
        v_el=cfg.v_el, M=m * cfg.n_bks, n=n, N=cfg.N, p=cfg.p,
        eps_pe=cfg.eps_pe, eps_s=cfg.eps_s, eps_h=cfg.eps_h)
    partial_rates = dict(R_asy=R_asy, I_xy=I_true, chi_Ey=chi_true, I_xy_hat=I_hat,
                         chi_M=chi_M, R_M=R_M, R_theoretical=R_theo)
    report.rates = partial_rates

    if not proceed:
        report.status = STATUS_ABORT_PE
        report.timings["total"] = time.perf_counter() - t_start
        return report

    with timed("normalization"):
        key_idx = np.concatenate([k + b * cfg.N for b, k in enumerate(part.key_indices)])
        X_all, Y_all, _, _ = normalize(x_all[key_idx], y_all[key_idx])
        X_blocks = X_all.reshape(cfg.n_bks, n)
        Y_blocks = Y_all.reshape(cfg.n_bks, n)
        del x_all, y_all

    scheme = DiscretizationScheme(cfg.alpha, cfg.p, cfg.q)
    rho = est.rho_hat
    with timed("code_generation"):
        H_K = empirical_entropy(discretize(Y_all, scheme))
        report.code = {"H_K": H_K, "H_K_approx": approx_entropy(cfg.p, cfg.alpha), "rho_hat": rho}
        try:
            R_code = compute_code_rate(est.snr_hat, cfg.beta, cfg.p, cfg.q, H_K)
            if R_code >= 1:
                raise CodeRateError("code rate 1 leaves no parity checks")
            field_ = canonical_field(cfg.q)
            H = build_parity_matrix(n, R_code, field_,
                                    channel.stage_rng(cfg.seed, channel.STAGE_CODE))
        except (CodeRateError, ConstructionError) as exc:
            log.warning("code construction rejected: %s", exc)
            report.status = STATUS_BAD_RATE
            report.code["error"] = str(exc)
            report.timings["total"] = time.perf_counter() - t_start
            return report
        graph = DecoderGraph(H, field_)
        row_w = H.row_weights()
        report.code.update(R_code=R_code, R_code_realized=H.rate, l=H.l, n=H.n,
                           d_c_min=int(row_w.min()), d_c_max=int(row_w.max()))

    with timed("error_correction"):
        args = (cfg, scheme, field_, graph, H)

        def work(b):
            return _reconcile_block(b, *args, X_blocks[b], Y_blocks[b], rho, n)

        if cfg.workers > 1:
            with ThreadPoolExecutor(cfg.workers) as pool:
                blocks = list(pool.map(work, range(cfg.n_bks)))
        else:
            blocks = [work(b) for b in range(cfg.n_bks)]
    report.blocks = [blk.transcript() for blk in blocks]

    stats = ec_success_accounting([b.smt_passed for b in blocks], [b.ver_passed for b in blocks])
    report.p_EC, report.FER = stats.p_EC, stats.FER
    rounds = [b.fnd_rnd for b in blocks if b.ver_passed]
    report.mean_fnd_rnd = float(np.mean(rounds)) if rounds else float("nan")

    R_M_EC = H_K + H.rate * cfg.q - cfg.p - chi_M
    R, R_tilde = rates.composable_rate(R_M_EC, n, cfg.N, cfg.p, stats.p_EC, cfg.eps_s, cfg.eps_h)
    r = rates.key_length(stats.n_ok, n, R_tilde)
    n_tilde = stats.n_ok * n * cfg.p
    eps = rates.epsilon_total(stats.p_EC, cfg.eps_pe, cfg.eps_cor, cfg.eps_s, cfg.eps_h)
    report.R, report.r, report.n_tilde, report.epsilon = R, r, n_tilde, eps
    report.rates = rates.RateReport(
        **partial_rates, R_M_EC=R_M_EC, R_tilde=R_tilde, R_composable=R,
        r_key_bits=r, n_tilde=n_tilde, epsilon_total=eps, p_EC=stats.p_EC, FER=stats.FER,
    ).to_dict()

    if R > 0 and r > 0:
        with timed("privacy_amplification"):
            ok = [b for b in blocks if b.ver_passed]
            S = np.concatenate([np.concatenate([symbols_to_bits(b.K_top, cfg.q),
                                                symbols_to_bits(b.K_bottom, scheme.d)]) for b in ok])
            S_hat = np.concatenate([np.concatenate([symbols_to_bits(b.K_hat, cfg.q),
                                                    symbols_to_bits(b.K_bottom, scheme.d)]) for b in ok])
            assert S.size == n_tilde
            report.toeplitz_seed = _sub_seed(cfg.seed, channel.STAGE_PA)
            keys = finalize_keys(S, S_hat, r, report.toeplitz_seed)
        report.K_bob, report.K_alice = keys.K_bob, keys.K_alice
        report.key_status = keys.status
        report.toeplitz_seed_digest = keys.seed_digest
        report.key_digest = hashlib.sha256(np.packbits(keys.K_bob).tobytes()).hexdigest()
    else:
        report.key_status = "no extractable key"

    report.timings["total"] = time.perf_counter() - t_start
    return report


def rate_summary(cfg: ProtocolConfig) -> dict:
    """Rates from configured channel values only; no simulation."""
    T = channel.transmissivity(cfg.L, cfg.A)
    mu = rates.optimal_modulation(cfg.beta, T, cfg.eta, cfg.xi, cfg.v_el) if cfg.optimize_mu \
        else channel.resolve_mu(cfg)
    if mu is None:
        return {"status": STATUS_NO_MU}
    d = channel.derive_params(cfg, mu)
    I = rates.mutual_information(d.snr)
    chi = rates.holevo_bound(mu, d.T, cfg.eta, cfg.xi, cfg.v_el)
    H_K = approx_entropy(cfg.p, cfg.alpha)
    code_rate = (cfg.beta / 2 * math.log2(1 + d.snr) + cfg.p - H_K) / cfg.q
    return {
        "status": STATUS_OK,
        "derived": d.to_dict(),
        "I_xy": I,
        "chi_Ey": chi,
        "R_asy": cfg.beta * I - chi,
        "R_code_approx": code_rate,
        "d_c": 2 / (1 - code_rate) if code_rate < 1 else float("inf"),
        "R_theoretical": rates.theoretical_rate(
            beta=cfg.beta, p_ec=cfg.p_ec_guess, mu=mu, T=d.T, eta=cfg.eta, xi=cfg.xi,
            v_el=cfg.v_el, M=d.m * cfg.n_bks, n=d.n, N=cfg.N, p=cfg.p,
            eps_pe=cfg.eps_pe, eps_s=cfg.eps_s, eps_h=cfg.eps_h),
        "epsilon_bound": rates.epsilon_total(1.0, cfg.eps_pe, cfg.eps_cor, cfg.eps_s, cfg.eps_h),
    }
