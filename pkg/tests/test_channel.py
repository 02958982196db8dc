import math

import numpy as np
import pytest

from cvqkd import channel
from cvqkd.channel import ConfigError, ProtocolConfig, derive_params


def test_derived_table_values():
    d = derive_params(ProtocolConfig())
    assert d.T == pytest.approx(10**-0.1, rel=1e-12)
    assert d.T == pytest.approx(0.79433, abs=1e-5)
    assert d.chi_noise == pytest.approx(0.01 + 1.1 / (0.8 * 10**-0.1), rel=1e-12)
    assert d.chi_noise == pytest.approx(1.74103, abs=1e-5)
    assert d.mu == pytest.approx(21.892, abs=1e-3)
    assert d.snr == pytest.approx(12.0, rel=1e-12)
    assert d.delta == 0.21875
    assert (d.m, d.n, d.d, d.t, d.gf_order) == (20000, 180000, 2, 32, 16)
    assert d.rho == pytest.approx(math.sqrt(12 / 13))


def test_mu_gives_snr():
    cfg = ProtocolConfig(mu=21.892, snr=None)
    assert derive_params(cfg).snr == pytest.approx(12.0, abs=1e-3)


def test_lossless_omega():
    cfg = ProtocolConfig(L=0, snr=None, mu=5.0)
    assert derive_params(cfg).omega == 1.0
    assert channel.thermal_noise(0.5, 0.1) == pytest.approx((0.05 - 0.5 + 1) / 0.5)


@pytest.mark.parametrize("bad", [
    dict(alpha=2), dict(q=7, p=6), dict(beta=1.0), dict(eps_s=0), dict(M=2_000_000),
    dict(mu=0.5, snr=None), dict(mu=20.0), dict(pe_method="other"),
])
def test_invariants_rejected(bad):
    with pytest.raises(ConfigError):
        ProtocolConfig(**bad)


def test_no_key_points():
    # M / n_bks == N leaves nothing
    cfg = ProtocolConfig(N=100, n_bks=2, M=199)
    assert derive_params(cfg).n == 1
    with pytest.raises(ConfigError):
        ProtocolConfig(N=100, n_bks=2, M=200)


def test_prepare_states():
    rng = np.random.default_rng(1)
    assert not np.any(channel.prepare_states(1.0, 100, rng))
    x = channel.prepare_states(21.89, 10**6, np.random.default_rng(2))
    assert abs(x.var() / 20.89 - 1) < 0.01
    a = channel.prepare_states(5, 50, channel.stage_rng(7, 0))
    b = channel.prepare_states(5, 50, channel.stage_rng(7, 0))
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ConfigError):
        channel.prepare_states(0.9, 3, rng)


def test_vacuum_floor():
    rng = np.random.default_rng(3)
    x = channel.prepare_states(10, 10**6, rng)
    y = channel.transmit_and_measure(x, 1.0, 1.0, 0.0, 0.0, rng)
    assert abs((y - x).var() - 1) < 0.01


def test_full_loss_uncorrelated():
    rng = np.random.default_rng(4)
    x = channel.prepare_states(10, 10**5, rng)
    y = channel.transmit_and_measure(x, 1e-12, 0.8, 0.01, 0.1, rng)
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.01


def test_channel_statistics():
    cfg = ProtocolConfig(N=10**6, n_bks=1, M=1)
    d = derive_params(cfg)
    rec = channel.simulate_block(cfg, d.mu, 0)
    var_y = d.T * cfg.eta * (d.mu - 1 + cfg.xi) + 1 + cfg.v_el
    assert abs(rec.y.var() / var_y - 1) < 0.01
    # sigma_y^2 = T eta sigma_x^2 + sigma_z^2 is the same quantity
    assert var_y == pytest.approx(d.T * cfg.eta * (d.mu - 1) + d.sigma_z2)
    assert abs(np.corrcoef(rec.x, rec.y)[0, 1] / d.rho - 1) < 0.01
    resid = rec.y - math.sqrt(d.T * cfg.eta) * rec.x
    assert abs(resid.var() / d.sigma_z2 - 1) < 0.01


def test_blocks_reproducible_and_distinct():
    cfg = ProtocolConfig(N=1000, n_bks=3)
    a, b = channel.simulate_block(cfg, 20, 1), channel.simulate_block(cfg, 20, 1)
    np.testing.assert_array_equal(a.y, b.y)
    c = channel.simulate_block(cfg, 20, 2)
    assert not np.array_equal(a.x, c.x)
    other = channel.simulate_block(cfg.replace(seed=cfg.seed + 1), 20, 1)
    assert not np.array_equal(a.x, other.x)


@pytest.mark.parametrize("fmt", ["binary", "csv"])
def test_sample_dump_roundtrip(tmp_path, fmt):
    rec = channel.simulate_block(ProtocolConfig(N=64, n_bks=1, M=1), 20, 0)
    path = channel.dump_samples(tmp_path / f"s.{fmt}", rec, fmt)
    back = channel.load_samples(path, fmt)
    np.testing.assert_array_equal(back.x, rec.x)
    np.testing.assert_array_equal(back.y, rec.y)
    if fmt == "binary":
        raw = np.fromfile(path, dtype="<f8")
        assert raw[0] == rec.x[0] and raw[1] == rec.y[0]
