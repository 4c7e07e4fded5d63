import numpy as np
import pytest

from qpadmm_ldpc import channel
from qpadmm_ldpc.channel import ChannelConfig, frame_rng, llr, transmit


def test_sigma2_closed_form():
    cfg = ChannelConfig(ebno_db=0.0, rate=0.5)
    assert cfg.sigma2 == 1.0
    cfg = ChannelConfig(ebno_db=3.0, rate=0.5)
    assert cfg.sigma2 == pytest.approx(1.0 / 10 ** 0.3, rel=1e-12)


def test_rate_validated():
    with pytest.raises(ValueError):
        ChannelConfig(ebno_db=1.0, rate=0.0)
    with pytest.raises(ValueError):
        ChannelConfig(ebno_db=1.0, rate=1.0)


def test_bpsk_mapping_dominates_at_high_snr():
    cfg = ChannelConfig(ebno_db=100.0, rate=0.5)
    c = np.array([0, 1, 0, 1, 1], dtype=np.uint8)
    r = transmit(c, cfg, frame_rng(0, 0))
    assert np.allclose(r, 1.0 - 2.0 * c, atol=1e-3)


def test_llr_closed_form():
    cfg = ChannelConfig(ebno_db=0.0, rate=0.5)  # sigma2 = 1
    r = np.array([-1.5, 0.0, 2.0])
    assert np.array_equal(llr(r, cfg), 2.0 * r)
    # positive received sample => positive LLR => bit 0 more likely
    assert llr(np.array([0.7]), cfg)[0] > 0


def test_frame_rng_deterministic_and_distinct():
    a = frame_rng(5, 0, 17, 0).standard_normal(8)
    b = frame_rng(5, 0, 17, 0).standard_normal(8)
    c = frame_rng(5, 0, 18, 0).standard_normal(8)
    d = frame_rng(5, 0, 17, 1).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_noise_statistics():
    cfg = ChannelConfig(ebno_db=2.0, rate=0.5)
    rng = frame_rng(11, 0)
    n = 200_000
    r = transmit(np.zeros(n, dtype=np.uint8), cfg, rng)
    noise = r - 1.0
    assert abs(noise.mean()) < 4 * cfg.sigma / np.sqrt(n)
    assert noise.var() == pytest.approx(cfg.sigma2, rel=0.02)


def test_rng_algorithm_recorded():
    assert channel.RNG_ALGORITHM == "numpy-seedsequence-pcg64"
