import numpy as np
import pytest

from qpadmm_ldpc import certify
from qpadmm_ldpc.admm import (
    AdmmState,
    DecodeError,
    DecoderParams,
    admm_steps,
    decode,
    residual,
    stationarity_report,
)
from qpadmm_ldpc.channel import ChannelConfig, frame_rng, llr, transmit
from qpadmm_ldpc.model import aux_extend, decompose, materialize_dense

PARAMS = DecoderParams(mu=1.0, alpha=0.6)


def strong_llrs(c, mag=20.0):
    c = np.asarray(c)
    return np.where(c == 1, -mag, mag)


def test_noiseless_all_zeros(hamming_model):
    res = decode(hamming_model, strong_llrs(np.zeros(7)), PARAMS)
    assert res.converged and res.parity_ok and res.integral
    assert np.array_equal(res.x_hat, np.zeros(7, dtype=np.uint8))


def test_noiseless_every_codeword(hamming, hamming_model):
    for c in certify.codebook(hamming):
        res = decode(hamming_model, strong_llrs(c), PARAMS)
        assert res.converged and res.parity_ok
        assert np.array_equal(res.x_hat, c)


def test_noisy_hamming_matches_brute_force(hamming, hamming_model):
    cfg = ChannelConfig(ebno_db=4.0, rate=4 / 7)
    hits = 0
    for f in range(200):
        rng = frame_rng(3, 0, f, 0)
        gamma = llr(transmit(np.zeros(7, dtype=np.uint8), cfg, rng), cfg)
        res = decode(hamming_model, gamma, PARAMS)
        if res.converged and res.integral and res.parity_ok:
            if certify.ml_cost_gap(hamming, gamma) > 1e-9 and \
                    certify.ml_certificate(hamming_model, res, gamma, PARAMS):
                assert np.array_equal(
                    res.x_hat, certify.brute_force_ml(hamming, gamma)
                )
                hits += 1
    assert hits > 100  # the comparison must actually exercise frames


def test_validation_gate(hamming_model):
    # e_min = 4 on this code, so mu=1, alpha=5 violates mu*e_min > alpha
    with pytest.raises(DecodeError, match="strong convexity"):
        DecoderParams(mu=1.0, alpha=5.0).validate(hamming_model)
    with pytest.raises(DecodeError):
        DecoderParams(mu=-1.0).validate(hamming_model)
    with pytest.raises(DecodeError):
        DecoderParams(epsilon=0.0).validate(hamming_model)
    with pytest.raises(DecodeError):
        DecoderParams(max_iters=0).validate(hamming_model)


def test_non_finite_llr_rejected(hamming_model):
    gamma = np.zeros(7)
    gamma[2] = np.inf
    with pytest.raises(DecodeError, match="non-finite"):
        decode(hamming_model, gamma, PARAMS)


def test_projection_ranges_every_iteration(hamming_model):
    rng = np.random.default_rng(0)
    gamma = rng.standard_normal(7) * 3
    for state in admm_steps(hamming_model, gamma, PARAMS):
        assert np.all(state.v >= 0.0) and np.all(state.v <= 1.0)
        assert np.all(state.z >= 0.0)
        assert np.all(state.y_scaled >= 0.0)


def test_multiplier_recursion_checked_path(hamming_model):
    params = DecoderParams(mu=0.8, alpha=0.6, check_updates=True)
    rng = np.random.default_rng(1)
    res = decode(hamming_model, rng.standard_normal(7) * 2, params)
    assert res.iters >= 1  # the per-iteration assertion did not fire


def test_fused_path_equals_stepwise(wimax576_model):
    cfg = ChannelConfig(ebno_db=3.0, rate=0.5)
    params = DecoderParams(alpha=0.9)
    for f in range(3):
        rng = frame_rng(9, 0, f, 0)
        gamma = llr(transmit(np.zeros(576, dtype=np.uint8), cfg, rng), cfg)
        fused = decode(wimax576_model, gamma, params, keep_state=True)
        seen = []
        stepped = decode(
            wimax576_model, gamma, params, keep_state=True, trace=seen.append
        )
        assert fused.iters == stepped.iters == len(seen)
        assert np.array_equal(fused.state.v, stepped.state.v)
        assert np.array_equal(fused.state.z, stepped.state.z)
        assert np.array_equal(fused.state.y_scaled, stepped.state.y_scaled)
        assert fused.state.residual == stepped.state.residual


def test_decode_deterministic(hamming_model):
    gamma = np.array([1.2, -0.3, 0.8, -2.0, 0.1, 0.4, -0.9])
    a = decode(hamming_model, gamma, PARAMS, keep_state=True)
    b = decode(hamming_model, gamma, PARAMS, keep_state=True)
    assert np.array_equal(a.v_final, b.v_final)
    assert a.iters == b.iters and a.state.residual == b.state.residual


def test_residual_oracle(hamming_model):
    A, b = materialize_dense(hamming_model)
    rng = np.random.default_rng(4)
    v = rng.uniform(0, 1, hamming_model.n_ext)
    z = rng.uniform(0, 1, hamming_model.n_rows)
    state = AdmmState(v=v, z=z, y_scaled=np.zeros_like(z), residual=0.0, iter=0)
    d = A @ v + z - b
    assert residual(hamming_model, state) == pytest.approx(d @ d, rel=1e-14)


def test_residual_special_points(hamming, hamming_model):
    # extended codeword with z = b - Av has residual exactly 0
    c = certify.codebook(hamming)[5]
    v = aux_extend(hamming_model, c).astype(np.float64)
    A, b = materialize_dense(hamming_model)
    state = AdmmState(v=v, z=b - A @ v, y_scaled=np.zeros_like(b),
                      residual=0.0, iter=0)
    assert residual(hamming_model, state) == 0.0
    # v = z = 0 leaves only the weight-2 rows: one per triple
    zero = AdmmState(
        v=np.zeros(hamming_model.n_ext), z=np.zeros(hamming_model.n_rows),
        y_scaled=np.zeros(hamming_model.n_rows), residual=0.0, iter=0,
    )
    assert residual(hamming_model, zero) == 4.0 * hamming_model.gamma_c


def test_stationarity_report(hamming_model):
    gamma = strong_llrs(np.zeros(7))
    res = decode(hamming_model, gamma, PARAMS, keep_state=True)
    rep = stationarity_report(hamming_model, res.state, gamma, PARAMS)
    assert rep.residual < PARAMS.epsilon
    assert rep.multiplier_violation == 0.0
    assert rep.complementary_slackness <= 1e-4


def test_tie_breaks_to_zero(hamming_model):
    state = AdmmState(
        v=np.full(hamming_model.n_ext, 0.5),
        z=np.zeros(hamming_model.n_rows),
        y_scaled=np.zeros(hamming_model.n_rows), residual=0.0, iter=1,
    )
    x = (state.v[:7] > 0.5).astype(np.uint8)
    assert np.all(x == 0)


def test_early_stop_reaches_same_word(hamming_model):
    gamma = strong_llrs(np.array([0, 1, 1, 0, 1, 1, 0]))
    fast = decode(hamming_model, gamma, DecoderParams(alpha=0.6, early_stop=True))
    full = decode(hamming_model, gamma, PARAMS)
    assert fast.iters <= full.iters
    assert np.array_equal(fast.x_hat, full.x_hat)
