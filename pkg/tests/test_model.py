import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpadmm_ldpc import alist, certify, model
from qpadmm_ldpc.model import (
    T_COLS,
    T_STENCIL,
    W_STENCIL,
    aux_extend,
    col_dot,
    decompose,
    materialize_dense,
    row_dot,
)


def test_stencil_values():
    assert T_STENCIL.tolist() == [
        [1, -1, -1], [-1, 1, -1], [-1, -1, 1], [1, 1, 1],
    ]
    assert W_STENCIL.tolist() == [0, 0, 0, 2]
    assert np.array_equal(T_COLS, T_STENCIL.T)


def test_counts_match_degree_sums(small_codes, wimax576):
    for H in small_codes + [wimax576]:
        m = decompose(H)
        degs = H.row_degrees
        assert m.gamma_c == sum(d - 2 for d in degs)
        assert m.gamma_a == sum(d - 3 for d in degs)
        assert m.n_ext == H.n + m.gamma_a
        assert m.n_rows == 4 * m.gamma_c


def test_aux_indices_sequential(hamming_model):
    aux_seen = []
    for tri in hamming_model.triples:
        for i in tri:
            if i >= hamming_model.n_orig and i not in aux_seen:
                aux_seen.append(int(i))
    assert aux_seen == list(
        range(hamming_model.n_orig, hamming_model.n_ext)
    )


def test_chain_uses_ascending_variables(hamming):
    m = decompose(hamming)
    # first triple of each degree-4 check is (two smallest vars, aux)
    for j, row in enumerate(hamming.rows):
        tri = m.triples[2 * j]
        assert tri[0] == row[0] and tri[1] == row[1]
        assert tri[2] >= m.n_orig


def test_dense_oracle_exact(small_codes):
    rng = np.random.default_rng(7)
    for H in small_codes:
        m = decompose(H)
        A, b = materialize_dense(m)
        assert np.array_equal(b, m.constraint_rhs())
        for _ in range(100):
            v = rng.standard_normal(m.n_ext)
            s = rng.standard_normal(m.n_rows)
            for tau in range(m.gamma_c):
                for ell in range(1, 5):
                    j = 4 * tau + ell - 1
                    want = 0.0
                    for i in range(m.n_ext):
                        want += A[j, i] * v[i]
                    assert row_dot(m, tau, ell, v) == want
            for i in range(m.n_ext):
                want = 0.0
                for j in range(m.n_rows):
                    want += A[j, i] * s[j]
                assert col_dot(m, i, s) == want


def test_gram_matrix_strictly_diagonal(small_codes):
    for H in small_codes:
        m = decompose(H)
        A, _ = materialize_dense(m)
        G = A.T @ A
        assert np.array_equal(np.diag(np.diag(G)), G)
        assert np.array_equal(np.diag(G), m.e)
        occ = np.diff(m.occ_indptr)
        assert np.array_equal(m.e, 4.0 * occ)
        assert np.array_equal(m.ab_offset, 2.0 * occ)
        # a_hat_i^T b has the closed form 2 * |occ(i)|
        for i in range(m.n_ext):
            assert col_dot(m, i, m.constraint_rhs()) == m.ab_offset[i]


def test_dense_cap_enforced(wimax576_model):
    with pytest.raises(ValueError, match="cap"):
        materialize_dense(wimax576_model, cap=100)


def test_all_codewords_feasible(hamming, hamming_model):
    A, b = materialize_dense(hamming_model)
    for c in certify.codebook(hamming):
        v = aux_extend(hamming_model, c).astype(np.float64)
        assert np.all(A @ v <= b)
        # each triple has even weight
        assert np.all(v[hamming_model.triples].sum(axis=1) % 2 == 0)


def test_aux_extend_rejects_non_codeword(hamming_model):
    with pytest.raises(ValueError, match="codeword"):
        aux_extend(hamming_model, np.array([1, 0, 0, 0, 0, 0, 0]))


@pytest.mark.parametrize("degree", [3, 4, 5, 6])
def test_integral_feasible_set_is_even_weight(degree):
    """On one check, feasible 0/1 extended vectors = even-weight words
    with chain-consistent auxiliaries; odd-weight words are excluded."""
    dense = np.ones((1, degree), dtype=np.uint8)
    H = alist.from_dense(dense)
    m = decompose(H)
    feas = certify.enumerate_feasible_extended(m)
    # original-bit patterns of feasible vectors are exactly the even ones
    got = {tuple(v[:degree]) for v in feas}
    want = {
        bits
        for bits in itertools.product((0, 1), repeat=degree)
        if sum(bits) % 2 == 0
    }
    assert got == want
    # and each appears exactly once (aux bits forced by the chain)
    assert len(feas) == len(want)


def test_cost_vector_pads_aux_with_zeros(hamming_model):
    gamma = np.arange(1.0, 8.0)
    q = hamming_model.cost_vector(gamma)
    assert np.array_equal(q[:7], gamma)
    assert np.all(q[7:] == 0.0)
    with pytest.raises(ValueError):
        hamming_model.cost_vector(np.zeros(6))


@given(st.integers(0, 2**7 - 1))
@settings(deadline=None, max_examples=32)
def test_parity_ok_matches_reference(hamming, hamming_model, word):
    x = np.array([(word >> i) & 1 for i in range(7)], dtype=np.uint8)
    assert hamming_model.parity_ok(x) == alist.check_parity(hamming, x)


def test_model_arrays_read_only(hamming_model):
    for arr in (hamming_model.triples, hamming_model.e,
                hamming_model.occ_indptr):
        with pytest.raises(ValueError):
            arr[0] = 0
