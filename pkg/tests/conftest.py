import numpy as np
import pytest

from qpadmm_ldpc import alist, codes, model


@pytest.fixture(scope="session")
def hamming():
    return codes.hamming74()


@pytest.fixture(scope="session")
def hamming_model(hamming):
    return model.decompose(hamming)


@pytest.fixture(scope="session")
def wimax576():
    return codes.wimax_rate12(24)


@pytest.fixture(scope="session")
def wimax576_model(wimax576):
    return model.decompose(wimax576)


@pytest.fixture(scope="session")
def bundled_codes(tmp_path_factory):
    """The shipped alist files, written to a session temp dir."""
    outdir = tmp_path_factory.mktemp("codes")
    paths = codes.write_bundled(outdir)
    return {p.name: p for p in paths}


@pytest.fixture(scope="session")
def small_codes(hamming):
    """Three small codes for dense-oracle comparisons."""
    rng = np.random.default_rng(42)
    # a random regular-ish code: 6 checks x 15 variables, degree 4 rows
    dense = np.zeros((6, 15), dtype=np.uint8)
    for j in range(6):
        dense[j, rng.choice(15, size=4, replace=False)] = 1
    # make sure no column is empty
    for i in range(15):
        if dense[:, i].sum() == 0:
            dense[rng.integers(0, 6), i] = 1
    mixed = alist.from_dense(dense)
    # one code with varying row degrees 3..6
    dense2 = np.zeros((4, 12), dtype=np.uint8)
    dense2[0, [0, 1, 2]] = 1
    dense2[1, [1, 3, 4, 5]] = 1
    dense2[2, [2, 4, 6, 7, 8]] = 1
    dense2[3, [0, 5, 8, 9, 10, 11]] = 1
    varying = alist.from_dense(dense2)
    return [hamming, mixed, varying]
