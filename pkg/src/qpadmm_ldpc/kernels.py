"""Hot inner loops of the decoders.

Two interchangeable backends: numba @njit kernels (default when numba is
importable) and pure-numpy vectorized equivalents. Selection is made once
at import time via the QPADMM_LDPC_BACKEND environment variable
("numba" or "numpy"). Both backends are deterministic; they may differ by
floating rounding at the last ulp because of different summation orders.

All kernels take flat arrays prepared by DecomposedModel; none allocate
inside the iteration loop except small per-call temporaries on the numpy
path.
"""

from __future__ import annotations

import math
import os

import numpy as np

_requested = os.environ.get("QPADMM_LDPC_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"QPADMM_LDPC_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:
    _HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


if _requested == "numba" and not _HAS_NUMBA:
    raise RuntimeError("QPADMM_LDPC_BACKEND=numba but numba is not importable")

_BACKEND = _requested or ("numba" if _HAS_NUMBA else "numpy")


def backend_name() -> str:
    """Either 'numba' or 'numpy'."""
    return _BACKEND


# ---------------------------------------------------------------------------
# QP-ADMM kernels.
#
# v-update: v_i <- clip((a_hat_i^T (b - z - y/mu) - phi_i) / theta_i, 0, 1)
# z-update: zhat_j = b_j - a_j^T v - y_j/mu ; z_j <- max(0, zhat_j)
# y-update (scaled): y_j/mu <- 0 if zhat_j >= 0 else -zhat_j
#
# The z/y kernel also returns ||Av + z - b||^2 for the stopping rule.
# ---------------------------------------------------------------------------


def _admm_v_update_py(v, w4, occ_indptr, occ_triple, occ_pos, t_cols, phi, theta):
    n_ext = v.shape[0]
    for i in range(n_ext):
        acc = 0.0
        for k in range(occ_indptr[i], occ_indptr[i + 1]):
            base = 4 * occ_triple[k]
            p = occ_pos[k]
            acc += (
                t_cols[p, 0] * w4[base]
                + t_cols[p, 1] * w4[base + 1]
                + t_cols[p, 2] * w4[base + 2]
                + t_cols[p, 3] * w4[base + 3]
            )
        x = (acc - phi[i]) / theta[i]
        if x < 0.0:
            x = 0.0
        elif x > 1.0:
            x = 1.0
        v[i] = x


def _admm_zy_update_py(v, z, y, triples):
    gamma_c = triples.shape[0]
    res = 0.0
    for tau in range(gamma_c):
        v1 = v[triples[tau, 0]]
        v2 = v[triples[tau, 1]]
        v3 = v[triples[tau, 2]]
        base = 4 * tau
        # rows of the stencil applied to this triple, plus b per row
        r0 = v1 - v2 - v3
        r1 = -v1 + v2 - v3
        r2 = -v1 - v2 + v3
        r3 = v1 + v2 + v3
        for ell in range(4):
            if ell == 0:
                r, b = r0, 0.0
            elif ell == 1:
                r, b = r1, 0.0
            elif ell == 2:
                r, b = r2, 0.0
            else:
                r, b = r3, 2.0
            j = base + ell
            zhat = b - r - y[j]
            if zhat >= 0.0:
                z[j] = zhat
                y[j] = 0.0
            else:
                z[j] = 0.0
                y[j] = -zhat
            d = r + z[j] - b
            res += d * d
    return res


def _admm_v_update_np(v, w4, occ_indptr, occ_triple, occ_pos, t_cols, phi, theta):
    blocks = w4.reshape(-1, 4)[occ_triple]  # (K, 4)
    contrib = np.einsum("kl,kl->k", t_cols[occ_pos], blocks)
    acc = np.add.reduceat(contrib, occ_indptr[:-1])
    np.clip((acc - phi) / theta, 0.0, 1.0, out=v)


def _admm_zy_update_np(v, z, y, triples):
    r = v[triples] @ _T_STENCIL_T  # (gamma_c, 4) rows of Av
    r = r.ravel()
    b = _b_for(triples.shape[0])
    zhat = b - r - y
    pos = zhat >= 0.0
    z[:] = np.where(pos, zhat, 0.0)
    y[:] = np.where(pos, 0.0, -zhat)
    d = r + z - b
    return float(d @ d)


_T_STENCIL_T = np.array(
    [
        [1.0, -1.0, -1.0, 1.0],
        [-1.0, 1.0, -1.0, 1.0],
        [-1.0, -1.0, 1.0, 1.0],
    ]
)

_b_cache: dict[int, np.ndarray] = {}


def _b_for(gamma_c: int) -> np.ndarray:
    b = _b_cache.get(gamma_c)
    if b is None:
        b = np.tile(np.array([0.0, 0.0, 0.0, 2.0]), gamma_c)
        b.setflags(write=False)
        _b_cache[gamma_c] = b
    return b


# ---------------------------------------------------------------------------
# Sum-product BP kernels (flooding schedule, LLR domain).
#
# Edge arrays are CSR over checks: edge e carries message var->check in
# m_vc and check->var in m_cv. Check update is the tanh rule with zero
# factors handled exactly so an all-zero input stays all-zero.
# ---------------------------------------------------------------------------

_BP_CLAMP = 30.0
_ATANH_LIM = 1.0 - 1e-15


def _bp_check_update_py(m_vc, m_cv, row_ptr):
    n_checks = row_ptr.shape[0] - 1
    for j in range(n_checks):
        lo = row_ptr[j]
        hi = row_ptr[j + 1]
        prod_nz = 1.0
        n_zero = 0
        zero_at = -1
        for e in range(lo, hi):
            msg = m_vc[e]
            if msg > _BP_CLAMP:
                msg = _BP_CLAMP
            elif msg < -_BP_CLAMP:
                msg = -_BP_CLAMP
            t = math.tanh(0.5 * msg)
            m_cv[e] = t  # stash tanh value
            if t == 0.0:
                n_zero += 1
                zero_at = e
            else:
                prod_nz *= t
        for e in range(lo, hi):
            t = m_cv[e]
            if n_zero == 0:
                ext = prod_nz / t
            elif n_zero == 1 and e == zero_at:
                ext = prod_nz
            else:
                ext = 0.0
            if ext > _ATANH_LIM:
                ext = _ATANH_LIM
            elif ext < -_ATANH_LIM:
                ext = -_ATANH_LIM
            m_cv[e] = 2.0 * math.atanh(ext)


def _bp_check_update_np(m_vc, m_cv, row_ptr):
    t = np.tanh(0.5 * np.clip(m_vc, -_BP_CLAMP, _BP_CLAMP))
    zero = t == 0.0
    n_zero = np.add.reduceat(zero.astype(np.int64), row_ptr[:-1])
    safe = np.where(zero, 1.0, t)
    # segmented product of the nonzero factors per check
    prod_nz = np.multiply.reduceat(safe, row_ptr[:-1])
    counts = np.diff(row_ptr)
    per_edge_nzero = np.repeat(n_zero, counts)
    per_edge_prod = np.repeat(prod_nz, counts)
    ext = np.where(
        per_edge_nzero == 0,
        per_edge_prod / safe,
        np.where((per_edge_nzero == 1) & zero, per_edge_prod, 0.0),
    )
    np.clip(ext, -_ATANH_LIM, _ATANH_LIM, out=ext)
    m_cv[:] = 2.0 * np.arctanh(ext)


def _admm_run_py(
    v, z, y, w4, b, occ_indptr, occ_triple, occ_pos, t_cols, phi, theta,
    triples, epsilon, max_iters,
):
    """Full iteration loop; returns (iterations, final residual).

    Stops when the residual drops below epsilon or after max_iters.
    Trajectories are bit-equal to driving the two step kernels in
    sequence, but the work is reorganised to minimise memory traffic:
    instead of materialising w = b - z - y and gathering it per variable,
    the z/y-update computes each 4-row block of w in registers and
    scatters its contribution straight into a dense n_ext accumulator
    for the next v-update. Per variable the accumulated terms arrive in
    the same (triple-ascending) order as the step kernel's gather, so
    every floating-point sum is identical. The only random access is
    into the small n_ext-long accumulator; all long arrays are walked
    sequentially. w4 is kept as scratch for signature compatibility.
    """
    n_ext = v.shape[0]
    gamma_c = triples.shape[0]
    acc = np.zeros(n_ext)
    # seed the accumulator from the caller-supplied z, y
    for tau in range(gamma_c):
        base = 4 * tau
        w0 = (b[base] - z[base]) - y[base]
        w1 = (b[base + 1] - z[base + 1]) - y[base + 1]
        w2 = (b[base + 2] - z[base + 2]) - y[base + 2]
        w3 = (b[base + 3] - z[base + 3]) - y[base + 3]
        for p in range(3):
            acc[triples[tau, p]] += (
                t_cols[p, 0] * w0 + t_cols[p, 1] * w1
                + t_cols[p, 2] * w2 + t_cols[p, 3] * w3
            )
    res = np.inf
    k = 0
    for k in range(1, max_iters + 1):
        for i in range(n_ext):
            x = (acc[i] - phi[i]) / theta[i]
            if x < 0.0:
                x = 0.0
            elif x > 1.0:
                x = 1.0
            v[i] = x
            acc[i] = 0.0
        res = 0.0
        for tau in range(gamma_c):
            i0 = triples[tau, 0]
            i1 = triples[tau, 1]
            i2 = triples[tau, 2]
            v1 = v[i0]
            v2 = v[i1]
            v3 = v[i2]
            base = 4 * tau
            r0 = v1 - v2 - v3
            r1 = -v1 + v2 - v3
            r2 = -v1 - v2 + v3
            r3 = v1 + v2 + v3
            w0 = 0.0
            w1 = 0.0
            w2 = 0.0
            w3 = 0.0
            for ell in range(4):
                if ell == 0:
                    r, rhs = r0, 0.0
                elif ell == 1:
                    r, rhs = r1, 0.0
                elif ell == 2:
                    r, rhs = r2, 0.0
                else:
                    r, rhs = r3, 2.0
                j = base + ell
                zhat = rhs - r - y[j]
                if zhat >= 0.0:
                    z[j] = zhat
                    y[j] = 0.0
                else:
                    z[j] = 0.0
                    y[j] = -zhat
                d = r + z[j] - rhs
                res += d * d
                w = (rhs - z[j]) - y[j]
                if ell == 0:
                    w0 = w
                elif ell == 1:
                    w1 = w
                elif ell == 2:
                    w2 = w
                else:
                    w3 = w
            for p in range(3):
                acc[triples[tau, p]] += (
                    t_cols[p, 0] * w0 + t_cols[p, 1] * w1
                    + t_cols[p, 2] * w2 + t_cols[p, 3] * w3
                )
        if res < epsilon:
            break
        if not np.isfinite(res):
            break
    return k, res


def _admm_run_np(
    v, z, y, w4, b, occ_indptr, occ_triple, occ_pos, t_cols, phi, theta,
    triples, epsilon, max_iters,
):
    res = np.inf
    k = 0
    for k in range(1, max_iters + 1):
        np.subtract(b, z, out=w4)
        np.subtract(w4, y, out=w4)
        _admm_v_update_np(v, w4, occ_indptr, occ_triple, occ_pos, t_cols, phi, theta)
        res = _admm_zy_update_np(v, z, y, triples)
        if res < epsilon:
            break
        if not np.isfinite(res):
            break
    return k, res

if _HAS_NUMBA:
    _admm_v_update_nb = njit(cache=True)(_admm_v_update_py)
    _admm_zy_update_nb = njit(cache=True)(_admm_zy_update_py)
    _bp_check_update_nb = njit(cache=True)(_bp_check_update_py)

    # same source as the python runner, so trajectories are bit-equal
    _admm_run_nb = njit(cache=True)(_admm_run_py)

if _BACKEND == "numba":
    admm_v_update = _admm_v_update_nb
    admm_zy_update = _admm_zy_update_nb
    admm_run = _admm_run_nb
    bp_check_update = _bp_check_update_nb
else:
    admm_v_update = _admm_v_update_np
    admm_zy_update = _admm_zy_update_np
    admm_run = _admm_run_np
    bp_check_update = _bp_check_update_np
