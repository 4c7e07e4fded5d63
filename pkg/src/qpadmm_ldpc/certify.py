"""ML certification and codeword-symmetry machinery.

- ml_certificate: one extra penalty-free iteration from a rounded integral
  output; a fixed point certifies the output as the ML codeword.
- brute_force_ml: exhaustive gamma^T x minimization over small codebooks.
- RelativeMap: the bitwise complement operator on extended vectors and the
  per-triple 4-entry permutation on constraint-space vectors that couple a
  general-codeword decode to an all-zeros decode.
- symmetry_replay: runs the coupled decodes in lockstep and checks the
  mapping after every iteration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .admm import AdmmState, DecodeResult, DecoderParams, admm_steps
from .alist import ParityCheckMatrix, check_parity
from .model import DecomposedModel, T_STENCIL, aux_extend

CERT_TOL = 1e-9

# Block permutation applied to a 4-entry constraint block, keyed by the
# triple's reference bit pattern. Each permutation is an involution.
_BLOCK_PERM = {
    (0, 0, 0): (0, 1, 2, 3),
    (1, 1, 0): (1, 0, 3, 2),
    (1, 0, 1): (2, 3, 0, 1),
    (0, 1, 1): (3, 2, 1, 0),
}


def codebook(H: ParityCheckMatrix) -> np.ndarray:
    """All codewords of H by GF(2) null-space enumeration (tiny codes only)."""
    basis = gf2_nullspace(H.to_dense())
    k = basis.shape[0]
    if H.n > 24 and 2**k > 2**20:
        raise ValueError(f"codebook too large: n={H.n}, k={k}")
    words = np.zeros((2**k, H.n), dtype=np.uint8)
    for msg_bits in range(2**k):
        acc = np.zeros(H.n, dtype=np.uint8)
        for b in range(k):
            if (msg_bits >> b) & 1:
                acc ^= basis[b]
        words[msg_bits] = acc
    return np.unique(words, axis=0)


def gf2_nullspace(H: np.ndarray) -> np.ndarray:
    """Row basis of the GF(2) null space of H."""
    H = H.astype(np.uint8).copy()
    m, n = H.shape
    pivots = []
    r = 0
    for c in range(n):
        rows = np.nonzero(H[r:, c])[0]
        if rows.size == 0:
            continue
        pr = r + rows[0]
        H[[r, pr]] = H[[pr, r]]
        elim = np.nonzero(H[:, c])[0]
        for j in elim:
            if j != r:
                H[j] ^= H[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for idx, fc in enumerate(free):
        basis[idx, fc] = 1
        for pr, pc in enumerate(pivots):
            if H[pr, fc]:
                basis[idx, pc] = 1
    return basis


def brute_force_ml(H: ParityCheckMatrix, gamma) -> np.ndarray:
    """argmin over all codewords of gamma^T x; ties break lexicographically.

    codebook() returns words in lexicographic order and argmin takes the
    first minimum, so tie-breaking is smallest-first.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    words = codebook(H)
    costs = words.astype(np.float64) @ gamma
    return words[int(np.argmin(costs))]


def ml_cost_gap(H: ParityCheckMatrix, gamma) -> float:
    """Gap between the two cheapest codeword costs (tie detection)."""
    words = codebook(H)
    costs = np.sort(words.astype(np.float64) @ np.asarray(gamma, dtype=np.float64))
    return float(costs[1] - costs[0]) if costs.size > 1 else np.inf


def ml_certificate(
    model: DecomposedModel, result: DecodeResult, gamma, params: DecoderParams
) -> bool:
    """One penalty-free iteration from the rounded output; fixed point => ML.

    Restarts from v = round(v_final), z = max(0, b - Av), y = 0 with
    alpha = 0 and certifies when the new v equals the input elementwise
    within 1e-9.
    """
    if result.v_final is None or not result.integral:
        raise ValueError("ml_certificate requires an integral decode result")
    if not result.parity_ok:
        raise ValueError("ml_certificate requires a parity-valid decode result")
    v0 = np.round(result.v_final)
    av = (v0[model.triples] @ T_STENCIL.T).ravel()
    z0 = np.maximum(0.0, model.constraint_rhs() - av)
    y0 = np.zeros(model.n_rows)
    step = next(
        admm_steps(
            model, gamma, params, v0=v0, z0=z0, y0=y0,
            alpha_override=0.0, max_iters=1,
        )
    )
    return bool(np.max(np.abs(step.v - v0)) <= CERT_TOL)


@dataclass(frozen=True)
class RelativeMap:
    """Complement/permutation operators anchored at an extended codeword."""

    v_ref: np.ndarray  # binary extended vector [c; u], triple-wise even

    @classmethod
    def for_codeword(cls, model: DecomposedModel, c) -> "RelativeMap":
        return cls(v_ref=aux_extend(model, c))

    def relative_vector(self, beta) -> np.ndarray:
        """Entrywise: beta_i where ref bit 0, 1 - beta_i where ref bit 1."""
        beta = np.asarray(beta, dtype=np.float64)
        return np.where(self.v_ref == 1, 1.0 - beta, beta)

    def block_patterns(self, model: DecomposedModel) -> np.ndarray:
        pats = self.v_ref[model.triples]  # (gamma_c, 3)
        return pats

    def map_constraint_vector(self, model: DecomposedModel, s) -> np.ndarray:
        """Permute each 4-block of s by its triple's reference pattern."""
        s = np.asarray(s, dtype=np.float64)
        out = np.empty_like(s)
        for tau, pat in enumerate(self.block_patterns(model)):
            key = tuple(int(b) for b in pat)
            if key not in _BLOCK_PERM:
                raise ValueError(
                    f"triple {tau}: reference pattern {key} is not parity-feasible"
                )
            perm = _BLOCK_PERM[key]
            base = 4 * tau
            for ell in range(4):
                out[base + ell] = s[base + perm[ell]]
        return out


@dataclass
class ReplayResult:
    ok: bool
    iterations: int
    first_divergence: Optional[tuple[int, str, int, float]] = None  # iter, field, idx, err

    def __bool__(self) -> bool:
        return self.ok


def symmetry_replay(
    model: DecomposedModel,
    c,
    gamma,
    params: DecoderParams,
    tol: float = 1e-12,
    _mutate_perm: bool = False,
) -> ReplayResult:
    """Lockstep decode of gamma and its all-zeros-coupled counterpart.

    The coupled run uses gamma0_i = -gamma_i where c_i = 1 and starts from
    the same all-zeros z/y (the block permutation of zeros is zeros).
    After every iteration the two iterates must satisfy
    v0 = R(v), z0 = Tmap(z), y0 = Tmap(y) and have equal residuals.

    _mutate_perm deliberately corrupts one permutation entry; negative
    control for the test suite.
    """
    params.validate(model)
    c = np.asarray(c).astype(np.uint8)
    rmap = RelativeMap.for_codeword(model, c)
    gamma = np.asarray(gamma, dtype=np.float64)
    gamma0 = np.where(c == 1, -gamma, gamma)

    run = admm_steps(model, gamma, params)
    run0 = admm_steps(model, gamma0, params)

    def tmap(s):
        out = rmap.map_constraint_vector(model, s)
        if _mutate_perm and model.gamma_c > 0:
            out[0], out[1] = out[1], out[0]
        return out

    iters = 0
    for state, state0 in zip(run, run0):
        iters = state.iter
        checks = (
            ("v", state0.v, rmap.relative_vector(state.v)),
            ("z", state0.z, tmap(state.z)),
            ("y", state0.y_scaled, tmap(state.y_scaled)),
            ("residual", np.array([state0.residual]), np.array([state.residual])),
        )
        for name, got, want in checks:
            err = np.abs(got - want)
            worst = int(np.argmax(err))
            if err[worst] > tol:
                return ReplayResult(
                    ok=False, iterations=iters,
                    first_divergence=(iters, name, worst, float(err[worst])),
                )
    return ReplayResult(ok=True, iterations=iters)


def enumerate_feasible_extended(model: DecomposedModel) -> np.ndarray:
    """All integral v in {0,1}^n_ext with Av <= b (tiny models only)."""
    if model.n_ext > 20:
        raise ValueError("exhaustive enumeration limited to n_ext <= 20")
    b = model.constraint_rhs()
    out = []
    for bits in itertools.product((0, 1), repeat=model.n_ext):
        v = np.array(bits, dtype=np.float64)
        av = (v[model.triples] @ T_STENCIL.T).ravel()
        if np.all(av <= b):
            out.append(bits)
    return np.array(out, dtype=np.uint8)
