"""Three-variable decomposition of parity checks and the implicit constraint
operator.

Every degree-d check is rewritten as a chain of d-2 three-variable checks
using d-3 auxiliary bits. Each three-variable check contributes one 4x3
inequality block (the stencil below), so the full constraint matrix is
never materialized in the decoding path; per-variable occurrence lists are
the only adjacency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alist import ParityCheckMatrix, check_parity

# Fixed inequality stencil of one three-variable check: T x <= w.
T_STENCIL = np.array(
    [
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
    ]
)
W_STENCIL = np.array([0.0, 0.0, 0.0, 2.0])

# T_STENCIL columns laid out per position, used by the kernels.
T_COLS = np.ascontiguousarray(T_STENCIL.T)  # shape (3, 4)

_rhs_cache: dict[int, np.ndarray] = {}


@dataclass(frozen=True)
class DecomposedModel:
    """Immutable decomposition of a code into three-variable checks.

    Extended variable indices run 0..n_orig-1 (original bits) then
    n_orig..n_orig+gamma_a-1 (auxiliary bits, allocated check by check
    in row order).
    """

    H: ParityCheckMatrix
    n_orig: int
    gamma_a: int
    gamma_c: int
    triples: np.ndarray  # (gamma_c, 3) int64, extended variable indices
    triple_order: np.ndarray  # (gamma_c, 3) int64, positions sorted by index
    occ_indptr: np.ndarray  # (n_ext + 1,) int64, CSR over occurrences
    occ_triple: np.ndarray  # occurrence -> triple index (ascending per var)
    occ_pos: np.ndarray  # occurrence -> position in triple, 0..2
    e: np.ndarray  # (n_ext,) column norms diag(A^T A) = 4 * |occ|
    ab_offset: np.ndarray  # (n_ext,) a_i^T b = 2 * |occ|
    h_edge_var: np.ndarray  # H nonzeros, variable index, row-major
    h_edge_check: np.ndarray  # H nonzeros, check index, row-major

    @property
    def n_ext(self) -> int:
        return self.n_orig + self.gamma_a

    @property
    def n_rows(self) -> int:
        return 4 * self.gamma_c

    @property
    def e_min(self) -> float:
        return float(self.e.min())

    def cost_vector(self, gamma) -> np.ndarray:
        """LLRs padded with zeros for the auxiliary variables."""
        gamma = np.asarray(gamma, dtype=np.float64)
        if gamma.shape != (self.n_orig,):
            raise ValueError(f"expected LLR vector of length {self.n_orig}")
        q = np.zeros(self.n_ext)
        q[: self.n_orig] = gamma
        return q

    def constraint_rhs(self) -> np.ndarray:
        """The stacked right-hand side, one w block per triple.

        Returns a cached read-only array; copy before mutating.
        """
        b = _rhs_cache.get(self.gamma_c)
        if b is None:
            b = np.tile(W_STENCIL, self.gamma_c)
            b.setflags(write=False)
            _rhs_cache[self.gamma_c] = b
        return b

    def parity_ok(self, x) -> bool:
        """Vectorized Hx = 0 (mod 2); same answer as alist.check_parity."""
        x = np.asarray(x)
        syndrome = np.bincount(
            self.h_edge_check,
            weights=x[self.h_edge_var].astype(np.float64),
            minlength=self.H.m,
        )
        return bool(np.all(syndrome.astype(np.int64) % 2 == 0))


def decompose(H: ParityCheckMatrix) -> DecomposedModel:
    """Chain-decompose every check of H into three-variable checks.

    Variables are taken in ascending index order per check and auxiliary
    indices allocated sequentially from n, check by check, so the model is
    reproducible across runs.
    """
    n = H.n
    triples: list[tuple[int, int, int]] = []
    next_aux = n
    for row in H.rows:
        d = len(row)
        if d == 3:
            triples.append((row[0], row[1], row[2]))
            continue
        u = next_aux
        triples.append((row[0], row[1], u))
        for t in range(d - 4):
            triples.append((u, row[t + 2], u + 1))
            u += 1
        triples.append((u, row[d - 2], row[d - 1]))
        next_aux = u + 1

    gamma_c = len(triples)
    gamma_a = next_aux - n
    n_ext = n + gamma_a

    tri = np.array(triples, dtype=np.int64)
    order = np.argsort(tri, axis=1).astype(np.int64)

    occ_lists: list[list[tuple[int, int]]] = [[] for _ in range(n_ext)]
    for tau, idx in enumerate(triples):
        for p, i in enumerate(idx):
            occ_lists[i].append((tau, p))

    counts = np.array([len(o) for o in occ_lists], dtype=np.int64)
    indptr = np.zeros(n_ext + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    occ_triple = np.empty(indptr[-1], dtype=np.int64)
    occ_pos = np.empty(indptr[-1], dtype=np.int64)
    k = 0
    for o in occ_lists:
        for tau, p in o:
            occ_triple[k] = tau
            occ_pos[k] = p
            k += 1

    h_edge_var = np.array([i for row in H.rows for i in row], dtype=np.int64)
    h_edge_check = np.repeat(
        np.arange(H.m, dtype=np.int64), np.array(H.row_degrees, dtype=np.int64)
    )

    for arr in (tri, order, indptr, occ_triple, occ_pos, h_edge_var, h_edge_check):
        arr.setflags(write=False)
    e = 4.0 * counts.astype(np.float64)
    ab = 2.0 * counts.astype(np.float64)
    e.setflags(write=False)
    ab.setflags(write=False)

    return DecomposedModel(
        H=H,
        n_orig=n,
        gamma_a=gamma_a,
        gamma_c=gamma_c,
        triples=tri,
        triple_order=order,
        occ_indptr=indptr,
        occ_triple=occ_triple,
        occ_pos=occ_pos,
        e=e,
        ab_offset=ab,
        h_edge_var=h_edge_var,
        h_edge_check=h_edge_check,
    )


def row_dot(model: DecomposedModel, tau: int, ell: int, v) -> float:
    """a_j^T v for global row j = 4*tau + (ell-1), ell in 1..4.

    Terms are accumulated in ascending extended-index order so the result
    is bit-identical to a left-to-right dense row product.
    """
    idx = model.triples[tau]
    acc = 0.0
    for p in model.triple_order[tau]:
        acc += T_STENCIL[ell - 1, p] * v[idx[p]]
    return acc


def col_dot(model: DecomposedModel, i: int, s) -> float:
    """a_hat_i^T s over the occurrence list of extended variable i.

    Occurrences are stored in ascending triple order and each 4-block is
    walked top to bottom, matching a left-to-right dense column product.
    """
    acc = 0.0
    for k in range(model.occ_indptr[i], model.occ_indptr[i + 1]):
        tau = model.occ_triple[k]
        p = model.occ_pos[k]
        base = 4 * tau
        for ell in range(4):
            acc += T_STENCIL[ell, p] * s[base + ell]
    return acc


DENSE_CAP = 2000


def materialize_dense(
    model: DecomposedModel, cap: int = DENSE_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """Explicit (A, b) with entries in {-1, 0, 1}; test oracle only."""
    if model.n_ext > cap:
        raise ValueError(
            f"dense materialization cap exceeded: {model.n_ext} > {cap}"
        )
    A = np.zeros((model.n_rows, model.n_ext))
    for tau in range(model.gamma_c):
        idx = model.triples[tau]
        for p in range(3):
            A[4 * tau : 4 * tau + 4, idx[p]] = T_STENCIL[:, p]
    return A, model.constraint_rhs()


def aux_extend(model: DecomposedModel, c) -> np.ndarray:
    """Extend codeword c with the chain-consistent auxiliary bits.

    Every triple of the returned vector has even weight.
    """
    c = np.asarray(c).astype(np.uint8)
    if not check_parity(model.H, c):
        raise ValueError("aux_extend requires a codeword")
    v = np.zeros(model.n_ext, dtype=np.uint8)
    v[: model.n_orig] = c
    # Triples are emitted in chain order, so the auxiliary slot of each
    # chain triple is determined by the two earlier positions.
    for i1, i2, i3 in model.triples:
        if i3 >= model.n_orig:
            v[i3] = v[i1] ^ v[i2]
    return v
