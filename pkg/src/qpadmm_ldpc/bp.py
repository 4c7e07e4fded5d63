"""Flooding-schedule sum-product decoder in the LLR domain.

Reference baseline for FER/BER and runtime comparison. Check-node update
is the tanh rule 2 atanh(prod tanh(msg/2)); message magnitudes are clamped
to +-30 before tanh and a posterior of exactly zero hard-decides to bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .alist import ParityCheckMatrix
from .admm import DecodeResult


@dataclass(frozen=True)
class BpParams:
    max_iters: int = 1000
    early_stop: bool = True

    def validate(self) -> None:
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


class BpDecoder:
    """Edge-array sum-product decoder for a fixed parity-check matrix."""

    def __init__(self, H: ParityCheckMatrix):
        self.H = H
        edges_var = []
        row_ptr = [0]
        for row in H.rows:
            edges_var.extend(row)
            row_ptr.append(len(edges_var))
        self.edge_var = np.array(edges_var, dtype=np.int64)
        self.row_ptr = np.array(row_ptr, dtype=np.int64)
        self.edge_check = np.repeat(
            np.arange(H.m, dtype=np.int64), np.diff(self.row_ptr)
        )
        self.n_edges = len(edges_var)

    def decode(self, gamma, params: BpParams = BpParams()) -> DecodeResult:
        params.validate()
        gamma = np.asarray(gamma, dtype=np.float64)
        m_vc = gamma[self.edge_var].copy()
        m_cv = np.zeros(self.n_edges)
        posterior = gamma.copy()
        x_hat = (posterior < 0.0).astype(np.uint8)
        iters = 0
        parity_ok = self._parity_ok(x_hat)
        for k in range(params.max_iters):
            kernels.bp_check_update(m_vc, m_cv, self.row_ptr)
            acc = np.bincount(self.edge_var, weights=m_cv, minlength=self.H.n)
            posterior = gamma + acc
            m_vc = posterior[self.edge_var] - m_cv
            x_hat = (posterior < 0.0).astype(np.uint8)
            iters = k + 1
            parity_ok = self._parity_ok(x_hat)
            if params.early_stop and parity_ok:
                break
        return DecodeResult(
            x_hat=x_hat,
            v_final=None,
            converged=parity_ok,
            iters=iters,
            parity_ok=parity_ok,
            integral=True,
        )

    def _parity_ok(self, x_hat: np.ndarray) -> bool:
        syndrome = np.bincount(
            self.edge_check, weights=x_hat[self.edge_var].astype(np.float64),
            minlength=self.H.m,
        )
        return bool(np.all(syndrome.astype(np.int64) % 2 == 0))


def bp_decode(H: ParityCheckMatrix, gamma, params: BpParams = BpParams()) -> DecodeResult:
    return BpDecoder(H).decode(gamma, params)
