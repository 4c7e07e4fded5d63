"""QP-ADMM decoder: box-relaxed penalized objective solved by projection-only
ADMM updates.

Per iteration, in this exact order:
  S.1  v_i <- clip_[0,1]( (a_hat_i^T (b - z - y/mu) - phi_i) / theta_i )
       with phi_i = (2 q_i + alpha) / (2 mu), theta_i = e_i - alpha / mu
  S.2  zhat_j = b_j - a_j^T v - y_j/mu ;  z_j <- max(0, zhat_j)
  S.3  y_j/mu <- 0 if zhat_j >= 0 else -zhat_j   (zhat reused from S.2)

z and y start at zero; iteration stops when ||Av + z - b||^2 < epsilon or
the iteration cap is reached. The multiplier is stored in scaled form y/mu
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from . import kernels
from .alist import check_parity
from .model import DecomposedModel, T_COLS, T_STENCIL, row_dot

INTEGRALITY_TOL = 1e-5


class DecodeError(RuntimeError):
    """Decoder diverged or was called with invalid inputs."""


@dataclass(frozen=True)
class DecoderParams:
    mu: float = 1.0
    alpha: float = 0.6
    epsilon: float = 1e-5
    max_iters: int = 1000
    # Stop as soon as the hard decision is a parity-valid integral word.
    # Off by default: the stated stop rule is the residual threshold only.
    early_stop: bool = False
    # Assert each iteration that the scaled S.3 update matches the plain
    # multiplier recursion y += mu(Av + z - b).
    check_updates: bool = False

    def validate(self, model: DecomposedModel) -> None:
        if self.mu <= 0.0:
            raise DecodeError(f"mu must be positive, got {self.mu}")
        if self.alpha < 0.0:
            raise DecodeError(f"alpha must be nonnegative, got {self.alpha}")
        if self.mu * model.e_min <= self.alpha:
            raise DecodeError(
                f"strong convexity requires mu*e_min > alpha: "
                f"{self.mu} * {model.e_min} <= {self.alpha}"
            )
        if self.epsilon <= 0.0:
            raise DecodeError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise DecodeError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class AdmmState:
    v: np.ndarray  # (n_ext,) in [0,1]
    z: np.ndarray  # (4 gamma_c,) >= 0
    y_scaled: np.ndarray  # (4 gamma_c,) >= 0, stores y / mu
    residual: float
    iter: int


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    v_final: Optional[np.ndarray]
    converged: bool
    iters: int
    parity_ok: bool
    integral: bool
    ml_certified: Optional[bool] = None
    state: Optional[AdmmState] = None


def admm_steps(
    model: DecomposedModel,
    gamma,
    params: DecoderParams,
    v0: Optional[np.ndarray] = None,
    z0: Optional[np.ndarray] = None,
    y0: Optional[np.ndarray] = None,
    alpha_override: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> Iterator[AdmmState]:
    """Yield the state after each full S.1/S.2/S.3 iteration.

    The yielded arrays are live views of the iterate buffers; callers that
    keep them across iterations must copy.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if not np.all(np.isfinite(gamma)):
        raise DecodeError("LLR vector contains non-finite entries")
    alpha = params.alpha if alpha_override is None else alpha_override
    mu = params.mu
    q = model.cost_vector(gamma)
    phi = (2.0 * q + alpha) / (2.0 * mu)
    theta = model.e - alpha / mu

    n_rows = model.n_rows
    v = np.zeros(model.n_ext) if v0 is None else np.array(v0, dtype=np.float64)
    z = np.zeros(n_rows) if z0 is None else np.array(z0, dtype=np.float64)
    y = np.zeros(n_rows) if y0 is None else np.array(y0, dtype=np.float64)
    w4 = np.empty(n_rows)
    b = model.constraint_rhs()

    state = AdmmState(v=v, z=z, y_scaled=y, residual=np.inf, iter=0)
    cap = params.max_iters if max_iters is None else max_iters
    for k in range(cap):
        if params.check_updates:
            y_before = y.copy()
        np.subtract(b, z, out=w4)
        np.subtract(w4, y, out=w4)
        kernels.admm_v_update(
            v, w4, model.occ_indptr, model.occ_triple, model.occ_pos,
            T_COLS, phi, theta,
        )
        res = kernels.admm_zy_update(v, z, y, model.triples)
        if not np.isfinite(res):
            raise DecodeError(
                f"non-finite residual at iteration {k + 1}; "
                f"check mu/alpha (mu={mu}, alpha={alpha})"
            )
        if params.check_updates:
            _assert_multiplier_recursion(model, v, z, y, y_before, b)
        state.residual = res
        state.iter = k + 1
        yield state
        if res < params.epsilon:
            return


def _assert_multiplier_recursion(model, v, z, y, y_before, b) -> None:
    av = (v[model.triples] @ T_STENCIL.T).ravel()
    expected = y_before + (av + z - b)
    if not np.allclose(y, expected, atol=1e-10, rtol=0.0):
        worst = int(np.argmax(np.abs(y - expected)))
        raise AssertionError(
            f"scaled multiplier update differs from recursion at row {worst}: "
            f"{y[worst]} vs {expected[worst]}"
        )


def decode(
    model: DecomposedModel,
    gamma,
    params: DecoderParams,
    keep_state: bool = False,
    trace: Optional[Callable[[AdmmState], None]] = None,
) -> DecodeResult:
    """Run the QP-ADMM iteration and hard-decide the original bits.

    Ties at exactly 0.5 break to 0. The iterate is declared integral when
    every entry is within 1e-5 of {0, 1}.
    """
    params.validate(model)
    if trace is None and not (params.early_stop or params.check_updates):
        state = _decode_fused(model, gamma, params)
    else:
        state = None
        for state in admm_steps(model, gamma, params):
            if trace is not None:
                trace(state)
            if state.residual < params.epsilon:
                break
            if params.early_stop and _integral_parity_ok(model, state.v):
                break
        assert state is not None
    converged = state.residual < params.epsilon
    v = state.v
    x_hat = (v[: model.n_orig] > 0.5).astype(np.uint8)
    integral = bool(np.max(np.abs(v - np.round(v))) <= INTEGRALITY_TOL)
    parity_ok = model.parity_ok(x_hat)
    return DecodeResult(
        x_hat=x_hat,
        v_final=v.copy(),
        converged=converged,
        iters=state.iter,
        parity_ok=parity_ok,
        integral=integral,
        state=AdmmState(
            v=v.copy(), z=state.z.copy(), y_scaled=state.y_scaled.copy(),
            residual=state.residual, iter=state.iter,
        ) if keep_state else None,
    )


def _decode_fused(model: DecomposedModel, gamma, params: DecoderParams) -> AdmmState:
    """One kernel call for the whole iteration loop (the production path)."""
    gamma = np.asarray(gamma, dtype=np.float64)
    if not np.all(np.isfinite(gamma)):
        raise DecodeError("LLR vector contains non-finite entries")
    q = model.cost_vector(gamma)
    phi = (2.0 * q + params.alpha) / (2.0 * params.mu)
    theta = model.e - params.alpha / params.mu
    v = np.zeros(model.n_ext)
    z = np.zeros(model.n_rows)
    y = np.zeros(model.n_rows)
    w4 = np.empty(model.n_rows)
    iters, res = kernels.admm_run(
        v, z, y, w4, model.constraint_rhs(),
        model.occ_indptr, model.occ_triple, model.occ_pos,
        T_COLS, phi, theta, model.triples,
        params.epsilon, params.max_iters,
    )
    if not np.isfinite(res):
        raise DecodeError(
            f"non-finite residual at iteration {iters}; "
            f"check mu/alpha (mu={params.mu}, alpha={params.alpha})"
        )
    return AdmmState(v=v, z=z, y_scaled=y, residual=res, iter=iters)


def _integral_parity_ok(model: DecomposedModel, v: np.ndarray) -> bool:
    if np.max(np.abs(v - np.round(v))) > INTEGRALITY_TOL:
        return False
    x = (v[: model.n_orig] > 0.5).astype(np.uint8)
    return check_parity(model.H, x)


def residual(model: DecomposedModel, state: AdmmState) -> float:
    """||Av + z - b||^2 accumulated row by row via row_dot."""
    b = model.constraint_rhs()
    acc = 0.0
    for tau in range(model.gamma_c):
        for ell in range(1, 5):
            j = 4 * tau + ell - 1
            d = row_dot(model, tau, ell, state.v) + state.z[j] - b[j]
            acc += d * d
    return acc


@dataclass(frozen=True)
class StationarityReport:
    """Checkable consequences of convergence to a stationary point."""

    residual: float
    multiplier_violation: float  # max(0, -min_j y_j)
    complementary_slackness: float  # |y^T z|

    def within(self, tol: float) -> bool:
        return (
            self.residual <= tol
            and self.multiplier_violation <= tol
            and self.complementary_slackness <= tol
        )


def stationarity_report(
    model: DecomposedModel, state: AdmmState, gamma, params: DecoderParams
) -> StationarityReport:
    y = params.mu * state.y_scaled
    return StationarityReport(
        residual=float(state.residual),
        multiplier_violation=float(max(0.0, -y.min())) if y.size else 0.0,
        complementary_slackness=float(abs(y @ state.z)),
    )
