"""Deterministic PDHG and its dual-block-randomized variant SPDHG.

PDHG iterates, with primal extrapolation x_bar:

    y <- prox_{sigma g*}( y + sigma K x_bar )
    x <- prox_{tau phi}( x - tau K^T y )
    x_bar <- x + theta (x - x_prev)

SPDHG samples one dual block per iteration and drives the full primal
prox with an extrapolated transposed-dual estimate, maintaining
z = K^T y through single-block increments:

    i ~ q_hat;  y_i <- prox_{sigma g_i*}( y_i + sigma K_i x )
    z <- z + K_i^T dy_i;   z_bar <- z + (theta/q_hat_i) K_i^T dy_i
    x <- prox_{tau phi}( x - tau z_bar )

With one dual block this degenerates to the deterministic
dual-extrapolated PDHG variant (extrapolation on K^T y instead of x).
The step-size product condition sigma*tau*||K||^2 < 1 is enforced for
PDHG only; the stochastic variant's tuned values intentionally exceed
it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import metrics, sampling
from .problems import ProblemSpec

__all__ = ["PDHGConfig", "PDHGState", "pdhg_run", "spdhg_run"]


@dataclass
class PDHGConfig:
    """Step sizes and extrapolation weight shared by both baselines."""

    tau: float
    sigma: float
    theta: float = 1.0

    def validate(self):
        if self.tau <= 0 or self.sigma <= 0:
            raise ValueError(f"step sizes must be positive, got tau={self.tau}, sigma={self.sigma}")
        if self.theta < 0:
            raise ValueError(f"extrapolation weight must be nonnegative, got {self.theta}")


@dataclass
class PDHGState:
    x: np.ndarray
    y: np.ndarray
    x_bar: np.ndarray
    k: int


def _check_h_zero(spec: ProblemSpec, method: str):
    if not spec.h.is_zero:
        raise ValueError(f"{method} applies prox of f+h jointly and needs h == 0")


def _prox_f_full(spec: ProblemSpec, z: np.ndarray, step: float) -> np.ndarray:
    if spec.f_fused is not None:
        return spec.f_fused.prox(z, step)
    out = np.empty_like(z)
    cp = spec.K.col_partition
    for j, fn in enumerate(spec.f_blocks):
        sl = cp.block(j)
        out[sl] = fn.prox(z[sl], step)
    return out


def _prox_gconj_full(spec: ProblemSpec, z: np.ndarray, rho: float) -> np.ndarray:
    if spec.g_fused is not None:
        return spec.g_fused.prox_conj(z, rho)
    out = np.empty_like(z)
    rp = spec.K.row_partition
    for i, fn in enumerate(spec.g_blocks):
        sl = rp.block(i)
        out[sl] = fn.prox_conj(z[sl], rho)
    return out


def pdhg_run(
    spec: ProblemSpec,
    config: PDHGConfig,
    x0: np.ndarray | None = None,
    y0: np.ndarray | None = None,
    epochs: int = 100,
    checkpoint_every: int = 1,
):
    """Deterministic baseline; one iteration counts as one epoch."""
    config.validate()
    _check_h_zero(spec, "pdhg")
    if config.sigma * config.tau * spec.K.opnorm_sq >= 1.0:
        raise ValueError(
            f"pdhg needs sigma*tau*||K||^2 < 1, got {config.sigma * config.tau * spec.K.opnorm_sq:.3g}"
        )
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    x = np.zeros(spec.K.p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    y = np.zeros(spec.K.d) if y0 is None else np.asarray(y0, dtype=np.float64).copy()
    state = PDHGState(x=x, y=y, x_bar=x.copy(), k=0)
    trace: list[metrics.TraceRecord] = []
    t_start = time.perf_counter()
    for epoch in range(1, epochs + 1):
        y = _prox_gconj_full(spec, state.y + config.sigma * spec.K.apply(state.x_bar), config.sigma)
        x_new = _prox_f_full(spec, state.x - config.tau * spec.K.adjoint_apply(y), config.tau)
        state.x_bar = x_new + config.theta * (x_new - state.x)
        state.x = x_new
        state.y = y
        state.k += 1
        if epoch % checkpoint_every == 0 or epoch == epochs:
            if not np.all(np.isfinite(state.x)):
                raise FloatingPointError(f"non-finite iterate at k={state.k} (pdhg)")
            trace.append(
                metrics.duality_gap_record(
                    spec, state.x, state.y,
                    method="pdhg", schedule="", seed=0,
                    k=state.k, epoch=epoch, feas=None,
                    time_ms=(time.perf_counter() - t_start) * 1e3,
                )
            )
    return trace, state


def spdhg_run(
    spec: ProblemSpec,
    config: PDHGConfig,
    x0: np.ndarray | None = None,
    y0: np.ndarray | None = None,
    epochs: int = 100,
    seed: int = 0,
    checkpoint_every: int = 1,
):
    """Stochastic baseline over the dual row blocks of the problem.

    One epoch is m block updates.  z = K^T y is maintained
    incrementally, so an iteration touches only the sampled row block
    plus O(p) primal work.
    """
    config.validate()
    _check_h_zero(spec, "spdhg")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    x = np.zeros(spec.K.p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    y = np.zeros(spec.K.d) if y0 is None else np.asarray(y0, dtype=np.float64).copy()
    state = PDHGState(x=x, y=y, x_bar=x.copy(), k=0)
    z = spec.K.adjoint_apply(y)
    z_bar = z.copy()
    rng = sampling.make_rng(seed)
    cum_q_hat = sampling.cumulative(spec.q_hat)
    rp = spec.K.row_partition
    trace: list[metrics.TraceRecord] = []
    t_start = time.perf_counter()
    for epoch in range(1, epochs + 1):
        for _ in range(spec.m):
            i = sampling.draw(cum_q_hat, rng)
            sl = rp.block(i)
            yi_new = spec.g_blocks[i].prox_conj(
                state.y[sl] + config.sigma * spec.K.row_block_dot(i, state.x),
                config.sigma,
            )
            dz = spec.K.row_block_adjoint(i, yi_new - state.y[sl])
            state.y[sl] = yi_new
            z = z + dz
            z_bar = z + (config.theta / float(spec.q_hat[i])) * dz
            state.x = _prox_f_full(spec, state.x - config.tau * z_bar, config.tau)
            state.k += 1
        if epoch % checkpoint_every == 0 or epoch == epochs:
            if not np.all(np.isfinite(state.x)):
                raise FloatingPointError(f"non-finite iterate at k={state.k} (spdhg, seed {seed})")
            trace.append(
                metrics.duality_gap_record(
                    spec, state.x, state.y,
                    method="spdhg", schedule="", seed=seed,
                    k=state.k, epoch=epoch, feas=None,
                    time_ms=(time.perf_counter() - t_start) * 1e3,
                )
            )
    return trace, state
