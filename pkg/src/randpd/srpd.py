"""Semi-randomized primal-dual solver.

One iteration takes a full dual proximal step and one randomized primal
block step, then corrects the multiplier with a three-point momentum
term spanning iterations k, k-1 and k-2:

    x_hat = (1-tau) x + tau x~
    y' = prox_{rho g*}( y_hat + rho K x_hat )
    x~_j <- prox_{(tau0 beta/(sigma_j tau)) f_j}( x~_j - (tau0 beta/(sigma_j tau)) [grad_j h(x_hat) + K_j^T y'] )
    x <- x_hat + (tau/tau0)(x~ - x~_old)
    Theta = K[ x_new - x_hat - (1-tau)(x_old - x_hat_prev) ]
    y_hat <- (eta(1-tau)/rho_prev) y_hat_prev + (1 - eta/rho) y_hat
             + (eta/rho) y' + eta Theta - (eta(1-tau)/rho_prev) y
    y_bar <- (1-tau) y_bar + tau y'

The dual prox goes through Moreau's identity block by block, so only
the primal prox of each g_i is ever needed.  Theta is assembled from
the K-product caches: K x_new - K x_hat = (tau/tau0) K_j dx~.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import metrics, sampling
from .problems import ProblemSpec
from .schedules import SRPD_TAGS, ParamState, Schedule

__all__ = ["SRPDState", "init", "step", "run"]


@dataclass
class SRPDState:
    """Iterate bundle; exclusively owned by one run."""

    x: np.ndarray
    x_tilde: np.ndarray
    x_hat_prev: np.ndarray
    y_hat: np.ndarray
    y_hat_prev: np.ndarray
    y: np.ndarray        # y^k (last full dual prox output; y^0 := y_hat^0)
    y_bar: np.ndarray
    u: np.ndarray        # cache of K x
    u_tilde: np.ndarray  # cache of K x~
    v_prev: np.ndarray   # cache of K x_hat_prev
    k: int
    rng: np.random.Generator


def init(
    spec: ProblemSpec,
    schedule: Schedule,
    x0: np.ndarray | None = None,
    y0_hat: np.ndarray | None = None,
    seed: int = 0,
) -> SRPDState:
    if schedule.tag not in SRPD_TAGS:
        raise ValueError(
            f"schedule {schedule.tag} drives the fully randomized solver, "
            f"expected one of {SRPD_TAGS}"
        )
    x0 = np.zeros(spec.K.p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    y0 = np.zeros(spec.K.d) if y0_hat is None else np.asarray(y0_hat, dtype=np.float64).copy()
    if x0.shape != (spec.K.p,):
        raise ValueError(f"x0 must have length {spec.K.p}")
    if y0.shape != (spec.K.d,):
        raise ValueError(f"y0 must have length {spec.K.d}")
    u0 = spec.K.apply(x0)
    # Lag seeding: x_hat^{-1} := x0, y_hat^{-1} := y0, y^0 := y0.
    return SRPDState(
        x=x0,
        x_tilde=x0.copy(),
        x_hat_prev=x0.copy(),
        y_hat=y0,
        y_hat_prev=y0.copy(),
        y=y0.copy(),
        y_bar=y0.copy(),
        u=u0,
        u_tilde=u0.copy(),
        v_prev=u0.copy(),
        k=0,
        rng=sampling.make_rng(seed),
    )


def _dual_prox(spec: ProblemSpec, z: np.ndarray, rho: float) -> np.ndarray:
    fused = spec.g_fused
    if fused is not None:
        return fused.prox_conj(z, rho)
    out = np.empty_like(z)
    rp = spec.K.row_partition
    for i, fn in enumerate(spec.g_blocks):
        sl = rp.block(i)
        out[sl] = fn.prox_conj(z[sl], rho)
    return out


def step(
    state: SRPDState,
    spec: ProblemSpec,
    params: ParamState,
    tau0: float,
    cum_q: np.ndarray,
    *,
    update_multiplier: bool = True,
    update_ybar: bool = True,
) -> SRPDState:
    """Advance the state by one iteration (in place)."""
    tau, rho, eta = params.tau, params.rho, params.eta
    rho_prev = params.rho_prev
    one_m = 1.0 - tau
    scale = tau / tau0

    x_hat = one_m * state.x + tau * state.x_tilde
    w = one_m * state.u + tau * state.u_tilde          # K x_hat
    y_new = _dual_prox(spec, state.y_hat + rho * w, rho)

    j = sampling.draw(cum_q, state.rng)
    sl_j = spec.K.col_partition.block(j)
    grad_j = spec.h.grad_block(x_hat, j, spec.K.col_partition) + spec.K.col_block_adjoint(j, y_new)
    step_x = tau0 * params.beta / (float(spec.sigma[j]) * tau)
    new_xt = spec.f_blocks[j].prox(state.x_tilde[sl_j] - step_x * grad_j, step_x)
    dx = new_xt - state.x_tilde[sl_j]

    x_new = x_hat.copy()
    x_new[sl_j] += scale * dx
    kinc = spec.K.col_block_apply(j, dx)
    u_new = w + scale * kinc

    if update_multiplier:
        theta = scale * kinc - one_m * (state.u - state.v_prev)
        lag = eta * one_m / rho_prev
        y_hat_new = (
            lag * state.y_hat_prev
            + (1.0 - eta / rho) * state.y_hat
            + (eta / rho) * y_new
            + eta * theta
            - lag * state.y
        )
    else:
        y_hat_new = state.y_hat
    if update_ybar:
        state.y_bar = one_m * state.y_bar + tau * y_new

    state.y_hat_prev = state.y_hat
    state.y_hat = y_hat_new
    state.y = y_new
    state.x_hat_prev = x_hat
    state.v_prev = w
    state.x_tilde[sl_j] = new_xt
    state.u_tilde += kinc
    state.x = x_new
    state.u = u_new
    state.k += 1
    return state


def run(
    spec: ProblemSpec,
    schedule: Schedule,
    x0: np.ndarray | None = None,
    y0_hat: np.ndarray | None = None,
    epochs: int = 100,
    seed: int = 0,
    checkpoint_every: int = 1,
    *,
    update_multiplier: bool = True,
    update_ybar: bool = True,
    record_tilde_history: bool = False,
):
    """Run for whole epochs (n iterations each) and record checkpoints."""
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if checkpoint_every < 1:
        raise ValueError("checkpoint cadence must be >= 1")
    state = init(spec, schedule, x0, y0_hat, seed)
    cum_q = sampling.cumulative(spec.q)
    tau0 = schedule.tau0
    trace: list[metrics.TraceRecord] = []
    history = None
    if record_tilde_history:
        history = {"x_tilde": [state.x_tilde.copy()], "tau": []}
    params: ParamState | None = None
    t_start = time.perf_counter()
    for epoch in range(1, epochs + 1):
        for _ in range(spec.n):
            params = schedule.advance(params)
            step(
                state, spec, params, tau0, cum_q,
                update_multiplier=update_multiplier, update_ybar=update_ybar,
            )
            if history is not None:
                history["x_tilde"].append(state.x_tilde.copy())
                history["tau"].append(params.tau)
        if epoch % checkpoint_every == 0 or epoch == epochs:
            u_fresh = spec.K.apply(state.x)
            if not np.all(np.isfinite(u_fresh)) or not np.all(np.isfinite(state.y_bar)):
                raise FloatingPointError(
                    f"non-finite iterate at k={state.k} (srpd/{schedule.tag}, seed {seed})"
                )
            state.u = u_fresh
            state.u_tilde = spec.K.apply(state.x_tilde)
            trace.append(
                metrics.duality_gap_record(
                    spec, state.x, state.y_bar,
                    method="srpd", schedule=schedule.tag, seed=seed,
                    k=state.k, epoch=epoch, feas=None,
                    time_ms=(time.perf_counter() - t_start) * 1e3,
                )
            )
    if history is not None:
        return trace, state, history
    return trace, state
