"""Fully randomized primal-dual solver.

Each iteration recombines the averaged and candidate iterates, draws
one dual block i and one primal block j independently, prox-updates
exactly those two candidate blocks against the augmented-Lagrangian
gradients, and then recombines and updates the multiplier:

    r_hat = (1-tau) r + tau r~,   x_hat = (1-tau) x + tau x~
    r~_i <- prox_{(gamma tau0/tau) g_i}( r~_i - (gamma tau0/tau) D_r_i )
    x~_j <- prox_{(tau0 beta/(tau sigma_j)) f_j}( x~_j - (tau0 beta/(tau sigma_j)) D_x_j )
    r <- r_hat + (tau/tau0)(r~ - r~_old),  x likewise
    y_hat <- y_hat + eta [ (Kx - r) - (1-tau)(Kx_old - r_old) ]
    y_bar <- (1-tau) y_bar + tau [ y_hat_old + rho (K x_hat - r_hat) ]

with D_r_i = -y_hat_i + rho (r_hat_i - K_i x_hat) and
D_x_j = grad_j h(x_hat) + K_j^T (y_hat + rho (K x_hat - r_hat)).
K x and K x~ are cached and maintained through single-block increments,
so one step costs O(p + d + nnz of the touched blocks).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import metrics, sampling
from .problems import ProblemSpec
from .schedules import FRPD_TAGS, ParamState, Schedule

__all__ = ["FRPDState", "init", "step", "run"]


@dataclass
class FRPDState:
    """Iterate bundle; exclusively owned by one run."""

    x: np.ndarray
    x_tilde: np.ndarray
    r: np.ndarray
    r_tilde: np.ndarray
    y_hat: np.ndarray
    y_bar: np.ndarray
    u: np.ndarray        # cache of K x
    u_tilde: np.ndarray  # cache of K x~
    k: int
    rng: np.random.Generator


def init(
    spec: ProblemSpec,
    schedule: Schedule,
    x0: np.ndarray | None = None,
    y0_hat: np.ndarray | None = None,
    seed: int = 0,
) -> FRPDState:
    if schedule.tag not in FRPD_TAGS:
        raise ValueError(
            f"schedule {schedule.tag} drives the semi-randomized solver, "
            f"expected one of {FRPD_TAGS}"
        )
    x0 = np.zeros(spec.K.p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    y0 = np.zeros(spec.K.d) if y0_hat is None else np.asarray(y0_hat, dtype=np.float64).copy()
    if x0.shape != (spec.K.p,):
        raise ValueError(f"x0 must have length {spec.K.p}")
    if y0.shape != (spec.K.d,):
        raise ValueError(f"y0 must have length {spec.K.d}")
    r0 = spec.K.apply(x0)
    return FRPDState(
        x=x0,
        x_tilde=x0.copy(),
        r=r0,
        r_tilde=r0.copy(),
        y_hat=y0,
        y_bar=y0.copy(),
        u=r0.copy(),
        u_tilde=r0.copy(),
        k=0,
        rng=sampling.make_rng(seed),
    )


def step(
    state: FRPDState,
    spec: ProblemSpec,
    params: ParamState,
    tau0: float,
    cum_q: np.ndarray,
    cum_q_hat: np.ndarray,
    *,
    eta_zero: bool = False,
    update_ybar: bool = True,
) -> FRPDState:
    """Advance the state by one iteration (in place)."""
    tau, rho = params.tau, params.rho
    eta = 0.0 if eta_zero else params.eta
    one_m = 1.0 - tau
    scale = tau / tau0

    w = one_m * state.u + tau * state.u_tilde          # K x_hat
    r_hat = one_m * state.r + tau * state.r_tilde
    x_hat = one_m * state.x + tau * state.x_tilde

    i = sampling.draw(cum_q_hat, state.rng)
    j = sampling.draw(cum_q, state.rng)

    s = state.y_hat + rho * (w - r_hat)                # y_hat + rho(K x_hat - r_hat)

    sl_i = spec.K.row_partition.block(i)
    step_r = params.gamma * tau0 / tau
    new_rt = spec.g_blocks[i].prox(state.r_tilde[sl_i] + step_r * s[sl_i], step_r)
    dr = new_rt - state.r_tilde[sl_i]

    sl_j = spec.K.col_partition.block(j)
    grad_j = spec.h.grad_block(x_hat, j, spec.K.col_partition) + spec.K.col_block_adjoint(j, s)
    step_x = tau0 * params.beta / (tau * float(spec.sigma[j]))
    new_xt = spec.f_blocks[j].prox(state.x_tilde[sl_j] - step_x * grad_j, step_x)
    dx = new_xt - state.x_tilde[sl_j]

    r_new = r_hat
    r_new[sl_i] += scale * dr
    x_new = x_hat
    x_new[sl_j] += scale * dx
    kinc = spec.K.col_block_apply(j, dx)
    u_new = w + scale * kinc

    if eta != 0.0:
        drift = (u_new - r_new) - one_m * (state.u - state.r)
        state.y_hat = state.y_hat + eta * drift
    if update_ybar:
        state.y_bar = one_m * state.y_bar + tau * s

    state.r_tilde[sl_i] = new_rt
    state.x_tilde[sl_j] = new_xt
    state.u_tilde += kinc
    state.r = r_new
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
    eta_zero: bool = False,
    update_ybar: bool = True,
    record_tilde_history: bool = False,
):
    """Run for whole epochs (max(n, m) iterations each) and record checkpoints.

    Returns (trace, final state).  Two runs with the same seed produce
    identical traces.  ``record_tilde_history`` keeps every candidate
    iterate, which the averaging-identity tests recombine.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if checkpoint_every < 1:
        raise ValueError("checkpoint cadence must be >= 1")
    state = init(spec, schedule, x0, y0_hat, seed)
    cum_q = sampling.cumulative(spec.q)
    cum_q_hat = sampling.cumulative(spec.q_hat)
    tau0 = schedule.tau0
    iters_per_epoch = max(spec.n, spec.m)
    trace: list[metrics.TraceRecord] = []
    history = None
    if record_tilde_history:
        history = {"x_tilde": [state.x_tilde.copy()], "r_tilde": [state.r_tilde.copy()], "tau": []}
    params: ParamState | None = None
    t_start = time.perf_counter()
    for epoch in range(1, epochs + 1):
        for _ in range(iters_per_epoch):
            params = schedule.advance(params)
            step(
                state, spec, params, tau0, cum_q, cum_q_hat,
                eta_zero=eta_zero, update_ybar=update_ybar,
            )
            if history is not None:
                history["x_tilde"].append(state.x_tilde.copy())
                history["r_tilde"].append(state.r_tilde.copy())
                history["tau"].append(params.tau)
        if epoch % checkpoint_every == 0 or epoch == epochs:
            # Refresh the caches from scratch; also catches divergence early.
            u_fresh = spec.K.apply(state.x)
            if not np.all(np.isfinite(u_fresh)) or not np.all(np.isfinite(state.y_bar)):
                raise FloatingPointError(
                    f"non-finite iterate at k={state.k} (frpd/{schedule.tag}, seed {seed})"
                )
            state.u = u_fresh
            state.u_tilde = spec.K.apply(state.x_tilde)
            feas = float(np.linalg.norm(u_fresh - state.r))
            trace.append(
                metrics.duality_gap_record(
                    spec, state.x, state.y_bar,
                    method="frpd", schedule=schedule.tag, seed=seed,
                    k=state.k, epoch=epoch, feas=feas,
                    time_ms=(time.perf_counter() - t_start) * 1e3,
                )
            )
    if history is not None:
        return trace, state, history
    return trace, state
