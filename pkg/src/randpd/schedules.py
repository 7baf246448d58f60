"""Non-stationary parameter schedules and their admissibility verifier.

Seven schedule tags cover the two solver families:

========  ======================  =======================================
tag       solver family           update rule
========  ======================  =======================================
``s1``    fully randomized        tau_k = c*tau0/(k+c) with c*tau0 = 1
``s2``    fully randomized        same, c*tau0 > 1
``s3``    semi-randomized         tau_k = c*tau0/(k+c), c >= 1
``s4``    semi-randomized         quadratic recursion, rho ~ 1/tau^2
``s5``    semi-randomized         tau_k = c*tau0/(k+c), c*tau0 > 2
``s6``    fully randomized        quadratic recursion, rho ~ 1/tau^2
``s7``    fully randomized        tau_k = c*tau0/(k+c), c*tau0 > 2
========  ======================  =======================================

Internally the rational schedules are parameterized by the product
``a = c*tau0``, with ``tau_k = a*tau0/(tau0*k + a)``; for ``a = 1`` this
reproduces the closed forms ``tau_k = tau0/(tau0*k + 1)`` and
``rho_k = rho0*(tau0*k + 1)`` bit-for-bit.

``check_conditions`` evaluates the full inequality system a schedule's
family is analyzed with: six conditions for the fully randomized
family, four for the semi-randomized one.  It is a diagnostic tool, not
a runtime gate; constructors only enforce the per-tag constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problems import ProblemConstants

__all__ = [
    "FRPD_TAGS",
    "SRPD_TAGS",
    "ParamState",
    "Schedule",
    "make_schedule",
    "advance",
    "closed_form_s1",
    "check_conditions",
    "ConditionReport",
    "Violation",
    "averaging_weights",
]

FRPD_TAGS = ("s1", "s2", "s6", "s7")
SRPD_TAGS = ("s3", "s4", "s5")
_RECURSIVE_TAGS = ("s4", "s6")
_QUAD_RHO_TAGS = ("s4", "s5", "s6", "s7")


@dataclass(frozen=True)
class ParamState:
    """Live parameter tuple at iteration k plus the lagged values.

    At k = 0 the lagged entries equal the current ones (convention
    rho_{-1} := rho0).
    """

    k: int
    tau: float
    rho: float
    gamma: float
    beta: float
    eta: float
    tau_prev: float
    rho_prev: float
    gamma_prev: float
    beta_prev: float
    eta_prev: float


class Schedule:
    """A tag plus resolved (c, rho0) bound to one problem's constants."""

    def __init__(self, tag: str, consts: ProblemConstants, c, rho0):
        if tag not in FRPD_TAGS + SRPD_TAGS:
            raise ValueError(f"unknown schedule tag {tag!r}")
        self.tag = tag
        self.consts = consts
        self.tau0 = consts.tau0 if tag in FRPD_TAGS else consts.tau0_primal
        if not 0 < self.tau0 <= 1:
            raise ValueError(f"tau0 must be in (0, 1], got {self.tau0}")
        self.rho0 = self._resolve_rho0(rho0)
        self.a, self.c = self._resolve_c(c)

    # -- construction helpers -------------------------------------------------

    def _rho0_cap(self) -> float | None:
        consts = self.consts
        if self.tag in ("s4", "s5"):
            return consts.mu_f_sigma / (8.0 * consts.L_bar_sigma)
        if self.tag in ("s6", "s7"):
            return min(consts.mu_g, consts.mu_f_sigma / consts.L_bar_sigma) / 8.0
        return None

    def _resolve_rho0(self, rho0) -> float:
        cap = self._rho0_cap()
        if isinstance(rho0, str):
            if rho0 != "auto":
                raise ValueError(f"rho0 must be a number or 'auto', got {rho0!r}")
            if cap is not None:
                if cap <= 0:
                    raise ValueError(
                        f"schedule {self.tag} needs strong convexity "
                        f"(admissible rho0 cap is {cap})"
                    )
                return cap
            return 1.0 / self.consts.K_norm
        rho0 = float(rho0)
        if rho0 <= 0:
            raise ValueError(f"rho0 must be positive, got {rho0}")
        if cap is not None and rho0 > cap * (1.0 + 1e-12):
            raise ValueError(
                f"schedule {self.tag} needs rho0 <= {cap:.6g}, got {rho0:.6g}"
            )
        return rho0

    def _resolve_c(self, c):
        tag, tau0 = self.tag, self.tau0
        if tag in _RECURSIVE_TAGS:
            return None, None
        if isinstance(c, str):
            if c != "auto":
                raise ValueError(f"c must be a number or 'auto', got {c!r}")
            if tag in ("s1", "s3"):
                return 1.0, 1.0 / tau0
            # small-o variants: c*tau0 = 2 + tau0 satisfies both > 1 and > 2
            return 2.0 + tau0, 2.0 / tau0 + 1.0
        c = float(c)
        a = c * tau0
        if tag == "s1":
            if abs(a - 1.0) > 1e-9:
                raise ValueError(f"s1 requires c*tau0 = 1, got {a}")
            return 1.0, c
        if tag == "s2":
            if a <= 1.0:
                raise ValueError(f"s2 requires c*tau0 > 1, got {a}")
        elif tag == "s3":
            if c < 1.0:
                raise ValueError(f"s3 requires c >= 1, got {c}")
        elif tag in ("s5", "s7"):
            if a <= 2.0:
                raise ValueError(f"{tag} requires c*tau0 > 2, got {a}")
        return a, c

    # -- parameter evaluation -------------------------------------------------

    @property
    def is_frpd(self) -> bool:
        return self.tag in FRPD_TAGS

    def _derived(self, k: int, tau: float, rho: float, prev: ParamState | None) -> ParamState:
        consts = self.consts
        gamma = 1.0 / (4.0 * rho)
        if self.is_frpd:
            beta = 1.0 / (consts.Lh_sigma + 4.0 * consts.L_bar_sigma * rho)
        else:
            beta = 1.0 / (2.0 * consts.L_bar_sigma * rho + consts.Lh_sigma)
        eta = rho / 2.0
        if prev is None:
            return ParamState(k, tau, rho, gamma, beta, eta, tau, rho, gamma, beta, eta)
        return ParamState(
            k, tau, rho, gamma, beta, eta,
            prev.tau, prev.rho, prev.gamma, prev.beta, prev.eta,
        )

    def _tau_rho_at(self, k: int) -> tuple[float, float]:
        tau0, rho0, a = self.tau0, self.rho0, self.a
        den = tau0 * k + a
        tau = a * tau0 / den
        if self.tag in _QUAD_RHO_TAGS:
            rho = rho0 * tau0 * tau0 / (tau * tau)
        else:
            rho = rho0 * den / a
        return tau, rho

    def params(self, k: int) -> ParamState:
        """Stateless evaluation at iteration k (closed-form tags only)."""
        if self.tag in _RECURSIVE_TAGS:
            raise ValueError(f"{self.tag} is recursive; use advance()")
        if k < 0:
            raise ValueError("k must be nonnegative")
        tau, rho = self._tau_rho_at(k)
        prev = None if k == 0 else self._derived(k - 1, *self._tau_rho_at(k - 1), None)
        return self._derived(k, tau, rho, prev)

    def advance(self, prev: ParamState | None = None) -> ParamState:
        """State after ``prev`` (or the k = 0 state when ``prev`` is None)."""
        if prev is None:
            if self.tag in _RECURSIVE_TAGS:
                return self._derived(0, self.tau0, self.rho0, None)
            tau, rho = self._tau_rho_at(0)
            return self._derived(0, tau, rho, None)
        k = prev.k + 1
        if self.tag in _RECURSIVE_TAGS:
            tau = _quad_recursion(prev.tau)
            rho = self.rho0 * self.tau0 * self.tau0 / (tau * tau)
            return self._derived(k, tau, rho, prev)
        tau, rho = self._tau_rho_at(k)
        return self._derived(k, tau, rho, prev)

    def params_array(self, k_max: int) -> dict[str, np.ndarray]:
        """Vectorized parameter table for k = 0..k_max inclusive."""
        ks = np.arange(k_max + 1, dtype=np.float64)
        consts = self.consts
        tau0, rho0 = self.tau0, self.rho0
        if self.tag in _RECURSIVE_TAGS:
            tau = np.empty(k_max + 1)
            tau[0] = tau0
            t = tau0
            for k in range(1, k_max + 1):
                t = _quad_recursion(t)
                tau[k] = t
            rho = rho0 * tau0 * tau0 / (tau * tau)
        else:
            den = tau0 * ks + self.a
            tau = self.a * tau0 / den
            if self.tag in _QUAD_RHO_TAGS:
                rho = rho0 * tau0 * tau0 / (tau * tau)
            else:
                rho = rho0 * den / self.a
        gamma = 1.0 / (4.0 * rho)
        if self.is_frpd:
            beta = 1.0 / (consts.Lh_sigma + 4.0 * consts.L_bar_sigma * rho)
        else:
            beta = 1.0 / (2.0 * consts.L_bar_sigma * rho + consts.Lh_sigma)
        eta = rho / 2.0
        return {"tau": tau, "rho": rho, "gamma": gamma, "beta": beta, "eta": eta}


def _quad_recursion(tau_prev: float) -> float:
    # Positive root of tau^2 = (1 - tau) * tau_prev^2, in the rationalized
    # form of (tau_prev/2)(sqrt(tau_prev^2 + 4) - tau_prev).
    return 2.0 * tau_prev / (math.sqrt(tau_prev * tau_prev + 4.0) + tau_prev)


def make_schedule(tag: str, consts: ProblemConstants, c="auto", rho0="auto") -> Schedule:
    return Schedule(tag, consts, c, rho0)


def advance(schedule: Schedule, prev: ParamState | None = None) -> ParamState:
    return schedule.advance(prev)


def closed_form_s1(tau0: float, rho0: float, k: int) -> tuple[float, float, float]:
    """Closed forms of the c*tau0 = 1 schedule: tau_k, rho_k and the
    contraction product omega_k = prod_{i<=k} (1 - tau_i)."""
    den = tau0 * k + 1.0
    return tau0 / den, rho0 * den, (1.0 - tau0) / den


# -- admissibility verifier ---------------------------------------------------

#: human-readable descriptions, keyed by (family, condition id)
CONDITION_LABELS = {
    ("frpd", 1): "rho_{k-1} >= (1-tau_k) rho_k",
    ("frpd", 2): "eta_k (1-tau_k) >= eta_{k-1}",
    ("frpd", 3): "(rho_k-eta_k)/(2 rho_k^2) >= gamma_k",
    ("frpd", 4): "(rho_k-eta_k)/(Lh(rho_k-eta_k)+2 Lbar rho_k^2) >= beta_k",
    ("frpd", 5): "mu_g coupling (all i)",
    ("frpd", 6): "mu_f coupling (all j)",
    ("srpd", 1): "mu_f coupling (all j)",
    ("srpd", 2): "eta_{k-1} <= (1-tau_k) eta_k",
    ("srpd", 3): "1/beta_k >= rho_k Lbar + Lh + eta_k rho_k Lbar/(rho_k-eta_k)",
    ("srpd", 4): "(1-tau_k) rho_k <= rho_{k-1}",
}


@dataclass
class Violation:
    k: int
    condition: int
    slack: float


@dataclass
class ConditionReport:
    tag: str
    family: str
    horizon: int
    passed: bool
    first_violation: Violation | None
    min_slack: dict[int, float]

    def __str__(self) -> str:
        lines = [f"schedule {self.tag} ({self.family} conditions), k = 1..{self.horizon}"]
        for cond, slack in sorted(self.min_slack.items()):
            label = CONDITION_LABELS[(self.family, cond)]
            lines.append(f"  condition {cond}: min slack {slack: .3e}   [{label}]")
        if self.passed:
            lines.append("  PASS")
        else:
            v = self.first_violation
            lines.append(
                f"  FAIL at k={v.k}, condition {v.condition}, slack {v.slack:.3e}"
            )
        return "\n".join(lines)


_SLACK_TOL = -1e-12


def _norm_slack(lhs, rhs):
    # tight conditions are equalities between quantities that grow with k,
    # so the pass tolerance applies to the relative slack
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1.0)
    return (lhs - rhs) / scale


def check_conditions(schedule: Schedule, horizon: int) -> ConditionReport:
    """Evaluate the family's inequality system for k = 1..horizon.

    Violations are data, not errors: the report carries the first
    violating (k, condition, slack) and the per-condition minimum slack.
    Slack is normalized as (lhs - rhs)/max(|lhs|, |rhs|, 1); values down
    to -1e-12 still count as a pass (tight conditions allowed).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    p = schedule.params_array(horizon)
    tau, rho = p["tau"], p["rho"]
    gamma, beta, eta = p["gamma"], p["beta"], p["eta"]
    consts = schedule.consts
    tau0 = schedule.tau0
    k = slice(1, None)
    km1 = slice(None, -1)
    one_m_tau = 1.0 - tau[k]
    if schedule.is_frpd:
        family = "frpd"
        slacks = {
            1: _norm_slack(rho[km1], one_m_tau * rho[k]),
            2: _norm_slack(eta[k] * one_m_tau, eta[km1]),
            3: _norm_slack((rho[k] - eta[k]) / (2.0 * rho[k] ** 2), gamma[k]),
            4: _norm_slack(
                (rho[k] - eta[k])
                / (consts.Lh_sigma * (rho[k] - eta[k]) + 2.0 * consts.L_bar_sigma * rho[k] ** 2),
                beta[k],
            ),
        }
        # mu_g coupling, worst case over dual blocks i
        mu_g = consts.mu_g_blocks[:, None]
        q_hat = consts.q_hat[:, None]
        lhs = tau[km1] ** 2 / (tau0 * gamma[km1]) + mu_g * tau[km1]
        rhs = tau[k] ** 2 / (tau0 * gamma[k] * one_m_tau) + (1.0 - q_hat) * mu_g * tau[k] / one_m_tau
        slacks[5] = _norm_slack(lhs, rhs).min(axis=0)
        # mu_f coupling, worst case over primal blocks j
        mu_f = consts.mu_f_blocks[:, None]
        q = consts.q[:, None]
        sig = consts.sigma[:, None]
        lhs = sig * tau[km1] ** 2 / (tau0 * beta[km1]) + mu_f * tau[km1]
        rhs = sig * tau[k] ** 2 / (tau0 * beta[k] * one_m_tau) + (1.0 - q) * mu_f * tau[k] / one_m_tau
        slacks[6] = _norm_slack(lhs, rhs).min(axis=0)
    else:
        family = "srpd"
        mu_f = consts.mu_f_blocks[:, None]
        q = consts.q[:, None]
        sig = consts.sigma[:, None]
        lhs = one_m_tau * tau[km1] * (sig * tau[km1] / (tau0 * beta[km1]) + mu_f)
        rhs = tau[k] * (sig * tau[k] / (tau0 * beta[k]) + (1.0 - q) * mu_f)
        slacks = {
            1: _norm_slack(lhs, rhs).min(axis=0),
            2: _norm_slack(one_m_tau * eta[k], eta[km1]),
            3: _norm_slack(
                1.0 / beta[k],
                rho[k] * consts.L_bar_sigma
                + consts.Lh_sigma
                + eta[k] * rho[k] * consts.L_bar_sigma / (rho[k] - eta[k]),
            ),
            4: _norm_slack(rho[km1], one_m_tau * rho[k]),
        }
    first: Violation | None = None
    for cond in sorted(slacks):
        bad = np.nonzero(slacks[cond] < _SLACK_TOL)[0]
        if bad.size:
            kv = int(bad[0]) + 1
            if first is None or kv < first.k or (kv == first.k and cond < first.condition):
                first = Violation(k=kv, condition=cond, slack=float(slacks[cond][bad[0]]))
    return ConditionReport(
        tag=schedule.tag,
        family=family,
        horizon=horizon,
        passed=first is None,
        first_violation=first,
        min_slack={cond: float(s.min()) for cond, s in slacks.items()},
    )


def averaging_weights(tau: np.ndarray, tau0: float, k_max: int) -> np.ndarray:
    """Convex-combination weights linking averaged and candidate iterates.

    Returns the lower-triangular (k_max+1) x (k_max+1) matrix W with
    ``x^k = sum_l W[k, l] * xtilde^l`` for the momentum recombination
    used by both solvers; row k sums to 1 and is nonnegative whenever
    ``tau`` is nonincreasing in (0, 1] with ``tau[0] = tau0``.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if len(tau) < k_max:
        raise ValueError(f"need tau_0..tau_{k_max - 1}, got {len(tau)} values")
    W = np.zeros((k_max + 1, k_max + 1))
    W[0, 0] = 1.0
    for k in range(k_max):
        t = tau[k]
        W[k + 1, :k] = (1.0 - t) * W[k, :k]
        W[k + 1, k] = (1.0 - t) * W[k, k] + t - t / tau0
        W[k + 1, k + 1] = t / tau0
    return W
