"""Closed-form proximal operators and Fenchel conjugates.

Every function kind here acts component-wise on a block, so the block
prox of a separable sum is just the scalar map applied to the whole
array.  ``prox(z, s)`` always returns the exact minimizer of
``s*f(t) + (1/2)||t - z||^2``.

Conjugate evaluations come in two flavours: :meth:`ProxFn.conj_value`
is the strict conjugate (``inf`` outside its domain, with the Euclidean
distance to the domain available separately), while
:meth:`ProxFn.conj_value_projected` evaluates the finite expression at
the projection onto the domain, which is what the trace metrics record
for iterates that hover just outside a conjugate box.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ProxFn",
    "Zero",
    "SqNorm",
    "L1",
    "Hinge",
    "BoxIndicator",
    "prox",
    "prox_conjugate",
    "conj_value",
    "moreau_prox_conjugate",
]


def _arr(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=np.float64))


def _check_step(step: float) -> float:
    step = float(step)
    if step <= 0:
        raise ValueError(f"prox step must be positive, got {step}")
    return step


class ProxFn:
    """Base class for the closed-form prox kinds."""

    #: strong convexity parameter of the kind (0 unless stated otherwise)
    mu: float = 0.0

    def value(self, v) -> float:
        raise NotImplementedError

    def prox(self, z, step: float) -> np.ndarray:
        raise NotImplementedError

    def conj_value(self, v) -> float:
        """Strict conjugate value; ``inf`` outside the conjugate domain."""
        val, dist = self.conj_value_projected(v)
        return val if dist == 0.0 else np.inf

    def conj_value_projected(self, v) -> tuple[float, float]:
        """Finite conjugate value at the domain projection, plus the distance."""
        raise NotImplementedError

    def conj_domain_distance(self, v) -> float:
        return self.conj_value_projected(v)[1]

    def conj_domain_project(self, v) -> np.ndarray:
        """Euclidean projection of ``v`` onto the conjugate domain."""
        return _arr(v).copy()

    def conj_domain_gauge(self, v) -> float:
        """Minkowski gauge of the conjugate domain at ``v``.

        Every conjugate domain here contains 0, so ``v / max(gauge, 1)``
        is always feasible; 0 means unconstrained.
        """
        return 0.0

    def prox_conj(self, z, rho: float) -> np.ndarray:
        """Prox of ``rho * conjugate``; default goes through Moreau's identity."""
        return moreau_prox_conjugate(self, z, rho)


def moreau_prox_conjugate(fn: ProxFn, z, rho: float) -> np.ndarray:
    """prox of ``rho*f*`` computed as ``z - rho*prox_{f/rho}(z/rho)``."""
    rho = float(rho)
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    z = _arr(z)
    return z - rho * fn.prox(z / rho, 1.0 / rho)


class Zero(ProxFn):
    """The identically-zero function; conjugate is the indicator of {0}."""

    def value(self, v) -> float:
        return 0.0

    def prox(self, z, step: float) -> np.ndarray:
        _check_step(step)
        return _arr(z).copy()

    def conj_value_projected(self, v) -> tuple[float, float]:
        return 0.0, float(np.linalg.norm(_arr(v)))

    def conj_domain_project(self, v) -> np.ndarray:
        return np.zeros_like(_arr(v))

    def conj_domain_gauge(self, v) -> float:
        return 0.0 if not np.any(_arr(v)) else np.inf

    def prox_conj(self, z, rho: float) -> np.ndarray:
        if rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        return np.zeros_like(_arr(z))

    def __repr__(self) -> str:
        return "Zero()"


class SqNorm(ProxFn):
    """(mu/2)||v||^2 with curvature mu >= 0."""

    def __init__(self, mu: float):
        if mu < 0:
            raise ValueError(f"curvature must be nonnegative, got {mu}")
        self.mu = float(mu)

    def value(self, v) -> float:
        v = _arr(v)
        return 0.5 * self.mu * float(v @ v)

    def prox(self, z, step: float) -> np.ndarray:
        step = _check_step(step)
        return _arr(z) / (1.0 + step * self.mu)

    def conj_value_projected(self, v) -> tuple[float, float]:
        v = _arr(v)
        if self.mu == 0.0:
            return 0.0, float(np.linalg.norm(v))
        return float(v @ v) / (2.0 * self.mu), 0.0

    def conj_domain_project(self, v) -> np.ndarray:
        v = _arr(v)
        return np.zeros_like(v) if self.mu == 0.0 else v.copy()

    def conj_domain_gauge(self, v) -> float:
        if self.mu > 0.0:
            return 0.0
        return 0.0 if not np.any(_arr(v)) else np.inf

    def prox_conj(self, z, rho: float) -> np.ndarray:
        if rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        z = _arr(z)
        if self.mu == 0.0:
            return np.zeros_like(z)
        return z * (self.mu / (self.mu + rho))

    def __repr__(self) -> str:
        return f"SqNorm(mu={self.mu})"


class L1(ProxFn):
    """weight * |v - shift| applied component-wise.

    ``shift`` may be a scalar or a per-component array (the LAD residual
    blocks carry their slice of ``b`` here).
    """

    def __init__(self, weight: float, shift=0.0):
        if weight < 0:
            raise ValueError(f"weight must be nonnegative, got {weight}")
        self.weight = float(weight)
        self.shift = np.asarray(shift, dtype=np.float64)

    def value(self, v) -> float:
        return self.weight * float(np.sum(np.abs(_arr(v) - self.shift)))

    def prox(self, z, step: float) -> np.ndarray:
        step = _check_step(step)
        u = _arr(z) - self.shift
        t = self.weight * step
        return self.shift + np.sign(u) * np.maximum(np.abs(u) - t, 0.0)

    def conj_value_projected(self, v) -> tuple[float, float]:
        v = _arr(v)
        w = self.weight
        proj = np.clip(v, -w, w)
        dist = float(np.linalg.norm(v - proj))
        return float(np.sum(self.shift * proj)), dist

    def conj_domain_project(self, v) -> np.ndarray:
        return np.clip(_arr(v), -self.weight, self.weight)

    def conj_domain_gauge(self, v) -> float:
        v = _arr(v)
        if self.weight == 0.0:
            return 0.0 if not np.any(v) else np.inf
        return float(np.max(np.abs(v))) / self.weight

    def prox_conj(self, z, rho: float) -> np.ndarray:
        if rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        return np.clip(_arr(z) - rho * self.shift, -self.weight, self.weight)

    def __repr__(self) -> str:
        return f"L1(weight={self.weight})"


class Hinge(ProxFn):
    """weight * max(0, 1 - v), optionally plus (curvature/2) v^2.

    The plain hinge (curvature 0) is the SVM loss; the curved variant
    gives a strongly convex loss whose conjugate is finite everywhere,
    used when the quadratic-recursion schedules need strong convexity on
    the dual-side blocks.
    """

    def __init__(self, weight: float, curvature: float = 0.0):
        if weight <= 0:
            raise ValueError(f"weight must be positive, got {weight}")
        if curvature < 0:
            raise ValueError(f"curvature must be nonnegative, got {curvature}")
        self.weight = float(weight)
        self.mu = float(curvature)

    def value(self, v) -> float:
        v = _arr(v)
        val = self.weight * float(np.sum(np.maximum(0.0, 1.0 - v)))
        if self.mu > 0.0:
            val += 0.5 * self.mu * float(v @ v)
        return val

    def prox(self, z, step: float) -> np.ndarray:
        step = _check_step(step)
        z = _arr(z)
        if self.mu > 0.0:
            # Fold the quadratic into the metric: prox of the plain hinge
            # with step s/(1+s*mu) at z/(1+s*mu).
            scale = 1.0 + step * self.mu
            z = z / scale
            step = step / scale
        t = self.weight * step
        out = np.where(z > 1.0, z, 1.0)
        low = z < 1.0 - t
        return np.where(low, z + t, out)

    def conj_value_projected(self, v) -> tuple[float, float]:
        v = _arr(v)
        w, mu = self.weight, self.mu
        if mu == 0.0:
            proj = np.clip(v, -w, 0.0)
            dist = float(np.linalg.norm(v - proj))
            return float(np.sum(proj)), dist
        hi = v >= mu
        lo = v <= mu - w
        vals = np.where(
            hi,
            v * v / (2.0 * mu),
            np.where(lo, (v + w) ** 2 / (2.0 * mu) - w, v - mu / 2.0),
        )
        return float(np.sum(vals)), 0.0

    def conj_domain_project(self, v) -> np.ndarray:
        v = _arr(v)
        return v.copy() if self.mu > 0.0 else np.clip(v, -self.weight, 0.0)

    def conj_domain_gauge(self, v) -> float:
        if self.mu > 0.0:
            return 0.0
        v = _arr(v)
        # box [-w, 0]: positive components are only reachable at scale 0
        if np.any(v > 0.0):
            return np.inf
        return float(np.max(-v, initial=0.0)) / self.weight

    def prox_conj(self, z, rho: float) -> np.ndarray:
        if rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        if self.mu > 0.0:
            return moreau_prox_conjugate(self, z, rho)
        return np.clip(_arr(z) - rho, -self.weight, 0.0)

    def __repr__(self) -> str:
        if self.mu:
            return f"Hinge(weight={self.weight}, curvature={self.mu})"
        return f"Hinge(weight={self.weight})"


class BoxIndicator(ProxFn):
    """Indicator of the box [lo, hi]; conjugate is its support function."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        if not np.all(np.isfinite(self.lo)) or not np.all(np.isfinite(self.hi)):
            raise ValueError("box bounds must be finite")
        if np.any(self.lo > self.hi):
            raise ValueError("box is empty (lo > hi)")

    def value(self, v) -> float:
        v = _arr(v)
        inside = np.all(v >= self.lo) and np.all(v <= self.hi)
        return 0.0 if inside else np.inf

    def prox(self, z, step: float) -> np.ndarray:
        _check_step(step)
        return np.clip(_arr(z), self.lo, self.hi)

    def conj_value_projected(self, v) -> tuple[float, float]:
        v = _arr(v)
        return float(np.sum(np.maximum(self.lo * v, self.hi * v))), 0.0

    def __repr__(self) -> str:
        return f"BoxIndicator(lo={self.lo}, hi={self.hi})"


def prox(fn: ProxFn, z, step: float) -> np.ndarray:
    return fn.prox(z, step)


def prox_conjugate(fn: ProxFn, z, rho: float) -> np.ndarray:
    return fn.prox_conj(z, rho)


def conj_value(fn: ProxFn, v) -> float:
    return fn.conj_value(v)
