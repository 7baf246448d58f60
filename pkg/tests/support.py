"""Shared oracles for the test suite.

The prox oracle is a brute-force 1-D minimizer (coarse grid, then two
local refinements down to 1e-6 resolution).  It evaluates the textbook
formula of each function kind directly, independent of the library's
closed forms; ``test_value_grid_consistency`` keeps the two definitions
in sync.
"""

import numpy as np

from randpd.proxlib import BoxIndicator, Hinge, L1, SqNorm, Zero


def scalar_value(fn, t: float) -> float:
    return fn.value(np.array([t]))


def value_grid(fn, ts: np.ndarray) -> np.ndarray:
    """Element-wise value of a scalar kind over a grid (oracle definition)."""
    if isinstance(fn, Zero):
        return np.zeros_like(ts)
    if isinstance(fn, SqNorm):
        return 0.5 * fn.mu * ts * ts
    if isinstance(fn, L1):
        b = float(np.broadcast_to(fn.shift, (1,))[0])
        return fn.weight * np.abs(ts - b)
    if isinstance(fn, Hinge):
        return fn.weight * np.maximum(0.0, 1.0 - ts) + 0.5 * fn.mu * ts * ts
    if isinstance(fn, BoxIndicator):
        lo = float(np.broadcast_to(fn.lo, (1,))[0])
        hi = float(np.broadcast_to(fn.hi, (1,))[0])
        out = np.zeros_like(ts)
        out[(ts < lo) | (ts > hi)] = np.inf
        return out
    raise TypeError(f"no oracle value for {fn!r}")


def brute_prox_1d(fn, z: float, step: float, half_width: float = 30.0) -> float:
    """Minimize step*f(t) + (t-z)^2/2 on a grid around z, refining twice."""
    lo, hi = z - half_width, z + half_width
    best = z
    for res in (1e-2, 1e-4, 1e-6):
        ts = np.arange(lo, hi + res, res)
        obj = step * value_grid(fn, ts) + 0.5 * (ts - z) ** 2
        best = ts[int(np.argmin(obj))]
        lo, hi = best - 2 * res, best + 2 * res
    return float(best)


def subgrad_interval(fn, t: float) -> tuple[float, float]:
    """[min, max] of the subdifferential of the scalar kind at t."""
    if isinstance(fn, Zero):
        return 0.0, 0.0
    if isinstance(fn, SqNorm):
        g = fn.mu * t
        return g, g
    if isinstance(fn, L1):
        b = float(np.broadcast_to(fn.shift, (1,))[0])
        w = fn.weight
        if t > b:
            return w, w
        if t < b:
            return -w, -w
        return -w, w
    if isinstance(fn, Hinge):
        quad = fn.mu * t
        if t > 1.0:
            return quad, quad
        if t < 1.0:
            return quad - fn.weight, quad - fn.weight
        return quad - fn.weight, quad
    if isinstance(fn, BoxIndicator):
        lo = float(np.broadcast_to(fn.lo, (1,))[0])
        hi = float(np.broadcast_to(fn.hi, (1,))[0])
        lo_g = -np.inf if t <= lo else 0.0
        hi_g = np.inf if t >= hi else 0.0
        return lo_g, hi_g
    raise TypeError(f"no subgradient rule for {fn!r}")


def assert_prox_optimal(fn, z: float, step: float, p: float, tol: float = 1e-9):
    """0 must lie in step*df(p) + (p - z), up to rounding."""
    lo, hi = subgrad_interval(fn, p)
    resid = z - p
    assert step * lo - tol <= resid <= step * hi + tol, (
        f"{fn!r}: prox({z}, {step}) = {p} violates optimality "
        f"({step * lo:.3e} <= {resid:.3e} <= {step * hi:.3e} fails)"
    )


def numeric_conjugate(fn, v: float, half_width: float = 200.0, res: float = 1e-3) -> float:
    """sup_t v*t - f(t) over a wide grid (finite conjugates only)."""
    ts = np.arange(-half_width, half_width + res, res)
    return float(np.max(v * ts - value_grid(fn, ts)))


def all_scalar_kinds():
    return [
        Zero(),
        SqNorm(0.0),
        SqNorm(1.7),
        L1(0.8),
        L1(0.5, shift=1.3),
        Hinge(0.7),
        Hinge(0.4, curvature=0.9),
        BoxIndicator(-1.2, 2.0),
    ]
