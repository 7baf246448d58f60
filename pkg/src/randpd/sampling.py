"""Categorical index sampling shared by the randomized solvers.

Indices are drawn by inverse-CDF lookup on the cumulative law, one
uniform per draw, so a trajectory is a pure function of the Philox seed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "cumulative", "draw"]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the same seed pins the whole trajectory."""
    return np.random.Generator(np.random.Philox(key=seed))


def cumulative(law: np.ndarray) -> np.ndarray:
    return np.cumsum(np.asarray(law, dtype=np.float64))


def draw(cum: np.ndarray, rng: np.random.Generator) -> int:
    # Guard against cum[-1] rounding below 1.
    idx = int(np.searchsorted(cum, rng.random(), side="right"))
    return min(idx, len(cum) - 1)
