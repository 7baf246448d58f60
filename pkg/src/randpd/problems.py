"""Composite problem assembly: min f(x) + h(x) + g(Kx) with separable f, g.

A :class:`ProblemSpec` bundles the coupling operator, the per-block prox
functions, the smooth term, the block weights and the two sampling laws.
``constants`` extracts the scalar quantities every schedule needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .blockmat import BlockMatrix, Partition, opnorm_sq_weighted
from .proxlib import Hinge, L1, ProxFn, SqNorm

__all__ = [
    "SmoothTerm",
    "ZeroSmooth",
    "DiagQuadSmooth",
    "ProblemSpec",
    "ProblemConstants",
    "build_svm",
    "build_lad",
    "constants",
]


class SmoothTerm:
    """Smooth additive term h with a gradient oracle and per-block Lipschitz constants."""

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_block(self, x: np.ndarray, j: int, partition: Partition) -> np.ndarray:
        return self.grad(x)[partition.block(j)]

    def block_lipschitz(self, partition: Partition) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


class ZeroSmooth(SmoothTerm):
    """h identically zero (all experiment problems use this)."""

    def value(self, x: np.ndarray) -> float:
        return 0.0

    def grad(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)

    def grad_block(self, x: np.ndarray, j: int, partition: Partition) -> np.ndarray:
        sl = partition.block(j)
        return np.zeros(sl.stop - sl.start)

    def block_lipschitz(self, partition: Partition) -> np.ndarray:
        return np.zeros(partition.n_blocks)

    @property
    def is_zero(self) -> bool:
        return True


class DiagQuadSmooth(SmoothTerm):
    """h(x) = (1/2) sum_i a_i x_i^2 with a_i >= 0; handy for exercising L^h couplings."""

    def __init__(self, diag):
        self.diag = np.asarray(diag, dtype=np.float64)
        if np.any(self.diag < 0):
            raise ValueError("diagonal must be nonnegative")

    def value(self, x: np.ndarray) -> float:
        return 0.5 * float(np.sum(self.diag * x * x))

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.diag * x

    def grad_block(self, x: np.ndarray, j: int, partition: Partition) -> np.ndarray:
        sl = partition.block(j)
        return self.diag[sl] * x[sl]

    def block_lipschitz(self, partition: Partition) -> np.ndarray:
        return np.array(
            [self.diag[partition.block(j)].max(initial=0.0) for j in range(partition.n_blocks)]
        )


@dataclass
class ProblemSpec:
    """Immutable description of one composite problem instance.

    ``phi_conj`` maps ``u`` to ``(value, distance)``: the conjugate of
    f + h evaluated at the projection of ``u`` onto its domain, plus the
    Euclidean distance to that domain (0 when ``u`` is feasible).  When
    omitted and h == 0, it is assembled block-wise from the f conjugates.
    """

    K: BlockMatrix
    f_blocks: tuple
    g_blocks: tuple
    h: SmoothTerm = field(default_factory=ZeroSmooth)
    sigma: np.ndarray | None = None
    q: np.ndarray | None = None
    q_hat: np.ndarray | None = None
    phi_conj: object = None
    phi_conj_gauge: object = None
    M_g: float | None = None
    name: str = "custom"

    def __post_init__(self):
        n = self.K.n_col_blocks
        m = self.K.n_row_blocks
        if len(self.f_blocks) != n:
            raise ValueError(f"expected {n} f blocks, got {len(self.f_blocks)}")
        if len(self.g_blocks) != m:
            raise ValueError(f"expected {m} g blocks, got {len(self.g_blocks)}")
        self.f_blocks = tuple(self.f_blocks)
        self.g_blocks = tuple(self.g_blocks)
        self.sigma = _positive_weights(self.sigma, n, "sigma")
        self.q = _law(self.q, n, "q")
        self.q_hat = _law(self.q_hat, m, "q_hat")
        if self.phi_conj is None:
            if not self.h.is_zero:
                raise ValueError("phi_conj oracle required when h is not zero")
            self.phi_conj = _blockwise_phi_conj(self.f_blocks, self.K.col_partition)
            self.phi_conj_gauge = _blockwise_phi_gauge(self.f_blocks, self.K.col_partition)
        # Whole-vector shortcuts when every block shares one component-wise kind.
        self.g_fused = _fuse_blocks(self.g_blocks, self.K.row_partition)
        self.f_fused = _fuse_blocks(self.f_blocks, self.K.col_partition)

    @property
    def n(self) -> int:
        return self.K.n_col_blocks

    @property
    def m(self) -> int:
        return self.K.n_row_blocks


def _positive_weights(w, count, name):
    if w is None:
        return np.ones(count)
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (count,):
        raise ValueError(f"{name} must have length {count}")
    if np.any(w <= 0):
        raise ValueError(f"{name} must be positive")
    return w


def _law(q, count, name):
    if q is None:
        return np.full(count, 1.0 / count)
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (count,):
        raise ValueError(f"{name} must have length {count}")
    if np.any(q <= 0):
        raise ValueError(f"{name} must be positive")
    if abs(q.sum() - 1.0) > 1e-12:
        raise ValueError(f"{name} must sum to 1 (got {q.sum()})")
    return q


def _fuse_blocks(blocks, partition: Partition) -> ProxFn | None:
    """Merge per-block component-wise kinds into one whole-vector kind.

    Possible exactly when every block is the same kind with identical
    scalar parameters (shifts and box bounds may differ per block and
    get concatenated).  Returns None when the blocks are heterogeneous.
    """
    from .proxlib import BoxIndicator, Zero

    first = blocks[0]
    kind = type(first)
    if any(type(b) is not kind for b in blocks):
        return None
    sizes = partition.sizes
    if kind is Zero:
        return Zero()
    if kind is SqNorm:
        mus = {b.mu for b in blocks}
        return SqNorm(first.mu) if len(mus) == 1 else None
    if kind is Hinge:
        if len({(b.weight, b.mu) for b in blocks}) == 1:
            return Hinge(first.weight, first.mu)
        return None
    if kind is L1:
        if len({b.weight for b in blocks}) != 1:
            return None
        shift = np.concatenate(
            [np.broadcast_to(b.shift, (int(s),)) for b, s in zip(blocks, sizes)]
        )
        return L1(first.weight, shift=shift)
    if kind is BoxIndicator:
        lo = np.concatenate([np.broadcast_to(b.lo, (int(s),)) for b, s in zip(blocks, sizes)])
        hi = np.concatenate([np.broadcast_to(b.hi, (int(s),)) for b, s in zip(blocks, sizes)])
        return BoxIndicator(lo, hi)
    return None


def _blockwise_phi_conj(f_blocks, partition: Partition):
    def phi_conj(u: np.ndarray):
        val = 0.0
        dist_sq = 0.0
        for j, fn in enumerate(f_blocks):
            v, dist = fn.conj_value_projected(u[partition.block(j)])
            val += v
            dist_sq += dist * dist
        return val, float(np.sqrt(dist_sq))

    return phi_conj


def _blockwise_phi_gauge(f_blocks, partition: Partition):
    def phi_gauge(u: np.ndarray) -> float:
        return max(
            fn.conj_domain_gauge(u[partition.block(j)]) for j, fn in enumerate(f_blocks)
        )

    return phi_gauge


@dataclass
class ProblemConstants:
    """Scalar block of derived constants consumed by the schedules.

    ``tau0`` is the joint sampling floor min(min_i qhat_i, min_j q_j)
    used by the fully randomized method; ``tau0_primal`` = min_j q_j is
    the degenerate version for the semi-randomized method, which has no
    dual sampling.  ``M_g``, ``D_phi``, ``D_g`` only feed the optional
    theoretical-bound overlay and stay None when unknown/unbounded.
    """

    L_bar_sigma: float
    Lh_sigma: float
    mu_g: float
    mu_f_sigma: float
    tau0: float
    tau0_primal: float
    K_norm: float
    sigma: np.ndarray
    q: np.ndarray
    q_hat: np.ndarray
    mu_f_blocks: np.ndarray
    mu_g_blocks: np.ndarray
    Lh_blocks: np.ndarray
    M_g: float | None = None
    D_phi: float | None = None
    D_g: float | None = None

    @classmethod
    def uniform(
        cls,
        m: int,
        n: int,
        L_bar_sigma: float = 1.0,
        Lh_sigma: float = 0.0,
        mu_f: float = 0.0,
        mu_g: float = 0.0,
    ) -> "ProblemConstants":
        """Synthetic constants for uniform laws and unit sigma (schedule checks)."""
        return cls(
            L_bar_sigma=float(L_bar_sigma),
            Lh_sigma=float(Lh_sigma),
            mu_g=float(mu_g),
            mu_f_sigma=float(mu_f),
            tau0=min(1.0 / m, 1.0 / n),
            tau0_primal=1.0 / n,
            K_norm=float(np.sqrt(L_bar_sigma)),
            sigma=np.ones(n),
            q=np.full(n, 1.0 / n),
            q_hat=np.full(m, 1.0 / m),
            mu_f_blocks=np.full(n, float(mu_f)),
            mu_g_blocks=np.full(m, float(mu_g)),
            Lh_blocks=np.zeros(n),
        )


def constants(spec: ProblemSpec, D_phi: float | None = None, D_g: float | None = None) -> ProblemConstants:
    """Compute the derived constant block for ``spec``."""
    Lh_blocks = spec.h.block_lipschitz(spec.K.col_partition)
    mu_f = np.array([fn.mu for fn in spec.f_blocks])
    mu_g = np.array([fn.mu for fn in spec.g_blocks])
    L_bar = opnorm_sq_weighted(spec.K, spec.sigma)
    return ProblemConstants(
        L_bar_sigma=L_bar,
        Lh_sigma=float(np.max(Lh_blocks / spec.sigma)),
        mu_g=float(mu_g.min()),
        mu_f_sigma=float((mu_f / spec.sigma).min()),
        tau0=float(min(spec.q_hat.min(), spec.q.min())),
        tau0_primal=float(spec.q.min()),
        K_norm=float(np.sqrt(spec.K.opnorm_sq)),
        sigma=spec.sigma,
        q=spec.q,
        q_hat=spec.q_hat,
        mu_f_blocks=mu_f,
        mu_g_blocks=mu_g,
        Lh_blocks=Lh_blocks,
        M_g=spec.M_g,
        D_phi=D_phi,
        D_g=D_g,
    )


def build_svm(
    dataset, lam: float, n_blocks: int, m_blocks: int, sigma=None
) -> ProblemSpec:
    """Soft-margin SVM without bias as a composite problem.

    Rows of K are ``b_i a_i``; each scalar row carries a ``1/m``-weighted
    hinge so the block objectives sum exactly to the averaged hinge loss;
    f is the ridge term with curvature ``lam``.  ``sigma`` defaults to
    unit block weights; pass ``K.col_block_norms_sq()`` to weight blocks
    by their squared norms.
    """
    if lam <= 0:
        raise ValueError(f"regularizer must be positive, got {lam}")
    if dataset.n_samples == 0:
        raise ValueError("empty dataset")
    if dataset.labels is None:
        raise ValueError("SVM needs labeled data")
    labels = np.asarray(dataset.labels, dtype=np.float64)
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        bad = labels[~np.isin(labels, (-1.0, 1.0))][0]
        raise ValueError(f"labels must be -1 or +1, got {bad}")
    m_samples, p = dataset.n_samples, dataset.n_features
    K_mat = sp.diags(labels) @ dataset.matrix
    from .dataio import partition  # local import; dataio depends on blockmat only

    K = BlockMatrix(K_mat, partition(m_samples, m_blocks), partition(p, n_blocks))
    f_blocks = tuple(SqNorm(lam) for _ in range(n_blocks))
    g_blocks = tuple(Hinge(1.0 / m_samples) for _ in range(m_blocks))
    return ProblemSpec(
        K=K,
        f_blocks=f_blocks,
        g_blocks=g_blocks,
        sigma=sigma,
        M_g=float(np.sqrt(m_samples) / m_samples),
        name="svm",
    )


def build_lad(K: BlockMatrix, b, lam: float, sigma=None) -> ProblemSpec:
    """Least absolute deviations |Kx - b|_1 + lam |x|_1."""
    if lam <= 0:
        raise ValueError(f"regularizer must be positive, got {lam}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (K.d,):
        raise ValueError(f"b must have length {K.d}, got shape {b.shape}")
    g_blocks = tuple(
        L1(1.0, shift=b[K.row_partition.block(i)]) for i in range(K.n_row_blocks)
    )
    f_blocks = tuple(L1(lam) for _ in range(K.n_col_blocks))
    return ProblemSpec(
        K=K,
        f_blocks=f_blocks,
        g_blocks=g_blocks,
        sigma=sigma,
        M_g=float(np.sqrt(K.d)),
        name="lad",
    )
