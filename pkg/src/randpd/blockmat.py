"""Sparse linear operator with row-block and column-block views.

The solvers in this package touch the coupling matrix ``K`` in two dual
ways: the dual side reads one row block ``K_i`` per iteration while the
primal side reads one column block ``K_j``.  ``BlockMatrix`` therefore
keeps the same nonzeros in both CSR and CSC order and pre-slices the
blocks once, so a coordinate step never scans the full matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Partition",
    "BlockMatrix",
    "OpnormInfo",
    "opnorm_sq_weighted",
]


class Partition:
    """Contiguous partition of ``range(dim)`` into blocks.

    ``boundaries`` has ``count + 1`` ascending offsets; block ``k`` spans
    ``[boundaries[k], boundaries[k+1])``.
    """

    def __init__(self, boundaries):
        b = np.asarray(boundaries, dtype=np.int64)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("partition needs at least two offsets")
        if b[0] != 0:
            raise ValueError("first offset must be 0")
        if np.any(np.diff(b) <= 0):
            raise ValueError("offsets must be strictly increasing")
        self.boundaries = b

    @property
    def dim(self) -> int:
        return int(self.boundaries[-1])

    @property
    def n_blocks(self) -> int:
        return len(self.boundaries) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def block(self, k: int) -> slice:
        if not 0 <= k < self.n_blocks:
            raise IndexError(f"block index {k} out of range [0, {self.n_blocks})")
        return slice(int(self.boundaries[k]), int(self.boundaries[k + 1]))

    def __len__(self) -> int:
        return self.n_blocks

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(
            self.boundaries, other.boundaries
        )

    def __repr__(self) -> str:
        return f"Partition({self.boundaries.tolist()})"


@dataclass
class OpnormInfo:
    """Convergence report of the power iteration behind the operator norm."""

    value: float
    converged: bool
    iterations: int


class BlockMatrix:
    """d x p sparse matrix stored in both row-major and column-major order.

    Immutable after construction; all operations are read-only, so an
    instance can be shared freely across runs and threads.
    """

    def __init__(self, matrix, row_partition: Partition, col_partition: Partition):
        csr = sp.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        d, p = csr.shape
        if row_partition.dim != d:
            raise ValueError(f"row partition covers {row_partition.dim}, matrix has {d} rows")
        if col_partition.dim != p:
            raise ValueError(f"col partition covers {col_partition.dim}, matrix has {p} cols")
        self._csr = csr
        self._csc = csr.tocsc()
        self.row_partition = row_partition
        self.col_partition = col_partition
        # Pre-sliced block views; built once, read many times in the hot loop.
        self._row_blocks = [
            self._csr[row_partition.block(i), :] for i in range(row_partition.n_blocks)
        ]
        self._col_blocks = [
            self._csc[:, col_partition.block(j)] for j in range(col_partition.n_blocks)
        ]
        self._col_blocks_t = [blk.T.tocsr() for blk in self._col_blocks]
        self._opnorm_sq_cache: float | None = None

    @property
    def d(self) -> int:
        return self._csr.shape[0]

    @property
    def p(self) -> int:
        return self._csr.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def n_row_blocks(self) -> int:
        return self.row_partition.n_blocks

    @property
    def n_col_blocks(self) -> int:
        return self.col_partition.n_blocks

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return ``K x``."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.p,):
            raise ValueError(f"expected vector of length {self.p}, got shape {x.shape}")
        return self._csr @ x

    def adjoint_apply(self, y: np.ndarray) -> np.ndarray:
        """Return ``K^T y``."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.d,):
            raise ValueError(f"expected vector of length {self.d}, got shape {y.shape}")
        return self._csc.T @ y

    def col_block_apply(self, j: int, dx_j: np.ndarray) -> np.ndarray:
        """Return ``K_j dx_j`` as a d-vector, touching only block-j nonzeros."""
        blk = self._col_blocks[j] if 0 <= j < self.n_col_blocks else None
        if blk is None:
            raise IndexError(f"column block {j} out of range [0, {self.n_col_blocks})")
        dx_j = np.asarray(dx_j, dtype=np.float64)
        if dx_j.shape != (blk.shape[1],):
            raise ValueError(
                f"block {j} has width {blk.shape[1]}, got shape {dx_j.shape}"
            )
        return blk @ dx_j

    def row_block_dot(self, i: int, x: np.ndarray) -> np.ndarray:
        """Return ``K_i x`` (the i-th row block applied to a full vector)."""
        if not 0 <= i < self.n_row_blocks:
            raise IndexError(f"row block {i} out of range [0, {self.n_row_blocks})")
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.p,):
            raise ValueError(f"expected vector of length {self.p}, got shape {x.shape}")
        return self._row_blocks[i] @ x

    def col_block_adjoint(self, j: int, y: np.ndarray) -> np.ndarray:
        """Return ``K_j^T y`` (adjoint of the j-th column block)."""
        if not 0 <= j < self.n_col_blocks:
            raise IndexError(f"column block {j} out of range [0, {self.n_col_blocks})")
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.d,):
            raise ValueError(f"expected vector of length {self.d}, got shape {y.shape}")
        return self._col_blocks_t[j] @ y

    def row_block_adjoint(self, i: int, y_i: np.ndarray) -> np.ndarray:
        """Return ``K_i^T y_i`` as a p-vector (adjoint of the i-th row block)."""
        if not 0 <= i < self.n_row_blocks:
            raise IndexError(f"row block {i} out of range [0, {self.n_row_blocks})")
        blk = self._row_blocks[i]
        y_i = np.asarray(y_i, dtype=np.float64)
        if y_i.shape != (blk.shape[0],):
            raise ValueError(f"row block {i} has height {blk.shape[0]}, got shape {y_i.shape}")
        return blk.T @ y_i

    def col_block_norms_sq(self) -> np.ndarray:
        """Squared spectral norm of each column block ``K_j``."""
        out = np.empty(self.n_col_blocks)
        for j, blk in enumerate(self._col_blocks):
            out[j] = _opnorm_sq(blk)[0]
        return out

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def to_dense_from_columns(self) -> np.ndarray:
        """Dense reconstruction from the column-major view (consistency checks)."""
        return self._csc.toarray()

    @property
    def opnorm_sq(self) -> float:
        """Cached squared spectral norm ``||K||^2`` (unit column weights)."""
        if self._opnorm_sq_cache is None:
            self._opnorm_sq_cache = opnorm_sq_weighted(
                self, np.ones(self.n_col_blocks)
            )
        return self._opnorm_sq_cache


# Power-iteration defaults: all-ones start, Rayleigh-quotient tolerance, cap.
_POWER_TOL = 1e-8
_POWER_MAXITER = 10_000


def _opnorm_sq(a: sp.spmatrix) -> tuple[float, bool, int]:
    """Squared spectral norm of a scipy sparse matrix.

    Exact (dense eigensolve of the small Gram matrix) when min(d, p) <= 3,
    otherwise power iteration on the Gram operator started from the
    normalized all-ones vector.
    """
    d, p = a.shape
    if min(d, p) <= 3:
        dense = a.toarray()
        gram = dense @ dense.T if d <= p else dense.T @ dense
        return float(np.linalg.eigvalsh(gram)[-1]), True, 0
    at = a.T.tocsr()
    v = np.full(p, 1.0 / np.sqrt(p))
    lam_prev = 0.0
    for it in range(1, _POWER_MAXITER + 1):
        w = a @ v
        lam = float(w @ w)
        z = at @ w
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0, True, it
        v = z / nz
        if abs(lam - lam_prev) <= _POWER_TOL * max(lam, 1.0):
            return lam, True, it
        lam_prev = lam
    return lam, False, _POWER_MAXITER


def opnorm_sq_weighted(K: BlockMatrix, sigma, return_info: bool = False):
    """Squared spectral norm of ``K diag(1/sqrt(sigma))``.

    ``sigma`` holds one positive weight per column block; every column in
    block ``j`` gets scaled by ``1/sqrt(sigma_j)``.  Non-convergence past
    the iteration cap is flagged on the returned :class:`OpnormInfo`, not
    raised.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (K.n_col_blocks,):
        raise ValueError(
            f"expected {K.n_col_blocks} column-block weights, got shape {sigma.shape}"
        )
    if np.any(sigma <= 0):
        raise ValueError("column-block weights must be positive")
    col_scale = np.empty(K.p)
    for j in range(K.n_col_blocks):
        col_scale[K.col_partition.block(j)] = 1.0 / np.sqrt(sigma[j])
    scaled = K._csr @ sp.diags(col_scale)
    value, converged, its = _opnorm_sq(sp.csr_matrix(scaled))
    info = OpnormInfo(value=value, converged=converged, iterations=its)
    if return_info:
        return value, info
    return value
