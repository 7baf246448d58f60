"""Dataset ingestion and synthetic instance generation.

All generation runs on numpy's Philox bit generator (64-bit,
counter-based, splittable), so a seed pins every byte of the output on
any platform.  Laplace noise is drawn through the inverse CDF
``u in (-1/2, 1/2) -> -scale * sign(u) * ln(1 - 2|u|)`` rather than a
library sampler, to keep the construction explicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .blockmat import Partition

__all__ = [
    "Dataset",
    "ParseError",
    "parse_libsvm",
    "write_libsvm",
    "partition",
    "gen_lad",
    "gen_svm",
    "save_lad_instance",
    "load_lad_instance",
]


class ParseError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Dataset:
    """Sparse sample matrix plus optional labels.

    Row indices are 0-based internally; the LIBSVM text format is
    1-based on disk.
    """

    matrix: sp.csr_matrix
    labels: np.ndarray | None

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]


def parse_libsvm(source, n_features: int | None = None) -> Dataset:
    """Parse LIBSVM text: one ``label idx:val idx:val ...`` line per sample.

    ``source`` may be a string or any iterable of lines.  ``#`` starts a
    comment.  Indices are 1-based in the file and must be strictly
    increasing within a row; the feature count defaults to the largest
    index seen unless overridden.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]
    labels: list[float] = []
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    max_index = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise ParseError(lineno, f"bad label {tokens[0]!r}") from None
        prev = -1
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(lineno, f"expected index:value, got {tok!r}")
            try:
                idx = int(idx_s)
            except ValueError:
                raise ParseError(lineno, f"bad index {idx_s!r}") from None
            try:
                val = float(val_s)
            except ValueError:
                raise ParseError(lineno, f"bad value {val_s!r}") from None
            if idx < 1:
                raise ParseError(lineno, f"index {idx} must be >= 1")
            internal = idx - 1
            if internal <= prev:
                raise ParseError(lineno, f"index {idx} not increasing")
            prev = internal
            indices.append(internal)
            values.append(val)
        indptr.append(len(indices))
        if prev > max_index:
            max_index = prev
    if n_features is None:
        n_features = max_index + 1
    elif max_index >= n_features:
        raise ValueError(
            f"declared {n_features} features but saw index {max_index + 1}"
        )
    mat = sp.csr_matrix(
        (np.array(values), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(labels), n_features),
    )
    return Dataset(matrix=mat, labels=np.array(labels))


def write_libsvm(dataset: Dataset) -> str:
    """Serialize a dataset back to LIBSVM text (1-based indices)."""
    mat = dataset.matrix
    labels = dataset.labels
    if labels is None:
        labels = np.ones(dataset.n_samples)
    out = []
    for i in range(dataset.n_samples):
        row = mat.getrow(i)
        parts = [_fmt(labels[i])]
        for idx, val in zip(row.indices, row.data):
            parts.append(f"{idx + 1}:{_fmt(val)}")
        out.append(" ".join(parts))
    return "\n".join(out) + ("\n" if out else "")


def _fmt(x: float) -> str:
    return repr(float(x))


def partition(dim: int, n_blocks: int) -> Partition:
    """Contiguous near-equal partition: the first dim % n blocks get the ceil size."""
    if not 1 <= n_blocks <= dim:
        raise ValueError(f"need 1 <= n_blocks <= {dim}, got {n_blocks}")
    base, extra = divmod(dim, n_blocks)
    sizes = np.full(n_blocks, base, dtype=np.int64)
    sizes[:extra] += 1
    return Partition(np.concatenate(([0], np.cumsum(sizes))))


def _laplace(rng: np.random.Generator, size: int, scale: float) -> np.ndarray:
    u = rng.random(size) - 0.5
    # log1p(-2|u|) keeps precision near u = 0 and maps the measure-zero
    # endpoint u = -1/2 to a large finite draw instead of -inf.
    mag = np.maximum(1.0 - 2.0 * np.abs(u), np.finfo(np.float64).tiny)
    return -scale * np.sign(u) * np.log(mag)


def gen_lad(
    d: int,
    p: int,
    density: float,
    noise_scale: float = 0.1,
    x_support: float = 0.05,
    seed: int = 0,
):
    """Synthetic LAD instance: Gaussian K, sparse planted x, Laplace noise.

    Each K entry is nonzero independently with probability ``density``
    and standard normal when present; ``x_support`` is the planted
    support fraction (at least one coordinate); b = K x + noise.
    Draw order (mask, values, support, x values, noise) is fixed, so a
    seed determines the triple bit-for-bit.
    """
    if not 0 < density <= 1:
        raise ValueError(f"density must be in (0, 1], got {density}")
    if d < 1 or p < 1:
        raise ValueError("dimensions must be positive")
    rng = np.random.Generator(np.random.Philox(key=seed))
    mask = rng.random((d, p)) < density
    values = rng.standard_normal(int(mask.sum()))
    K = sp.csr_matrix((values, np.nonzero(mask.ravel())[0] % p, _row_ptr(mask)), shape=(d, p))
    support = max(1, int(round(x_support * p)))
    idx = rng.choice(p, size=support, replace=False)
    x_nat = np.zeros(p)
    x_nat[np.sort(idx)] = rng.standard_normal(support)
    b = K @ x_nat
    if noise_scale > 0:
        b = b + _laplace(rng, d, noise_scale)
    return K, b, x_nat


def _row_ptr(mask: np.ndarray) -> np.ndarray:
    counts = mask.sum(axis=1)
    return np.concatenate(([0], np.cumsum(counts))).astype(np.int64)


def gen_svm(
    m: int,
    p: int,
    margin_lo: float = 1.0,
    margin_spread: float = 1.0,
    row_scale: float = 5.0,
    flip_fraction: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Synthetic binary classification data for desk-scale SVM runs.

    Rows start as unit-norm Gaussians; the component along a random unit
    teacher direction is replaced by a planted functional margin of
    magnitude margin_lo + margin_spread*U with a random sign that
    becomes the label, and the orthogonal part is stretched by
    ``row_scale``.  With no flips the data is separable with margin
    ``margin_lo`` at a unit-norm classifier, which keeps the solution
    norm O(1) even for tiny ridge weights.  Fully determined by the
    seed.
    """
    if margin_lo <= 0:
        raise ValueError(f"margin must be positive, got {margin_lo}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    A = rng.standard_normal((m, p))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    w = rng.standard_normal(p)
    w /= np.linalg.norm(w)
    margins = margin_lo + margin_spread * rng.random(m)
    labels = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    A = row_scale * (A - np.outer(A @ w, w)) + np.outer(margins * labels, w)
    if flip_fraction > 0:
        flips = rng.random(m) < flip_fraction
        labels = np.where(flips, -labels, labels)
    return Dataset(matrix=sp.csr_matrix(A), labels=labels)


_LAD_MAGIC = "RANDPD-LAD 1"


def save_lad_instance(path, K: sp.spmatrix, b: np.ndarray, x_nat: np.ndarray) -> None:
    """Write a synthetic LAD triple as documented text.

    Format: magic line, ``d p nnz`` line, then nnz COO lines
    ``row col value``, then d lines of b, then p lines of the planted x.
    Floats use shortest round-trip repr, so load(save(...)) is exact.
    """
    coo = sp.coo_matrix(K)
    d, p = coo.shape
    with open(path, "w") as fh:
        fh.write(_LAD_MAGIC + "\n")
        fh.write(f"{d} {p} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {_fmt(v)}\n")
        for v in b:
            fh.write(_fmt(v) + "\n")
        for v in x_nat:
            fh.write(_fmt(v) + "\n")


def load_lad_instance(path):
    """Read back a triple written by :func:`save_lad_instance`."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _LAD_MAGIC:
        raise ParseError(1, f"expected magic {_LAD_MAGIC!r}")
    try:
        d, p, nnz = (int(t) for t in lines[1].split())
    except ValueError:
        raise ParseError(2, "expected 'd p nnz'") from None
    expected = 2 + nnz + d + p
    if len(lines) < expected:
        raise ParseError(len(lines), f"expected {expected} lines, got {len(lines)}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for t, line in enumerate(lines[2 : 2 + nnz]):
        i_s, j_s, v_s = line.split()
        rows[t], cols[t], vals[t] = int(i_s), int(j_s), float(v_s)
    K = sp.csr_matrix((vals, (rows, cols)), shape=(d, p))
    b = np.array([float(t) for t in lines[2 + nnz : 2 + nnz + d]])
    x_nat = np.array([float(t) for t in lines[2 + nnz + d : expected]])
    return K, b, x_nat
