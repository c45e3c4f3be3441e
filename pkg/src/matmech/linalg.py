"""Dense matrix primitives: sensitivities, rank, pseudo-inverse, SVD and
spectral factorizations, and the :class:`Strategy` wrapper.

Query matrices are plain 2-D ``float64`` arrays whose rows are linear
queries over a count vector. Decompositions are made deterministic: values
are sorted nonincreasing (stable, so ties keep solver order) and every
right-singular / eigen vector is sign-flipped so its first nonzero entry is
nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NonPositiveScale,
    NotPositiveDefinite,
    NotSymmetric,
    RankDeficient,
)

RANK_RTOL = 1e-10
SYMMETRY_TOL = 1e-10


class SingularDecomposition(NamedTuple):
    left: np.ndarray  # m x m orthogonal
    diag: np.ndarray  # m x n, nonnegative diagonal
    right: np.ndarray  # n x n orthogonal

    @property
    def values(self) -> np.ndarray:
        return np.diagonal(self.diag).copy()

    def reconstruct(self) -> np.ndarray:
        return self.left @ self.diag @ self.right.T


class SpectralDecomposition(NamedTuple):
    eigvecs: np.ndarray  # columns are eigenvectors
    eigvals: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.T


def as_matrix(Q, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least one row and column."""
    arr = np.asarray(Q, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def l1_sensitivity(Q) -> float:
    """Maximum L1 norm of a column."""
    Q = as_matrix(Q)
    return float(np.abs(Q).sum(axis=0).max())


def l2_column_bound(Q) -> float:
    """Maximum L2 norm of a column."""
    Q = as_matrix(Q)
    scale = np.abs(Q).max()
    if scale == 0.0:
        return 0.0
    # scale first so tiny or huge entries neither underflow nor overflow when squared
    Qs = Q / scale
    return float(scale * np.sqrt((Qs * Qs).sum(axis=0)).max())


def rank(Q) -> int:
    Q = as_matrix(Q)
    s = np.linalg.svd(Q, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > RANK_RTOL * s[0]))


def _sign_fix(vecs: np.ndarray) -> np.ndarray:
    """Per-column signs that make each column's first nonzero entry >= 0."""
    signs = np.ones(vecs.shape[1])
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        big = np.abs(col) > 1e-10 * max(np.abs(col).max(), 1e-300)
        if big.any() and col[np.argmax(big)] < 0:
            signs[j] = -1.0
    return signs


def svd(A) -> SingularDecomposition:
    A = as_matrix(A)
    m, n = A.shape
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    k = len(s)
    V = Vt.T.copy()
    V[:, :k] = V[:, :k][:, order]
    U = U.copy()
    U[:, :k] = U[:, :k][:, order]
    signs = _sign_fix(V)
    V = V * signs
    U[:, :k] = U[:, :k] * signs[:k]
    D = np.zeros((m, n))
    D[np.arange(k), np.arange(k)] = s
    return SingularDecomposition(U, D, V)


def check_symmetric(M, name: str = "matrix") -> np.ndarray:
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"{name} is not square: {M.shape}")
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.T).max() > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")
    return (M + M.T) / 2


def spectral(M) -> SpectralDecomposition:
    M = check_symmetric(M)
    w, V = np.linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    return SpectralDecomposition(V * _sign_fix(V), w)


def pseudo_inverse(A) -> np.ndarray:
    """Left inverse ``(A^T A)^{-1} A^T`` of a full-column-rank matrix, via SVD."""
    A = as_matrix(A)
    m, n = A.shape
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if m < n or s[-1] <= RANK_RTOL * s[0]:
        raise RankDeficient(f"matrix of shape {A.shape} has rank {rank(A)} < {n}")
    return (Vt.T / s) @ U.T


def scale_rows(A, scales) -> np.ndarray:
    A = as_matrix(A)
    scales = np.asarray(scales, dtype=np.float64).ravel()
    if scales.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"{len(scales)} scales for {A.shape[0]} rows")
    if np.any(scales <= 0) or not np.all(np.isfinite(scales)):
        raise NonPositiveScale("row scales must be positive and finite")
    return A * scales[:, None]


def inverse_gram(A) -> np.ndarray:
    """``(A^T A)^{-1}`` by Cholesky solve; never forms an explicit inverse."""
    A = as_matrix(A)
    G = A.T @ A
    try:
        factor = scipy.linalg.cho_factor(G, lower=True)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient(f"A^T A is singular for matrix of shape {A.shape}") from exc
    Z = scipy.linalg.cho_solve(factor, np.eye(G.shape[0]))
    return (Z + Z.T) / 2


def sym_sqrt(M) -> np.ndarray:
    """Symmetric positive square root of a positive semi-definite matrix."""
    dec = spectral(M)
    if dec.eigvals.min() < -1e-10 * max(1.0, abs(dec.eigvals.max())):
        raise NotPositiveDefinite("matrix has negative eigenvalues")
    return (dec.eigvecs * np.sqrt(np.clip(dec.eigvals, 0, None))) @ dec.eigvecs.T


@dataclass(frozen=True, eq=False)
class Strategy:
    """A full-column-rank query matrix with lazily cached derived quantities.

    The wrapped array is copied and made read-only so the caches can never
    go stale.
    """

    matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        A = np.array(as_matrix(self.matrix, "strategy"), copy=True)
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        m, n = A.shape
        if m < n or rank(A) < n:
            raise RankDeficient(f"strategy {self.name!r} of shape {A.shape} is not full column rank")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def sensitivity(self) -> float:
        return l1_sensitivity(self.matrix)

    @cached_property
    def l2_bound(self) -> float:
        return l2_column_bound(self.matrix)

    @cached_property
    def pinv(self) -> np.ndarray:
        return pseudo_inverse(self.matrix)

    @cached_property
    def gram(self) -> np.ndarray:
        return self.matrix.T @ self.matrix

    @cached_property
    def inverse_gram(self) -> np.ndarray:
        return inverse_gram(self.matrix)

    @cached_property
    def svd(self) -> SingularDecomposition:
        return svd(self.matrix)


def as_strategy(A, name: str | None = None) -> Strategy:
    if isinstance(A, Strategy):
        return A
    return Strategy(A, name or "custom")
