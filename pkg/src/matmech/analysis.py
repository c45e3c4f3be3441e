"""Closed-form error accounting for the matrix mechanism.

The mean squared error of answering query ``w`` with strategy ``A`` is
``(2/eps^2) * sens(A)^2 * w M w^T`` where ``M = (A^T A)^{-1}`` is the error
profile. Workload totals are the trace form ``trace(M W^T W)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite
from .linalg import (
    SpectralDecomposition,
    Strategy,
    as_matrix,
    as_strategy,
    check_symmetric,
    spectral,
)

_CHUNK_ROWS = 8192


@dataclass(frozen=True, eq=False)
class ErrorProfile:
    matrix: np.ndarray

    def __post_init__(self):
        M = check_symmetric(self.matrix, "error profile")
        object.__setattr__(self, "matrix", M)
        if self.spectral.eigvals.min() <= 0:
            raise NotPositiveDefinite("error profile must be positive definite")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectral(self) -> SpectralDecomposition:
        return spectral(self.matrix)

    def term(self, w) -> float:
        """Profile term ``w M w^T``."""
        w = np.asarray(w, dtype=np.float64).ravel()
        return float(w @ self.matrix @ w)


@dataclass(frozen=True)
class ErrorReport:
    per_query: np.ndarray
    total: float
    max: float
    epsilon: float
    strategy_id: str = "strategy"
    workload_id: str = "workload"


def _noise_factor(A: Strategy, epsilon: float) -> float:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return 2.0 * A.sensitivity**2 / epsilon**2


def error_profile(A) -> ErrorProfile:
    return ErrorProfile(as_strategy(A).inverse_gram)


def _quadratic_rows(W: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``diag(W M W^T)`` in row chunks."""
    out = np.empty(W.shape[0])
    for start in range(0, W.shape[0], _CHUNK_ROWS):
        block = W[start:start + _CHUNK_ROWS]
        out[start:start + len(block)] = np.einsum("ij,ij->i", block @ M, block)
    return out


def query_error(A, w, epsilon: float) -> float:
    A = as_strategy(A)
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.shape[0] != A.n:
        raise DimensionMismatch(f"query has length {w.shape[0]}, strategy has {A.n} columns")
    return _noise_factor(A, epsilon) * float(w @ A.inverse_gram @ w)


def total_error(A, W, epsilon: float, strategy_id: str | None = None, workload_id: str = "workload") -> ErrorReport:
    A = as_strategy(A)
    W = as_matrix(W, "workload")
    if W.shape[1] != A.n:
        raise DimensionMismatch(f"workload has {W.shape[1]} columns, strategy has {A.n}")
    c = _noise_factor(A, epsilon)
    M = A.inverse_gram
    per_query = c * _quadratic_rows(W, M)
    total = c * float(np.trace(M @ (W.T @ W)))
    return ErrorReport(per_query, total, float(per_query.max()), epsilon, strategy_id or A.name, workload_id)


def max_error(A, W, epsilon: float) -> float:
    A = as_strategy(A)
    W = as_matrix(W, "workload")
    if W.shape[1] != A.n:
        raise DimensionMismatch(f"workload has {W.shape[1]} columns, strategy has {A.n}")
    return _noise_factor(A, epsilon) * float(_quadratic_rows(W, A.inverse_gram).max())


def range_query_errors(A, epsilon: float) -> np.ndarray:
    """Per-query errors for every interval query, in ``all_range_queries`` order.

    For an interval ``[a, b]`` the profile term is the sum of the square block
    ``M[a:b+1, a:b+1]``, read off 2-D prefix sums in O(n^2) total.
    """
    A = as_strategy(A)
    n = A.n
    S = np.zeros((n + 1, n + 1))
    S[1:, 1:] = A.inverse_gram.cumsum(axis=0).cumsum(axis=1)
    a, b = np.triu_indices(n)
    terms = S[b + 1, b + 1] - S[a, b + 1] - S[b + 1, a] + S[a, a]
    return _noise_factor(A, epsilon) * terms


def profile_equivalent(A, B, tol: float = 1e-8) -> bool:
    A, B = as_strategy(A), as_strategy(B)
    if A.n != B.n:
        raise DimensionMismatch(f"strategies have {A.n} and {B.n} columns")
    return bool(np.abs(A.inverse_gram - B.inverse_gram).max() <= tol)


def strategy_from_profile(M, m: int | None = None) -> Strategy:
    """An ``m x n`` strategy whose error profile is ``M``: ``[diag(1/sqrt(lambda)); 0] P^T``."""
    profile = M if isinstance(M, ErrorProfile) else ErrorProfile(np.asarray(M, dtype=np.float64))
    n = profile.n
    m = n if m is None else m
    if m < n:
        raise DimensionMismatch(f"need at least n={n} rows, got m={m}")
    dec = profile.spectral
    A = np.zeros((m, n))
    A[:n] = dec.eigvecs.T / np.sqrt(dec.eigvals)[:, None]
    return Strategy(A, "from-profile")


def svb_sensitivity(A) -> float:
    """Singular value bound ``sqrt(sum of squared singular values)``."""
    A = as_strategy(A)
    return float(np.sqrt(np.sum(A.svd.values**2)))
