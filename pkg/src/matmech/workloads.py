"""Benchmark workload generators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import io
from .errors import DomainTooLarge, MatMechError, RankDeficient
from .linalg import as_matrix, rank, spectral

MAX_PREDICATE_N = 16


def all_range_queries(n: int) -> np.ndarray:
    """Every interval ``[a, b]`` with ``0 <= a <= b < n``, ordered by ``(a, b)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = np.triu_indices(n)
    cols = np.arange(n)
    return ((cols >= a[:, None]) & (cols <= b[:, None])).astype(np.float64)


def all_predicate_queries(n: int) -> np.ndarray:
    """One 0/1 row per nonempty subset, in ascending bitmask order (bit j -> column j)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_PREDICATE_N:
        raise DomainTooLarge(f"predicate workload needs 2^{n}-1 rows; n is capped at {MAX_PREDICATE_N}")
    masks = np.arange(1, 2**n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)


def identity_workload(n: int) -> np.ndarray:
    return np.eye(n)


def workload_reduce(W) -> np.ndarray:
    """Square workload ``V`` with ``V^T V = W^T W`` (``V = sqrt(D) P^T``)."""
    W = as_matrix(W, "workload")
    m, n = W.shape
    if m < n or rank(W) < n:
        raise RankDeficient(f"workload of shape {W.shape} is not full column rank")
    dec = spectral(W.T @ W)
    return np.sqrt(np.clip(dec.eigvals, 0, None))[:, None] * dec.eigvecs.T


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str  # "all-ranges" | "all-predicates" | "identity" | "file"
    n: int | None = None
    path: str | None = None

    def build(self) -> np.ndarray:
        if self.kind == "file":
            W = io.read_matrix(self.path)
            if self.n is not None and W.shape[1] != self.n:
                raise MatMechError(f"{self.path}: {W.shape[1]} columns, expected n={self.n}")
            return W
        if self.n is None or self.n < 1:
            raise MatMechError(f"workload {self.kind!r} needs n >= 1")
        if self.kind == "all-ranges":
            return all_range_queries(self.n)
        if self.kind == "all-predicates":
            return all_predicate_queries(self.n)
        if self.kind == "identity":
            return identity_workload(self.n)
        raise MatMechError(f"unknown workload kind {self.kind!r}")


_CLI_NAMES = {"ranges": "all-ranges", "predicates": "all-predicates", "identity": "identity"}


def parse_workload(name: str, n: int | None = None) -> WorkloadSpec:
    """Map a CLI name (``ranges``, ``predicates``, ``identity``, ``file:<path>``) to a spec."""
    if name.startswith("file:"):
        return WorkloadSpec("file", n, name[len("file:"):])
    if name not in _CLI_NAMES:
        raise MatMechError(f"unknown workload {name!r}; choose from {sorted(_CLI_NAMES)} or file:<path>")
    return WorkloadSpec(_CLI_NAMES[name], n)
