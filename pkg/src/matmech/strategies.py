"""Named strategies: identity, binary hierarchy H_n, Haar wavelet Y_n, and
the square "decomposed" variants built from the closed-form eigenvectors of
H_n^T H_n and Y_n^T Y_n.

Only branching factor 2 is supported and n must be a power of two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import io
from .errors import MatMechError, NotPowerOfTwo


def _log2(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1 or (n & (n - 1)):
        raise NotPowerOfTwo(f"n={n} is not a power of two")
    return int(n).bit_length() - 1


def identity_strategy(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.eye(n)


def hierarchical_strategy(n: int) -> np.ndarray:
    """(2n-1) x n interval sums of a complete binary tree, root first, leaves last."""
    k = _log2(n)
    rows = []
    for level in range(k + 1):
        width = n >> level
        for start in range(0, n, width):
            r = np.zeros(n)
            r[start:start + width] = 1.0
            rows.append(r)
    return np.array(rows)


def wavelet_strategy(n: int) -> np.ndarray:
    """n x n Haar matrix: total row, then +1/-1 difference rows coarse to fine."""
    k = _log2(n)
    rows = [np.ones(n)]
    for level in range(k):
        width = n >> level
        half = width // 2
        for start in range(0, n, width):
            r = np.zeros(n)
            r[start:start + half] = 1.0
            r[start + half:start + width] = -1.0
            rows.append(r)
    return np.array(rows)


@dataclass(frozen=True)
class EigenSummary:
    pairs: tuple[tuple[float, int], ...]  # (eigenvalue, multiplicity), ascending

    @property
    def n(self) -> int:
        return sum(mult for _, mult in self.pairs)

    def values(self) -> np.ndarray:
        """All eigenvalues with multiplicity, ascending."""
        return np.concatenate([np.full(mult, val, dtype=float) for val, mult in self.pairs])


def eigen_summary(kind: str, n: int) -> EigenSummary:
    """Eigenvalues of A^T A for A = H_n (``kind="hier"``) or Y_n (``"wavelet"``)."""
    k = _log2(n)
    if k == 0:
        return EigenSummary(((1.0, 1),))
    if kind == "hier":
        pairs = [(float(2**j - 1), 2 ** (k - j)) for j in range(1, k + 1)]
        pairs.append((float(2 ** (k + 1) - 1), 1))
    elif kind == "wavelet":
        pairs = [(float(2**j), 2 ** (k - j)) for j in range(1, k)]
        pairs.append((float(2**k), 2))
    else:
        raise MatMechError(f"unknown kind {kind!r}; expected 'hier' or 'wavelet'")
    return EigenSummary(tuple(pairs))


def _difference_vectors(n: int, j: int) -> list[np.ndarray]:
    """Blocks of width 2^j with +1 on the left half and -1 on the right, left to right."""
    width = 2**j
    out = []
    for start in range(0, n, width):
        v = np.zeros(n)
        v[start:start + width // 2] = 1.0
        v[start + width // 2:start + width] = -1.0
        out.append(v)
    return out


def table_eigenpairs(kind: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvalues and unnormalized eigenvectors (as rows).

    Order: difference vectors grouped by block width 2, 4, ..., then the top
    eigenvectors. For the wavelet the degenerate top pair (all-ones and the
    root difference) is replaced by the indicators of the two halves, which
    span the same eigenspace and give lower column sums.
    """
    k = _log2(n)
    if k < 1:
        raise NotPowerOfTwo("decomposition needs n = 2^k with k >= 1")
    vals, vecs = [], []
    if kind == "hier":
        for j in range(1, k + 1):
            for v in _difference_vectors(n, j):
                vals.append(2.0**j - 1)
                vecs.append(v)
        vals.append(2.0 ** (k + 1) - 1)
        vecs.append(np.ones(n))
    elif kind == "wavelet":
        for j in range(1, k):
            for v in _difference_vectors(n, j):
                vals.append(2.0**j)
                vecs.append(v)
        left = np.zeros(n)
        left[: n // 2] = 1.0
        vals += [2.0**k, 2.0**k]
        vecs += [left, 1.0 - left]
    else:
        raise MatMechError(f"unknown kind {kind!r}; expected 'hier' or 'wavelet'")
    return np.array(vals), np.array(vecs)


def decomposed_strategy(kind: str, n: int) -> np.ndarray:
    """Square strategy ``diag(sqrt(lambda)) P`` with the same error profile as H_n or Y_n."""
    vals, vecs = table_eigenpairs(kind, n)
    P = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    return np.sqrt(vals)[:, None] * P


def decomposed_sensitivity(kind: str, n: int) -> float:
    """Closed-form L1 sensitivity of :func:`decomposed_strategy`."""
    k = _log2(n)
    if kind == "hier":
        return float(sum(np.sqrt(1 - 2.0**-j) for j in range(1, k + 1)) + np.sqrt(2 - 2.0**-k))
    if kind == "wavelet":
        return k + np.sqrt(2) - 1
    raise MatMechError(f"unknown kind {kind!r}")


STRATEGY_NAMES = ("identity", "hier", "wavelet", "hier-decomposed", "wavelet-decomposed")


def build_strategy(name: str, n: int | None = None) -> np.ndarray:
    """Resolve a CLI strategy name (or ``file:<path>``) to a matrix."""
    if name.startswith("file:"):
        A = io.read_matrix(name[len("file:"):])
        if n is not None and A.shape[1] != n:
            raise MatMechError(f"{name}: {A.shape[1]} columns, expected n={n}")
        return A
    if n is None:
        raise MatMechError(f"strategy {name!r} needs --n")
    if name == "identity":
        return identity_strategy(n)
    if name == "hier":
        return hierarchical_strategy(n)
    if name == "wavelet":
        return wavelet_strategy(n)
    if name == "hier-decomposed":
        return decomposed_strategy("hier", n)
    if name == "wavelet-decomposed":
        return decomposed_strategy("wavelet", n)
    raise MatMechError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)} or file:<path>")
