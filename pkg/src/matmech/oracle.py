"""Independent verification paths.

Nothing here calls the pseudo-inverse, sensitivity or noise routines it is
meant to check: noise comes from numpy's own PCG64 ``laplace``, sensitivities
are recomputed inline, and least squares goes through hand-rolled
full-pivot elimination on the normal equations. The one exception is
:func:`gaussian_variance_check`, which measures the mechanism's own Gaussian
sampler against an independently computed scale.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import range_query_errors, total_error
from .errors import DimensionMismatch, IllConditioned, NotPowerOfTwo

PIVOT_RATIO_LIMIT = 1e14
_CHUNK = 1 << 17


@dataclass(frozen=True)
class McReport:
    trials: int
    empirical_mse: np.ndarray
    predicted_mse: np.ndarray
    max_rel_err: float
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def rel_err(self) -> np.ndarray:
        return np.abs(self.empirical_mse - self.predicted_mse) / self.predicted_mse


def _report(trials, emp, pred, **extra) -> McReport:
    rel = np.abs(emp - pred) / pred
    return McReport(trials, emp, pred, float(rel.max()), extra)


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, chunk]))


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(i, min(_CHUNK, trials - start)) for i, start in enumerate(range(0, trials, _CHUNK))]


def _sum_sq_parallel(work, trials: int, threads: int) -> np.ndarray:
    """Sum per-chunk sums of squares in chunk order, so thread count never changes the result."""
    chunks = _chunks(trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: work(*c), chunks))
    else:
        parts = [work(*c) for c in chunks]
    total = parts[0].copy()
    for p in parts[1:]:
        total += p
    return total


def monte_carlo_error(W, A, x, epsilon: float, trials: int, seed: int = 0, threads: int = 1) -> McReport:
    """Empirical per-query MSE of the matrix mechanism against the closed form."""
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    x = np.asarray(x, dtype=np.float64).ravel()
    if W.shape[1] != A.shape[1] or x.shape[0] != A.shape[1]:
        raise DimensionMismatch("W, A and x must agree on the domain size")
    scale = np.abs(A).sum(axis=0).max() / epsilon
    normal = A.T @ A
    truth = W @ x
    Ax = A @ x

    def work(chunk, size):
        noise = _rng(seed, chunk).laplace(0.0, scale, size=(A.shape[0], size))
        xhat = np.linalg.solve(normal, A.T @ (Ax[:, None] + noise))
        err = W @ xhat - truth[:, None]
        return (err * err).sum(axis=1)

    emp = _sum_sq_parallel(work, trials, threads) / trials
    pred = total_error(A, W, epsilon).per_query
    return _report(trials, emp, pred)


def _full_pivot_lu(N: np.ndarray):
    """In-place Gaussian elimination with complete pivoting: ``P N Q = L U``."""
    n = N.shape[0]
    LU = N.copy()
    rows = np.arange(n)
    cols = np.arange(n)
    pivots = np.empty(n)
    for k in range(n):
        sub = np.abs(LU[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        i += k
        j += k
        LU[[k, i]] = LU[[i, k]]
        rows[[k, i]] = rows[[i, k]]
        LU[:, [k, j]] = LU[:, [j, k]]
        cols[[k, j]] = cols[[j, k]]
        pivots[k] = LU[k, k]
        if pivots[k] == 0.0:
            raise IllConditioned("normal equations are singular")
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    ratio = np.abs(pivots).max() / np.abs(pivots).min()
    if ratio > PIVOT_RATIO_LIMIT:
        raise IllConditioned(f"pivot ratio {ratio:.3g} exceeds {PIVOT_RATIO_LIMIT:.0e}")
    return LU, rows, cols


def _lu_solve(LU, rows, cols, b):
    n = LU.shape[0]
    z = b[rows].astype(np.float64)
    for k in range(n):
        z[k + 1:] -= LU[k + 1:, k] * z[k]
    for k in range(n - 1, -1, -1):
        z[k] = (z[k] - LU[k, k + 1:] @ z[k + 1:]) / LU[k, k]
    out = np.empty(n)
    out[cols] = z
    return out


def least_squares_oracle(A, y, refine: int = 4) -> np.ndarray:
    """``argmin ||A x - y||`` from the normal equations, with iterative refinement."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"y has length {y.shape[0]}, A has {A.shape[0]} rows")
    if A.shape[0] < A.shape[1]:
        raise IllConditioned("fewer rows than columns")
    LU, rows, cols = _full_pivot_lu(A.T @ A)
    x = _lu_solve(LU, rows, cols, A.T @ y)
    for _ in range(refine):
        x = x + _lu_solve(LU, rows, cols, A.T @ (y - A @ x))
    return x


def haar_coefficient_matrix(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix of the averaging Haar scheme and the subtree weights.

    Row 0 averages everything; every other row is ``+1/w`` over the left half
    of a subtree of ``w`` leaves and ``-1/w`` over its right half.
    """
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"n={n} is not a power of two")
    rows = [np.full(n, 1.0 / n)]
    weights = [n]
    width = n
    while width > 1:
        half = width // 2
        for start in range(0, n, width):
            z = np.zeros(n)
            z[start:start + half] = 1.0 / width
            z[start + half:start + width] = -1.0 / width
            rows.append(z)
            weights.append(width)
        width = half
    return np.array(rows), np.array(weights, dtype=np.float64)


def haar_structural_identity(n: int, Y=None) -> bool:
    """``diag(weights) @ coefficients`` equals the Haar strategy exactly."""
    Z, w = haar_coefficient_matrix(n)
    if Y is None:
        from .strategies import wavelet_strategy

        Y = wavelet_strategy(n)
    return bool(np.array_equal(w[:, None] * Z, Y))


def haar_equivalence_check(n: int, epsilon: float, trials: int, seed: int = 0, threads: int = 1) -> McReport:
    """Covariance diagonals of the per-level Haar scheme and of the Y_n mechanism.

    Both are compared with ``2 (1 + log2 n)^2 / eps^2 * diag((Y^T Y)^{-1})``;
    ``empirical_mse`` holds the Haar-scheme diagonal and ``extra["matrix"]``
    the one from measuring Y_n with uniform Laplace noise.
    """
    Z, w = haar_coefficient_matrix(n)
    Y = w[:, None] * Z
    levels = 1 + math.log2(n)
    per_row = levels / (epsilon * w)
    uniform = levels / epsilon

    def work(scheme):
        def run(chunk, size):
            rng = _rng(seed, 2 * chunk + scheme)
            if scheme == 0:
                noise = rng.laplace(0.0, 1.0, size=(n, size)) * per_row[:, None]
                est = np.linalg.solve(Z, noise)
            else:
                noise = rng.laplace(0.0, uniform, size=(n, size))
                est = np.linalg.solve(Y, noise)
            return (est * est).sum(axis=1)

        return run

    haar = _sum_sq_parallel(work(0), trials, threads) / trials
    direct = _sum_sq_parallel(work(1), trials, threads) / trials
    pred = 2.0 * levels**2 / epsilon**2 * np.diag(np.linalg.inv(Y.T @ Y))
    rel = max(np.max(np.abs(haar - pred) / pred), np.max(np.abs(direct - pred) / pred))
    return McReport(trials, haar, pred, float(rel), {"matrix": direct})


def gaussian_variance_check(W, epsilon: float, delta: float, trials: int, seed: int = 0) -> McReport:
    """Per-entry variance of Gaussian mechanism noise against ``8 ln(2/delta) ||W||_2^2 / eps^2``."""
    from .mechanism import PrivacyParams, gaussian_noise

    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    PrivacyParams(epsilon, delta)
    bound = math.sqrt(float((W * W).sum(axis=0).max()))
    draws = gaussian_noise((trials, W.shape[0]), delta, seed) * (bound / epsilon)
    emp = draws.var(axis=0)
    pred = np.full(W.shape[0], 8.0 * math.log(2.0 / delta) * bound**2 / epsilon**2)
    return _report(trials, emp, pred)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    max_error: float
    total_error: float
    max_ratio: float
    total_ratio: float


def _growth(kind: str, n: int) -> tuple[float, float]:
    """Claimed growth of (max, total) error over all ranges, up to constants."""
    log = math.log2(n)
    if kind in ("hier", "wavelet"):
        return log**3, n * n * log**3
    if kind == "identity":
        return float(n), float(n) ** 3
    raise ValueError(f"unknown kind {kind!r}")


def growth_table(kind: str, n_list, epsilon: float = 1.0) -> list[GrowthRow]:
    from .strategies import hierarchical_strategy, identity_strategy, wavelet_strategy

    build = {"hier": hierarchical_strategy, "wavelet": wavelet_strategy, "identity": identity_strategy}[kind]
    out = []
    for n in n_list:
        if n < 2 or n & (n - 1):
            raise NotPowerOfTwo(f"n={n} is not a power of two")
        errs = range_query_errors(build(n), epsilon)
        gm, gt = _growth(kind, n)
        mx, tot = float(errs.max()), float(errs.sum())
        out.append(GrowthRow(n, mx, tot, mx * epsilon**2 / gm, tot * epsilon**2 / gt))
    return out


def growth_band(rows, attr: str = "max_ratio") -> float:
    """Spread ``max / min`` of a normalized column."""
    vals = [getattr(r, attr) for r in rows]
    return max(vals) / min(vals)


def range_growth_check(kind: str, workload: str = "ranges", n_list=(16, 32, 64, 128, 256, 512, 1024)):
    """Growth table plus whether the normalized max and total errors stay within a 2x band."""
    if workload != "ranges":
        raise ValueError("only the all-ranges workload is supported")
    rows = growth_table(kind, n_list)
    ok = growth_band(rows, "max_ratio") < 2.0 and growth_band(rows, "total_ratio") < 2.0
    return rows, ok
