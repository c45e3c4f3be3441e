"""Strategy selection.

* :func:`svb_optimal_strategy`: closed-form minimizer of the singular value
  bound surrogate, ``A = diag(sqrt(s)) P_W^T``.
* :func:`l2_optimal_profile`: L2-column-norm surrogate, descended over the
  gram matrix ``X = A^T A`` (parametrized by its factor ``A``), normalized so
  ``max diag X = 1`` after every step.
* :func:`min_error_descent`: multi-restart descent on the true objective with
  the column-L1 max replaced by a log-sum-exp.
* :func:`min_sensitivity`: profile-preserving candidates plus a plane
  rotation search over the rows.
* :func:`augment` / :func:`auto_augment`: stacking extra rows.

Objectives reported in :class:`OptimizeResult` are always the exact total
error at ``eps = 1``; the smoothed quantities only steer the search.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import DimensionMismatch, NonConvergenceWarning, RankDeficient
from .linalg import (
    Strategy,
    as_matrix,
    as_strategy,
    l1_sensitivity,
    rank,
    spectral,
    svd,
    sym_sqrt,
)
from .mechanism import generator


@dataclass(frozen=True)
class OptimizerOptions:
    max_iters: int = 2000
    step: float = 0.1  # initial step, relative to ||A||_F / ||grad||_F
    smoothing: float = 1e-2  # log-sum-exp temperature as a fraction of the current max
    restarts: int = 4
    seed: int = 0
    tolerance: float = 1e-8
    threads: int = 1
    regularization: float | None = None  # delta for rank-deficient workloads; opt-in only

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1 or self.threads < 1:
            raise ValueError("max_iters, restarts and threads must be >= 1")
        if not (self.step > 0 and self.smoothing > 0 and self.tolerance > 0):
            raise ValueError("step, smoothing and tolerance must be positive")


@dataclass
class OptimizeResult:
    strategy: Strategy
    objective: float
    method: str
    trace_log: list[float] = field(default_factory=list)
    surrogate: float | None = None
    converged: bool = True


def prepare_workload(W, opts: OptimizerOptions | None = None) -> np.ndarray:
    """Validate full column rank, or regularize with ``[W; delta I]`` when asked to."""
    W = as_matrix(W, "workload")
    if W.shape[0] >= W.shape[1] and rank(W) == W.shape[1]:
        return W
    if opts is not None and opts.regularization:
        return np.vstack([W, opts.regularization * np.eye(W.shape[1])])
    raise RankDeficient(
        f"workload of shape {W.shape} is rank deficient; pass an explicit regularization to proceed"
    )


def _trace_term(A: np.ndarray, G: np.ndarray) -> float:
    """``trace((A^T A)^{-1} G)``, or inf when ``A`` is (numerically) rank deficient."""
    try:
        c = scipy.linalg.cho_factor(A.T @ A, lower=True)
    except np.linalg.LinAlgError:
        return math.inf
    return float(np.trace(scipy.linalg.cho_solve(c, G)))


def true_objective(A, G: np.ndarray) -> float:
    """Total error at eps = 1 given ``G = W^T W``."""
    A = A.matrix if isinstance(A, Strategy) else np.asarray(A, dtype=np.float64)
    return 2.0 * l1_sensitivity(A) ** 2 * _trace_term(A, G)


def svb_closed_form(W) -> float:
    """``(sum of singular values of W)^2``: the surrogate optimum."""
    s = np.linalg.svd(as_matrix(W), compute_uv=False)
    return float(np.sum(s)) ** 2


def svb_optimal_strategy(W, opts: OptimizerOptions | None = None) -> OptimizeResult:
    W = prepare_workload(W, opts)
    G = W.T @ W
    dec = svd(W)
    s = dec.values
    A = Strategy(np.sqrt(s)[:, None] * dec.right.T, "svb")
    surrogate = float(np.sum(A.svd.values**2)) * _trace_term(A.matrix, G)
    obj = true_objective(A, G)
    return OptimizeResult(A, obj, "svb", [obj], surrogate)


# -- smooth objectives ----------------------------------------------------


def _lse(v: np.ndarray, mu: float) -> tuple[float, np.ndarray]:
    """Log-sum-exp smoothed max and its gradient (softmax weights)."""
    z = v / mu
    zmax = z.max()
    e = np.exp(z - zmax)
    s = e.sum()
    return mu * (zmax + math.log(s)), e / s


def trace_term_and_grad(A: np.ndarray, G: np.ndarray) -> tuple[float, np.ndarray]:
    """``T = trace((A^T A)^{-1} G)`` and ``dT/dA = -2 A M G M``."""
    c = scipy.linalg.cho_factor(A.T @ A, lower=True)
    MG = scipy.linalg.cho_solve(c, G)
    MGM = scipy.linalg.cho_solve(c, MG.T)
    return float(np.trace(MG)), -2.0 * A @ MGM


def _l1_smooth(A: np.ndarray, G: np.ndarray, mu: float, eta: float):
    """``lse(col L1)^2 * T`` with ``|a|`` smoothed to ``sqrt(a^2 + eta^2)``."""
    T, dT = trace_term_and_grad(A, G)
    ab = np.sqrt(A * A + eta * eta)
    L, p = _lse(ab.sum(axis=0), mu)
    return L * L * T, 2.0 * L * T * (A / ab) * p[None, :] + L * L * dT


def _l2_smooth(A: np.ndarray, G: np.ndarray, mu: float, eta: float):
    T, dT = trace_term_and_grad(A, G)
    L, p = _lse((A * A).sum(axis=0), mu)
    return L * T, 2.0 * T * A * p[None, :] + L * dT


def _l1_scale(A: np.ndarray) -> float:
    return float(np.abs(A).sum(axis=0).max())


def _l2_scale(A: np.ndarray) -> float:
    return math.sqrt(float((A * A).sum(axis=0).max()))


def _descend(A0, G, smooth, exact, scale, opts: OptimizerOptions):
    """L-BFGS on a smoothed objective with continuation on the temperature.

    Each stage rescales ``A`` so its (L1 or L2) column max is 1, which makes
    the temperature an absolute quantity within the stage. Every iterate is
    scored with the exact objective and the best one is returned as
    ``(A, value, log, converged)``.
    """
    A = np.array(A0, dtype=np.float64)
    A /= scale(A)
    best_A, best_val = A.copy(), exact(A)
    log = [best_val]
    if not math.isfinite(best_val):
        return best_A, best_val, log, False
    shape = A.shape
    converged = True

    def record(x):
        nonlocal best_A, best_val
        B = x.reshape(shape)
        B = B / scale(B)
        val = exact(B)
        log.append(val)
        if val < best_val:
            best_A, best_val = B.copy(), val

    for frac in (opts.smoothing, opts.smoothing / 10, opts.smoothing / 100):
        eta = 0.1 * frac

        def fg(x):
            try:
                f, g = smooth(x.reshape(shape), G, frac, eta)
            except np.linalg.LinAlgError:
                return 1e300, np.zeros_like(x)
            return f, g.ravel()

        res = scipy.optimize.minimize(
            fg, A.ravel(), jac=True, method="L-BFGS-B", callback=record,
            options={"maxiter": opts.max_iters, "ftol": opts.tolerance, "gtol": 1e-12},
        )
        converged &= bool(res.success)
        A = res.x.reshape(shape)
        if not np.all(np.isfinite(A)) or scale(A) == 0:
            break
        A = A / scale(A)
        record(A.ravel())
    return best_A, best_val, log, converged


def l2_objective(A, G: np.ndarray) -> float:
    """L2 surrogate ``2 ||A||_2^2 trace((A^T A)^{-1} G)`` at eps = 1."""
    A = A.matrix if isinstance(A, Strategy) else np.asarray(A, dtype=np.float64)
    return 2.0 * float((A * A).sum(axis=0).max()) * _trace_term(A, G)


def l2_optimal_profile(W, opts: OptimizerOptions | None = None) -> OptimizeResult:
    """Minimize the L2 surrogate over ``X = A^T A``, returned as ``A = sqrt(X)``."""
    opts = opts or OptimizerOptions()
    W = prepare_workload(W, opts)
    G = W.T @ W
    n = W.shape[1]
    starts = [np.eye(n), svb_optimal_strategy(W, opts).strategy.matrix]
    exact = lambda A: l2_objective(A, G)  # noqa: E731
    runs = [_descend(A0, G, _l2_smooth, exact, _l2_scale, opts) for A0 in starts]
    i = min(range(len(runs)), key=lambda k: (runs[k][1], k))
    A_best, _, log, conv = runs[i]
    X = A_best.T @ A_best
    A = Strategy(sym_sqrt(X / np.diag(X).max()), "l2")
    if not conv:
        warnings.warn("l2_optimal_profile did not meet tolerance in max_iters", NonConvergenceWarning)
    return OptimizeResult(A, true_objective(A, G), "l2", log, l2_objective(A, G), conv)


def _restart_points(W: np.ndarray, opts: OptimizerOptions, extra) -> list[np.ndarray]:
    n = W.shape[1]
    G = W.T @ W
    pts = [np.eye(n), svb_optimal_strategy(W, opts).strategy.matrix, sym_sqrt(G)]
    # each random restart draws from its own stream
    for idx in range(len(pts), max(opts.restarts, 4)):
        pts.append(generator(opts.seed, stream=idx).standard_normal((n, n)) + np.eye(n))
    pts = pts[: opts.restarts]
    # The workload itself is a feasible strategy; include it when it is not much taller than square.
    if W.shape[0] <= 2 * n:
        pts.append(W.copy())
    pts.extend(np.asarray(e, dtype=np.float64) for e in (extra or []))
    return pts


def min_error_descent(W, opts: OptimizerOptions | None = None, extra_starts=None) -> OptimizeResult:
    opts = opts or OptimizerOptions()
    W = prepare_workload(W, opts)
    G = W.T @ W
    starts = _restart_points(W, opts, extra_starts)
    exact = lambda A: true_objective(A, G)  # noqa: E731

    def run(A0):
        return _descend(A0, G, _l1_smooth, exact, _l1_scale, opts)

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(A0) for A0 in starts]
    i = min(range(len(runs)), key=lambda k: (runs[k][1], k))
    A_best, val, log, conv = runs[i]
    if not conv:
        warnings.warn("min_error_descent did not meet tolerance in max_iters", NonConvergenceWarning)
    A = Strategy(A_best, "descent")
    return OptimizeResult(A, true_objective(A, G), "descent", log, None, conv)


def restart_objectives(W, opts: OptimizerOptions | None = None, extra_starts=None) -> list[float]:
    """Exact objectives of the restart points used by :func:`min_error_descent`."""
    opts = opts or OptimizerOptions()
    W = prepare_workload(W, opts)
    G = W.T @ W
    return [true_objective(A, G) for A in _restart_points(W, opts, extra_starts)]


# -- minimum sensitivity --------------------------------------------------


def eigen_factor(A) -> np.ndarray:
    """``diag(sqrt(lambda)) P^T`` from the spectral decomposition of ``A^T A``."""
    dec = spectral(as_strategy(A).gram)
    return np.sqrt(np.clip(dec.eigvals, 0, None))[:, None] * dec.eigvecs.T


def triangular_factor(A) -> np.ndarray:
    """Upper-triangular ``R`` with ``R^T R = A^T A``."""
    return np.linalg.cholesky(as_strategy(A).gram).T


def _smooth_max(cols: np.ndarray, mu: float) -> np.ndarray:
    """Row-wise log-sum-exp over the last axis."""
    z = cols / mu
    zmax = z.max(axis=-1, keepdims=True)
    return mu * (zmax[..., 0] + np.log(np.exp(z - zmax).sum(axis=-1)))


def rotation_search(A, opts: OptimizerOptions | None = None, max_sweeps: int = 50) -> np.ndarray:
    """Reduce the column-L1 max by Givens rotations of row pairs.

    Row rotations leave ``A^T A`` unchanged. Each pair gets a coarse angle
    grid over one period (pi/2) and a golden-section refinement; sweeps stop
    once a full pass improves the smoothed objective by less than the
    tolerance.
    """
    opts = opts or OptimizerOptions()
    A = np.array(as_matrix(A), dtype=np.float64)
    m = A.shape[0]
    best = A.copy()
    best_sens = l1_sensitivity(A)
    grid = np.linspace(-np.pi / 4, np.pi / 4, 25)
    gr = (math.sqrt(5) - 1) / 2
    for _ in range(max_sweeps):
        mu = opts.smoothing * l1_sensitivity(A)
        cols = np.abs(A).sum(axis=0)
        start_val = float(_smooth_max(cols, mu))
        for i in range(m - 1):
            for j in range(i + 1, m):
                ri, rj = A[i], A[j]
                rest = cols - np.abs(ri) - np.abs(rj)

                def f(theta):
                    c, s = np.cos(theta), np.sin(theta)
                    c, s = np.atleast_1d(c)[:, None], np.atleast_1d(s)[:, None]
                    new = rest + np.abs(c * ri - s * rj) + np.abs(s * ri + c * rj)
                    return _smooth_max(new, mu)

                vals = f(grid)
                k = int(np.argmin(vals))
                lo = grid[max(k - 1, 0)]
                hi = grid[min(k + 1, len(grid) - 1)]
                x1, x2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
                f1, f2 = f(x1)[0], f(x2)[0]
                for _ in range(20):
                    if f1 < f2:
                        hi, x2, f2 = x2, x1, f1
                        x1 = hi - gr * (hi - lo)
                        f1 = f(x1)[0]
                    else:
                        lo, x1, f1 = x1, x2, f2
                        x2 = lo + gr * (hi - lo)
                        f2 = f(x2)[0]
                theta = (lo + hi) / 2
                if f(theta)[0] < f(0.0)[0]:
                    c, s = math.cos(theta), math.sin(theta)
                    A[i], A[j] = c * ri - s * rj, s * ri + c * rj
                    cols = np.abs(A).sum(axis=0)
                    sens = float(cols.max())
                    if sens < best_sens:
                        best_sens, best = sens, A.copy()
        end_val = float(_smooth_max(np.abs(A).sum(axis=0), mu))
        if start_val - end_val <= opts.tolerance * abs(start_val):
            break
    return best


def min_sensitivity(A, opts: OptimizerOptions | None = None) -> Strategy:
    """Lowest-sensitivity strategy found among profile-equivalent candidates.

    Candidates: ``A`` itself, the eigen factor, the triangular factor, and a
    rotation search started from each square factor (and from ``A`` too when
    ``n <= 8``, since sweeps are quadratic in the row count). Ties keep the
    earlier candidate, so an already-optimal ``A`` is returned unchanged.
    """
    opts = opts or OptimizerOptions()
    A = as_strategy(A)
    base = [A.matrix, eigen_factor(A), triangular_factor(A)]
    starts = base if A.n <= 8 else base[1:]
    searched = [rotation_search(B, opts) for B in starts]
    candidates = base + searched
    sens = [l1_sensitivity(B) for B in candidates]
    k = int(np.argmin(sens))
    return Strategy(candidates[k], f"minsens({A.name})")


# -- augmentation ----------------------------------------------------------


def augment(A, B) -> Strategy:
    A = as_strategy(A)
    B = as_matrix(B, "augmentation")
    if B.shape[1] != A.n:
        raise DimensionMismatch(f"augmentation has {B.shape[1]} columns, strategy has {A.n}")
    return Strategy(np.vstack([A.matrix, B]), f"{A.name}+aug")


def deficient_row(A, rtol: float = 1e-12) -> np.ndarray | None:
    """Row completing every column whose L1 norm falls short of the sensitivity."""
    A = as_strategy(A)
    cols = np.abs(A.matrix).sum(axis=0)
    gap = A.sensitivity - cols
    gap[gap <= rtol * A.sensitivity] = 0.0
    return gap if gap.any() else None


def auto_augment(A) -> Strategy:
    A = as_strategy(A)
    row = deficient_row(A)
    if row is None:
        return A
    return augment(A, row[None, :])
