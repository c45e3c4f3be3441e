"""Laplace, Gaussian and matrix mechanisms, and least-squares estimation.

Noise comes from a Philox (counter-based, 64-bit keyed) generator seeded by
``(seed, stream)``, so a given seed reproduces bit-identical output on any
platform. Laplace variates are produced by inverse CDF from 53-bit uniforms
on the open interval (0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EpsilonTooLarge, MissingDelta
from .linalg import Strategy, as_matrix, as_strategy, l1_sensitivity, l2_column_bound

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float | None = None

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon}")
        if self.delta is not None:
            if not 0 < self.delta <= 1:
                raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
            if self.epsilon > gaussian_epsilon_limit(self.delta):
                raise EpsilonTooLarge(
                    f"epsilon={self.epsilon} exceeds 8 ln(2/delta)={gaussian_epsilon_limit(self.delta):.4g}"
                )


def gaussian_epsilon_limit(delta: float) -> float:
    return 8.0 * math.log(2.0 / delta)


@dataclass(frozen=True)
class NoisyAnswer:
    values: np.ndarray
    strategy_id: str
    noise_scale: float
    seed: int
    mechanism: str = "laplace"
    extra: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.values)


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & _MASK64, int(stream) & _MASK64])
    return np.random.Generator(np.random.Philox(ss))


def laplace_noise(size: int | tuple, seed: int, stream: int = 0) -> np.ndarray:
    """Standard Laplace(scale 1) draws by inverse CDF."""
    rng = generator(seed, stream)
    k = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    u = (k + 0.5) / float(1 << 53) - 0.5  # open interval (-1/2, 1/2)
    return -np.sign(u) * np.log1p(-2.0 * np.abs(u))


def gaussian_noise(size: int | tuple, delta: float, seed: int, stream: int = 0) -> np.ndarray:
    """Normal draws with variance ``8 ln(2/delta)``."""
    rng = generator(seed, stream)
    return math.sqrt(gaussian_epsilon_limit(delta)) * rng.standard_normal(size)


def _check_dims(W: np.ndarray, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if W.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"matrix has {W.shape[1]} columns but x has length {x.shape[0]}")
    return x


def _label(W, default: str) -> str:
    return W.name if isinstance(W, Strategy) else default


def laplace_mechanism(W, x, p: PrivacyParams, seed: int) -> NoisyAnswer:
    """``W x + (sens(W)/eps) b`` with ``b`` i.i.d. standard Laplace."""
    label = _label(W, "workload")
    W = W.matrix if isinstance(W, Strategy) else as_matrix(W)
    x = _check_dims(W, x)
    scale = l1_sensitivity(W) / p.epsilon
    values = W @ x + scale * laplace_noise(W.shape[0], seed)
    return NoisyAnswer(values, label, scale, seed, "laplace")


def gaussian_mechanism(W, x, p: PrivacyParams, seed: int) -> NoisyAnswer:
    """``W x + (||W||_2/eps) b`` with ``b`` i.i.d. N(0, 8 ln(2/delta))."""
    if p.delta is None:
        raise MissingDelta("the Gaussian mechanism needs delta")
    if p.epsilon > gaussian_epsilon_limit(p.delta):
        raise EpsilonTooLarge(f"epsilon={p.epsilon} exceeds 8 ln(2/delta)")
    label = _label(W, "workload")
    W = W.matrix if isinstance(W, Strategy) else as_matrix(W)
    x = _check_dims(W, x)
    scale = l2_column_bound(W) / p.epsilon
    values = W @ x + scale * gaussian_noise(W.shape[0], p.delta, seed)
    return NoisyAnswer(values, label, scale, seed, "gaussian")


def estimate_counts(A, y) -> np.ndarray:
    """Least-squares estimate ``A^+ y`` of the count vector."""
    A = as_strategy(A)
    values = y.values if isinstance(y, NoisyAnswer) else np.asarray(y, dtype=np.float64).ravel()
    if values.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"answer has length {values.shape[0]} but strategy has {A.shape[0]} rows")
    return A.pinv @ values


def matrix_mechanism(W, A, x, p: PrivacyParams, seed: int) -> NoisyAnswer:
    """Answer workload ``W`` by measuring strategy ``A`` and post-processing.

    Computed literally as ``W @ estimate_counts(A, base(A, x))`` where the base
    mechanism is Laplace, or Gaussian when ``p.delta`` is set.
    """
    A = as_strategy(A)
    W = as_matrix(W, "workload")
    x = np.asarray(x, dtype=np.float64).ravel()
    if W.shape[1] != A.n:
        raise DimensionMismatch(f"workload has {W.shape[1]} columns, strategy has {A.n}")
    base = gaussian_mechanism if p.delta is not None else laplace_mechanism
    y = base(A, x, p, seed)
    values = W @ estimate_counts(A, y)
    return NoisyAnswer(values, A.name, y.noise_scale, seed, y.mechanism, {"strategy_answer": y.values})
