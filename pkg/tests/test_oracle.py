import inspect

import numpy as np
import pytest

from conftest import H4, I4, Y4, random_full_rank
from matmech import oracle
from matmech.errors import DimensionMismatch, IllConditioned, NotPowerOfTwo
from matmech.mechanism import estimate_counts
from matmech.oracle import (
    growth_band,
    growth_table,
    haar_coefficient_matrix,
    haar_equivalence_check,
    haar_structural_identity,
    least_squares_oracle,
    monte_carlo_error,
    range_growth_check,
)
from matmech.workloads import all_range_queries

MC_TRIALS = 10**6


@pytest.mark.slow
@pytest.mark.parametrize(
    "W, A, per_query",
    [(I4, I4, 2.0), (I4, H4, 78 / 7), (all_range_queries(4), Y4, None)],
    ids=["identity", "hier-on-identity", "wavelet-on-ranges"],
)
def test_monte_carlo_matches_closed_form(W, A, per_query):
    rep = monte_carlo_error(W, A, np.arange(4.0), 1.0, MC_TRIALS, seed=1)
    assert rep.trials == MC_TRIALS
    assert rep.empirical_mse.shape == rep.predicted_mse.shape == (W.shape[0],)
    assert rep.max_rel_err < 0.02
    assert rep.max_rel_err == pytest.approx(rep.rel_err.max())
    if per_query is not None:
        assert np.allclose(rep.predicted_mse, per_query)


def test_monte_carlo_threads_agree():
    a = monte_carlo_error(I4, H4, np.ones(4), 1.0, 300_000, seed=3, threads=1)
    b = monte_carlo_error(I4, H4, np.ones(4), 1.0, 300_000, seed=3, threads=4)
    assert np.allclose(a.empirical_mse, b.empirical_mse, rtol=1e-9, atol=0)


def test_monte_carlo_dimension_check():
    with pytest.raises(DimensionMismatch):
        monte_carlo_error(np.eye(3), H4, np.ones(4), 1.0, 10, 0)


def test_lsq_exact():
    x = np.array([1.0, -2.0, 3.0, 0.5])
    assert np.allclose(least_squares_oracle(H4, H4 @ x), x, atol=1e-12)


def test_lsq_matches_primary(rng):
    y = rng.standard_normal(7)
    assert np.abs(least_squares_oracle(H4, y) - estimate_counts(H4, y)).max() <= 1e-8


def test_lsq_residual_orthogonal(rng):
    A = random_full_rank(rng, 12, 5)
    y = A @ rng.standard_normal(5) + rng.standard_normal(12)
    xh = least_squares_oracle(A, y)
    assert np.abs(A.T @ (y - A @ xh)).max() <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_lsq_at_condition_1e6(seed):
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((12, 6)))
    V, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    A = U @ np.diag(np.logspace(0, -6, 6)) @ V.T
    assert np.linalg.cond(A) == pytest.approx(1e6, rel=1e-6)
    y = A @ rng.standard_normal(6)
    assert np.abs(least_squares_oracle(A, y) - estimate_counts(A, y)).max() <= 1e-8


def test_lsq_ill_conditioned():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-9], [0.0, 0.0]])
    with pytest.raises(IllConditioned):
        least_squares_oracle(A, np.ones(3))
    with pytest.raises(IllConditioned):
        least_squares_oracle(np.ones((1, 2)), np.ones(1))


def test_lsq_independent_of_pseudo_inverse():
    src = inspect.getsource(oracle.least_squares_oracle) + inspect.getsource(oracle._full_pivot_lu)
    assert "pinv" not in src and "svd" not in src and "pseudo_inverse" not in src


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
def test_haar_structure(n):
    assert haar_structural_identity(n)
    Z, w = haar_coefficient_matrix(n)
    assert Z.shape == (n, n) and w[0] == n


def test_haar_rejects_non_power():
    with pytest.raises(NotPowerOfTwo):
        haar_coefficient_matrix(6)


@pytest.mark.slow
def test_haar_covariance_n4():
    rep = haar_equivalence_check(4, 1.0, MC_TRIALS, seed=2)
    assert np.allclose(rep.predicted_mse, 18 * 3 / 8)
    assert rep.max_rel_err < 0.03


def test_haar_covariance_n2():
    rep = haar_equivalence_check(2, 1.0, MC_TRIALS, seed=2)
    assert np.allclose(rep.predicted_mse, 4.0)
    assert rep.max_rel_err < 0.03


def test_gaussian_variance_check():
    rep = oracle.gaussian_variance_check(H4, 1.0, 1e-5, MC_TRIALS, seed=0)
    assert rep.predicted_mse[0] == pytest.approx(24 * np.log(2e5))
    assert rep.max_rel_err < 0.02


def test_identity_growth_is_exact():
    for row in growth_table("identity", [2, 16, 128, 1024]):
        assert row.max_error / (2 * row.n) == 1.0


@pytest.mark.parametrize("kind", ["hier", "wavelet"])
def test_growth_band(kind):
    rows, ok = range_growth_check(kind, "ranges", [16, 32, 64, 128, 256, 512, 1024])
    assert ok
    assert growth_band(rows) < 2.0
    assert [r.n for r in rows] == [16, 32, 64, 128, 256, 512, 1024]


def test_hier_wavelet_totals_close():
    h = growth_table("hier", [16, 64, 256])
    y = growth_table("wavelet", [16, 64, 256])
    for a, b in zip(h, y):
        assert 0.25 <= a.total_error / b.total_error <= 4.0


def test_growth_argument_checks():
    with pytest.raises(ValueError):
        range_growth_check("hier", "predicates", [16])
    with pytest.raises(NotPowerOfTwo):
        growth_table("hier", [12])
