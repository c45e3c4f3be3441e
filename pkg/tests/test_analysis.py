import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import H4, H4_PROFILE_X21, I4, Y4, Y4_PROFILE_X8, Y_PRIME, random_full_rank
from matmech.analysis import (
    ErrorProfile,
    error_profile,
    max_error,
    profile_equivalent,
    query_error,
    range_query_errors,
    strategy_from_profile,
    svb_sensitivity,
    total_error,
)
from matmech.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric, RankDeficient
from matmech.linalg import l1_sensitivity
from matmech.strategies import hierarchical_strategy, wavelet_strategy
from matmech.workloads import all_range_queries


def test_profiles_match_figures():
    assert np.abs(error_profile(I4).matrix - I4).max() <= 1e-12
    assert np.abs(error_profile(H4).matrix - H4_PROFILE_X21 / 21).max() <= 1e-12
    assert np.abs(error_profile(Y4).matrix - Y4_PROFILE_X8 / 8).max() <= 1e-12


def test_profile_validation():
    with pytest.raises(NotSymmetric):
        ErrorProfile(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        ErrorProfile(np.diag([1.0, -1.0]))
    with pytest.raises(RankDeficient):
        error_profile(np.ones((3, 2)))


def test_profile_term_positive(rng):
    M = error_profile(random_full_rank(rng, 9, 6))
    for w in rng.standard_normal((50, 6)):
        assert M.term(w) > 0


@pytest.mark.parametrize(
    "A, w, expected",
    [
        (I4, np.eye(4)[2], 2.0),
        (H4, np.eye(4)[0], 78 / 7),
        # the Y4 profile entries sum to 8/8, so w M w^T = 1 and the error is 2 * 3^2 * 1
        (Y4, np.ones(4), 18.0),
    ],
)
def test_query_error_examples(A, w, expected):
    assert query_error(A, w, 1.0) == pytest.approx(expected, rel=1e-12)


def test_query_error_dimension():
    with pytest.raises(DimensionMismatch):
        query_error(H4, np.ones(3), 1.0)
    with pytest.raises(ValueError):
        query_error(H4, np.ones(4), 0.0)


def test_total_error_identity_strategy(rng):
    W = rng.standard_normal((6, 4))
    for eps in (0.5, 1.0, 3.0):
        assert total_error(I4, W, eps).total == pytest.approx(2 / eps**2 * np.trace(W.T @ W), rel=1e-12)


def test_total_error_square_workload_as_strategy(rng):
    W = random_full_rank(rng, 5, 5)
    assert total_error(W, W, 2.0).total == pytest.approx(2 / 4 * l1_sensitivity(W) ** 2 * 5, rel=1e-9)


def test_total_error_h4_on_identity():
    rep = total_error(H4, I4, 1.0, workload_id="identity")
    assert rep.total == pytest.approx(18 * 52 / 21, rel=1e-12)
    assert rep.strategy_id == "custom" and rep.workload_id == "identity"


@pytest.mark.parametrize("n", [4, 8, 16, 32])
def test_total_error_sum_and_trace_agree(rng, n):
    A = random_full_rank(rng, n + 3, n)
    W = rng.standard_normal((2 * n, n))
    rep = total_error(A, W, 0.7)
    assert rep.per_query.sum() == pytest.approx(rep.total, rel=1e-9)
    assert rep.max == rep.per_query.max()
    assert max_error(A, W, 0.7) == pytest.approx(rep.max, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_identity_max_error_on_ranges(n):
    assert max_error(np.eye(n), all_range_queries(n), 1.0) == 2 * n


def test_max_error_dominates_single_queries():
    W = all_range_queries(4)
    m = max_error(H4, W, 1.0)
    assert np.isfinite(m)
    assert all(query_error(H4, w, 1.0) <= m * (1 + 1e-12) for w in W)


@pytest.mark.parametrize("build", [hierarchical_strategy, wavelet_strategy, np.eye])
@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_range_query_errors_fast_path(build, n):
    A = build(n)
    fast = range_query_errors(A, 1.5)
    slow = total_error(A, all_range_queries(n), 1.5).per_query
    assert np.allclose(fast, slow, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([-3.0, 0.5, 10.0]), st.integers(0, 2**32 - 1))
def test_scalar_invariance(k, seed):
    rng = np.random.default_rng(seed)
    A = random_full_rank(rng, 6, 4)
    for w in rng.standard_normal((5, 4)):
        assert query_error(k * A, w, 1.0) == pytest.approx(query_error(A, w, 1.0), rel=1e-9)


def test_profile_equivalence_examples():
    assert profile_equivalent(H4, -H4)
    assert profile_equivalent(Y4, Y_PRIME, tol=1e-2)
    assert not profile_equivalent(I4, H4)
    with pytest.raises(DimensionMismatch):
        profile_equivalent(I4, np.eye(3))


def test_strategy_from_profile_examples():
    assert np.allclose(np.abs(strategy_from_profile(np.eye(3)).matrix), np.eye(3))
    A = strategy_from_profile(error_profile(Y4))
    assert profile_equivalent(A, Y4)
    B = strategy_from_profile(error_profile(H4), m=7)
    assert B.shape == (7, 4)
    assert np.all(B.matrix[4:] == 0)
    assert profile_equivalent(B, H4)
    with pytest.raises(DimensionMismatch):
        strategy_from_profile(np.eye(3), m=2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 16), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_strategy_from_profile_round_trip(n, pad, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    M = B @ B.T + n * np.eye(n)
    A = strategy_from_profile(M, n + pad)
    assert np.abs(error_profile(A).matrix - M).max() <= 1e-8 * max(1.0, np.abs(M).max())


@pytest.mark.parametrize("n", [1, 4, 9])
def test_svb_identity(n):
    assert svb_sensitivity(np.eye(n)) == pytest.approx(np.sqrt(n))


def test_svb_y4():
    assert svb_sensitivity(Y4) == pytest.approx(np.sqrt(12), rel=1e-12)
    assert svb_sensitivity(Y4) <= np.sqrt(4) * l1_sensitivity(Y4)


@pytest.mark.parametrize("n", [4, 8, 16, 32, 64, 128])
def test_hier_wavelet_ratio_band(n):
    rng = np.random.default_rng(n)
    H, Y = hierarchical_strategy(n), wavelet_strategy(n)
    W = rng.standard_normal((1000, n))
    r = total_error(H, W, 1.0).per_query / total_error(Y, W, 1.0).per_query
    assert r.min() >= 0.5 and r.max() <= 2.0
