"""Closed-form limiting covariance, spectral moments, and limit-process sampling."""

import math

import numpy as np
import pytest

from bandhankel.combinat import class_counts
from bandhankel.errors import NumericalError, ValidationError
from bandhankel.theory import (
    CovarianceQuery,
    band_integral_b0,
    limit_cov,
    limit_cov_matrix,
    limit_cov_terms,
    lsd_moment,
    sample_limit_process,
    scaled_moment_R,
    tilde_cov,
    _factor_covariance,
)


def test_limit_cov_base_value():
    assert limit_cov(CovarianceQuery(2, 2, 1.0, 1.0)) == 16.0
    assert limit_cov(CovarianceQuery(2, 2, 1.0, 1.0), convention="literal_q") == 16.0


def test_limit_cov_order_two_depends_on_earlier_time_only():
    base = limit_cov(CovarianceQuery(2, 2, 0.5, 0.5))
    assert base == 4.0
    for t2 in (1.0, 2.0, 9.0):
        assert limit_cov(CovarianceQuery(2, 2, 0.5, t2)) == base


def test_limit_cov_vanishes_at_time_zero():
    for p, q in [(2, 2), (2, 4), (4, 4)]:
        assert limit_cov(CovarianceQuery(p, q, 0.0, 1.0)) == 0.0


@pytest.mark.parametrize("lam", [0.25, 4.0])
@pytest.mark.parametrize("p,q", [(2, 2), (2, 4), (4, 4)])
def test_limit_cov_scaling_identity(lam, p, q):
    t1, t2 = 0.7, 1.3
    base = limit_cov(CovarianceQuery(p, q, t1, t2))
    scaled = limit_cov(CovarianceQuery(p, q, lam * t1, lam * t2))
    assert scaled == pytest.approx(lam ** ((p + q) // 2) * base, rel=1e-12)


def test_limit_cov_terms_sum_and_keys():
    query = CovarianceQuery(2, 4, 1.0, 2.0)
    terms = limit_cov_terms(query)
    assert sorted(terms) == [2, 4]
    assert sum(terms.values()) == pytest.approx(limit_cov(query), rel=1e-14)
    # Hand assembly of the r = 2 term: 2^3 * C(4,2) * t1^2 * (t2-t1)^1
    # * weight * 1!, with weight = the (2, 2) split tally.
    weight = class_counts(2, 2).r_value
    assert terms[2] == pytest.approx(8 * 6 * 1.0 * 1.0 * weight * 1, rel=1e-14)


def test_limit_cov_symmetric_in_orders_at_equal_times():
    for p, q in [(2, 4), (2, 6), (4, 6)]:
        forward = limit_cov(CovarianceQuery(p, q, 1.0, 1.0))
        backward = limit_cov(CovarianceQuery(q, p, 1.0, 1.0))
        assert forward == pytest.approx(backward, rel=1e-14)


def test_conventions_agree_at_equal_times_and_differ_otherwise():
    equal = CovarianceQuery(4, 4, 1.0, 1.0)
    assert limit_cov(equal, "r") == limit_cov(equal, "literal_q")
    unequal = CovarianceQuery(4, 4, 1.0, 2.0)
    assert limit_cov(unequal, "r") != limit_cov(unequal, "literal_q")


def test_covariance_query_validation():
    with pytest.raises(ValidationError):
        CovarianceQuery(3, 2, 1.0, 1.0)
    with pytest.raises(ValidationError):
        CovarianceQuery(2, 0, 1.0, 1.0)
    with pytest.raises(ValidationError, match="swap"):
        CovarianceQuery(2, 2, 2.0, 1.0)
    with pytest.raises(ValidationError):
        CovarianceQuery(2, 2, -1.0, 1.0)


def test_limit_cov_rejects_unknown_convention():
    with pytest.raises(ValidationError):
        limit_cov(CovarianceQuery(2, 2, 1.0, 1.0), convention="both")


@pytest.mark.parametrize("p,r,expected", [(2, 0, 1.0), (2, 2, 2.0), (4, 2, 4.0), (4, 4, 8.0)])
def test_band_integral_constant(p, r, expected):
    assert band_integral_b0(p, r) == expected


def test_band_integral_parity_guard():
    with pytest.raises(ValidationError):
        band_integral_b0(2, 1)
    with pytest.raises(ValidationError):
        band_integral_b0(-2, 2)


def test_lsd_moments_are_half_order_factorials():
    assert [lsd_moment(k) for k in range(0, 13, 2)] == [
        float(math.factorial(k // 2)) for k in range(0, 13, 2)
    ]
    assert all(lsd_moment(k) == 0.0 for k in (1, 3, 5, 7))
    with pytest.raises(ValidationError):
        lsd_moment(-2)


def test_scaled_moments():
    assert [scaled_moment_R(k) for k in (0, 2, 4, 6)] == [1.0, 2.0, 8.0, 48.0]
    assert scaled_moment_R(3) == 0.0


def test_tilde_cov_equals_base_for_even_orders():
    for p, q, t1, t2 in [(2, 2, 1.0, 1.0), (2, 4, 0.5, 2.0), (4, 4, 1.0, 3.0)]:
        query = CovarianceQuery(p, q, t1, t2)
        assert tilde_cov(query) == limit_cov(query)


def test_limit_cov_matrix_values():
    matrix = limit_cov_matrix(2, (1.0, 2.0))
    np.testing.assert_allclose(matrix, [[16.0, 16.0], [16.0, 64.0]], rtol=0, atol=0)
    half = limit_cov_matrix(2, (0.5, 1.0))
    np.testing.assert_allclose(half, [[4.0, 4.0], [4.0, 16.0]], rtol=0, atol=0)


@pytest.mark.parametrize("p", [2, 4])
def test_limit_cov_matrix_is_positive_semidefinite(p):
    grid = (0.4, 0.8, 1.2, 1.6, 2.0)
    matrix = limit_cov_matrix(p, grid)
    np.testing.assert_allclose(matrix, matrix.T, rtol=0, atol=0)
    eigs = np.linalg.eigvalsh(matrix)
    assert eigs[0] >= -1e-10 * np.trace(matrix)


def test_limit_cov_matrix_grid_validation():
    with pytest.raises(ValidationError):
        limit_cov_matrix(2, ())
    with pytest.raises(ValidationError):
        limit_cov_matrix(2, (0.0, 1.0))
    with pytest.raises(ValidationError):
        limit_cov_matrix(2, (2.0, 1.0))


def test_factor_covariance_handles_exact_rank_deficiency():
    singular = np.array([[16.0, 16.0], [16.0, 16.0]])
    factor, condition, ridge = _factor_covariance(singular)
    assert ridge > 0
    np.testing.assert_allclose(factor @ factor.T, singular, atol=1e-6)
    assert math.isfinite(condition) and condition >= 1.0


def test_factor_covariance_rejects_indefinite_input():
    with pytest.raises(NumericalError):
        _factor_covariance(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_sample_limit_process_is_deterministic():
    grid = (0.5, 1.0, 1.5, 2.0)
    a = sample_limit_process(2, grid, seed=77)
    b = sample_limit_process(2, grid, seed=77)
    c = sample_limit_process(2, grid, seed=78)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.grid == grid
    assert a.values.shape == (4,)


def test_sample_limit_process_covers_flat_direction():
    # The order-two process is almost surely constant in its second
    # coordinate direction on a two-point grid; sampling must still work.
    sample = sample_limit_process(2, (1.0, 2.0), seed=5)
    assert np.all(np.isfinite(sample.values))
    assert sample.ridge >= 0


def test_sample_limit_process_empirical_covariance():
    grid = (1.0, 2.0)
    target = limit_cov_matrix(2, grid)
    draws = np.stack([sample_limit_process(2, grid, seed=s).values for s in range(4000)])
    empirical = np.cov(draws.T, ddof=1)
    np.testing.assert_allclose(empirical, target, rtol=0.1)


def test_sample_limit_process_rejects_odd_order():
    with pytest.raises(ValidationError):
        sample_limit_process(3, (1.0, 2.0), seed=1)
