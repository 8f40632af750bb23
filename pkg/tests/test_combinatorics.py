"""
Tests for binomials, log binomials and colex subset ranking.
"""

import math

import pytest

from src.errors import DomainError, OutOfRangeError
from src.utils.combinatorics import (
    binomial,
    enumerate_ksubsets,
    format_subset,
    ksubset_rank,
    ksubset_unrank,
    log_binomial,
    log_binomial_big,
    log_falling_ratio,
)


def test_binomial_values():
    assert binomial(4, 2) == 6
    assert binomial(9, 0) == 1
    assert binomial(30, 15) == 155117520
    assert binomial(3, 5) == 0


def test_binomial_rejects_negative():
    with pytest.raises(DomainError):
        binomial(-1, 0)


def test_pascal_identity_up_to_30():
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


def test_log_binomial_small_and_edges():
    assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-12)
    assert log_binomial(17, 17) == 0.0
    assert log_binomial(17, 0) == 0.0
    with pytest.raises(DomainError):
        log_binomial(3, 4)


def test_log_binomial_matches_exact():
    exact = math.log(math.comb(1000, 500))
    assert math.isclose(log_binomial(1000, 500), exact, rel_tol=1e-9)
    for n in range(1, 201, 7):
        for k in range(0, n + 1, 3):
            assert math.isclose(math.exp(log_binomial(n, k)), math.comb(n, k), rel_tol=1e-9)


def test_log_binomial_big_huge_upper_argument():
    n = math.comb(60, 30)
    for k in (1, 5, 40):
        assert math.isclose(log_binomial_big(n, k), math.log(math.comb(n, k)), rel_tol=1e-9)


def test_log_binomial_big_moderate_ratio():
    n, k = 10**7, 3000
    assert math.isclose(log_binomial_big(n, k), log_binomial(n, k), rel_tol=1e-9)
    assert log_binomial_big(n, 0) == 0.0
    assert log_binomial_big(n, n) == 0.0


def test_log_falling_ratio():
    assert log_falling_ratio(10, 0) == 0.0
    assert log_falling_ratio(3, 5) == float("-inf")
    expected = math.log(math.comb(12, 4) * math.factorial(4) / 12**4)
    assert math.isclose(log_falling_ratio(12, 4), expected, rel_tol=1e-12)
    assert log_falling_ratio(10**6, 14) <= 0.0


def test_rank_and_unrank_examples():
    assert ksubset_rank((0, 1), 4) == 0
    assert ksubset_unrank(5, 4, 2) == (2, 3)
    with pytest.raises(OutOfRangeError):
        ksubset_unrank(6, 4, 2)


def test_rank_rejects_bad_subsets():
    with pytest.raises(DomainError):
        ksubset_rank((2, 1), 4)
    with pytest.raises(DomainError):
        ksubset_rank((0, 4), 4)


def test_unrank_inverts_rank_on_pairs_of_six():
    for s in enumerate_ksubsets(6, 2):
        assert ksubset_unrank(ksubset_rank(s, 6), 6, 2) == s


def test_enumeration_order_and_count():
    assert list(enumerate_ksubsets(3, 2)) == [(0, 1), (0, 2), (1, 2)]
    assert list(enumerate_ksubsets(5, 0)) == [()]
    subsets = list(enumerate_ksubsets(6, 3))
    assert len(subsets) == 20
    assert len(set(subsets)) == 20
    assert all(len(s) == 3 for s in subsets)
    assert subsets == [ksubset_unrank(r, 6, 3) for r in range(20)]
    assert list(enumerate_ksubsets(2, 3)) == []


def test_format_subset_is_one_based():
    assert format_subset((0, 2)) == "1,3"
    assert format_subset(()) == ""
