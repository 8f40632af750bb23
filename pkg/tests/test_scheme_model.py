"""
Tests for parameters, symmetry validation, the counting identities and the optimum.
"""

import itertools
from fractions import Fraction

import pytest

from src.errors import DomainError, GuardrailError, InfeasibleParametersError
from src.schemes.grouping import grouping_placement
from src.schemes.mn import mn_placement
from src.schemes.model import (
    DemandVector,
    PlacementProfile,
    SchemeParams,
    congruence_moduli,
    divisibility_check,
    feasible_regime,
    intersection_count_identity,
    optimal_rate,
    optimal_rate_for,
    optimal_subpacketization,
    r0_rate,
    union_count_identity,
    validate_symmetric,
)


def test_params_derive_t_and_z():
    params = SchemeParams.build(K=4, N=4, cache_ratio=Fraction(1, 2), F=6)
    assert (params.t, params.Z) == (2, 3)
    assert params.M == 2


def test_params_reject_fractional_t():
    with pytest.raises(InfeasibleParametersError, match="t = K\\*M/N not integral"):
        SchemeParams.build(K=3, N=3, cache_ratio=Fraction(1, 2), F=6)


def test_params_reject_ratio_above_one():
    with pytest.raises(InfeasibleParametersError):
        SchemeParams.build(K=2, N=2, cache_ratio=Fraction(3, 2), F=2)


def test_demand_vector():
    demand = DemandVector(files=(1, 0, 1, 0), N=2)
    assert demand.e == 2
    assert demand.render() == "1,0,1,0"
    assert demand.pattern() == (0, 1, 0, 1)
    assert DemandVector(files=(2, 2, 0, 1), N=3).pattern() == (0, 0, 1, 2)
    with pytest.raises(DomainError):
        DemandVector(files=(0, 2), N=2)


def test_mn_placement_is_symmetric():
    params, placement = mn_placement(3, 3, 1, 1)
    assert validate_symmetric(params, placement).valid


def test_broken_placement_reports_both_slots():
    params = SchemeParams.build(K=2, N=2, cache_ratio=Fraction(1, 2), F=2)
    placement = PlacementProfile(F=2, user_slots=(frozenset({0}), frozenset({0})))
    report = validate_symmetric(params, placement)
    assert not report.valid
    assert report.to_text() == (
        "slot_multiplicity user=- slot=0 expected=1 got=2\n"
        "slot_multiplicity user=- slot=1 expected=1 got=0\n"
    )


def test_cache_size_violation_names_user():
    params = SchemeParams.build(K=2, N=2, cache_ratio=Fraction(1, 2), F=2)
    placement = PlacementProfile(F=2, user_slots=(frozenset({0, 1}), frozenset()))
    lines = validate_symmetric(params, placement).to_text().splitlines()
    assert "cache_size user=1 slot=- expected=1 got=2" in lines
    assert "cache_size user=2 slot=- expected=1 got=0" in lines


def test_grouping_placement_is_symmetric():
    params, placement = grouping_placement(4, 1, 2, 4)
    assert (params.Z, params.t) == (3, 2)
    assert validate_symmetric(params, placement).valid


def test_union_identity_examples():
    params, placement = mn_placement(4, 4, 2, 1)
    first = union_count_identity(placement, 1)
    assert first.lhs == params.K * params.Z
    assert first.holds
    check = union_count_identity(placement, 2)
    assert check.rhs == 30
    assert check.holds

    _, grouping = grouping_placement(4, 1, 2)
    assert union_count_identity(grouping, 3).holds

    with pytest.raises(DomainError):
        union_count_identity(placement, 0)
    with pytest.raises(DomainError):
        union_count_identity(placement, 5)


def test_intersection_identity_examples():
    _, placement = mn_placement(4, 4, 2, 1)
    check = intersection_count_identity(placement, 2)
    assert check.lhs == 6
    assert check.holds

    _, grouping = grouping_placement(4, 1, 2)
    check = intersection_count_identity(grouping, 2)
    assert check.lhs == 6
    assert check.holds

    with pytest.raises(DomainError):
        intersection_count_identity(placement, 3)


def test_identity_methods_agree():
    _, placement = mn_placement(5, 5, 2, 2)
    for k in range(1, 6):
        subsets = union_count_identity(placement, k, method="subsets")
        slots = union_count_identity(placement, k, method="slots")
        assert subsets.lhs == slots.lhs
    for k in range(1, 3):
        subsets = intersection_count_identity(placement, k, method="subsets")
        slots = intersection_count_identity(placement, k, method="slots")
        assert subsets.lhs == slots.lhs


def test_subset_walk_matches_brute_force():
    placement = PlacementProfile(
        F=4,
        user_slots=(frozenset({0, 1}), frozenset({1, 2, 3}), frozenset({0, 3}), frozenset({2})),
    )
    users = placement.user_slots
    for k in range(1, 5):
        expected = sum(len(frozenset().union(*combo)) for combo in itertools.combinations(users, k))
        assert union_count_identity(placement, k, method="subsets").lhs == expected
    for k in range(1, 3):
        expected = sum(len(frozenset.intersection(*combo)) for combo in itertools.combinations(users, k))
        assert intersection_count_identity(placement, k, method="subsets").lhs == expected


def test_identity_methods_agree_at_twenty_users():
    _, placement = grouping_placement(6, 3, 1)
    assert placement.K == 20
    for k in (1, 5, 10, 20):
        subsets = union_count_identity(placement, k, method="subsets")
        assert subsets.holds
        assert subsets.lhs == union_count_identity(placement, k, method="slots").lhs
    for k in (1, 4, 10):
        subsets = intersection_count_identity(placement, k, method="subsets")
        assert subsets.holds
        assert subsets.lhs == intersection_count_identity(placement, k, method="slots").lhs


def test_subset_enumeration_guardrail():
    _, placement = grouping_placement(7, 3, 1)
    assert placement.K == 35
    with pytest.raises(GuardrailError):
        union_count_identity(placement, 2, method="subsets")
    check = union_count_identity(placement, 2)
    assert check.method == "slots"
    assert check.holds


def test_divisibility():
    assert divisibility_check(SchemeParams.build(4, 4, Fraction(1, 2), 6))
    assert not divisibility_check(SchemeParams.build(4, 4, Fraction(1, 2), 4))
    assert divisibility_check(SchemeParams.build(6, 6, Fraction(1, 3), 30, h=2))


def test_optimal_rate():
    assert optimal_rate_for(3, 3, 1) == 1
    assert optimal_rate_for(5, 3, 5) == 0
    assert optimal_rate_for(5, 3, 0) == 3
    assert optimal_rate_for(5, 7, 0) == 5
    assert optimal_rate_for(4, 2, 1) == Fraction(3, 2) - Fraction(1, 4)
    params, _ = mn_placement(4, 4, 2, 1)
    assert optimal_rate(params) == Fraction(2, 3)


def test_optimal_subpacketization():
    assert optimal_subpacketization(SchemeParams.build(4, 4, Fraction(1, 2), 6)) == 6
    assert optimal_subpacketization(SchemeParams.build(20, 20, Fraction(1, 2), 184756)) == 184756
    assert optimal_subpacketization(SchemeParams.build(3, 3, 0, 1)) == 1


def test_r0_and_regime():
    assert r0_rate(4, 2) == Fraction(2, 3)
    assert r0_rate(4, 2) >= optimal_rate_for(4, 2, 2)
    assert feasible_regime(6, 6, 4)
    assert not feasible_regime(6, 2, 4)


def test_congruence_moduli():
    report = congruence_moduli(K=6, t=4, N=2)
    assert report.applies
    assert report.moduli == ((1, 3), (2, 5))
    assert report.lcm == 15
    assert report.satisfied_by(15)
    assert not report.satisfied_by(10)
