"""
Tests for the grouping scheme and its rate comparison.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.errors import ConsistencyError, InfeasibleParametersError
from src.schemes import grouping
from src.schemes.common import TransmissionLog
from src.schemes.grouping import (
    GroupingParams,
    GroupingScheme,
    grouping_decode,
    grouping_placement,
    grouping_rate_vs_optimal,
    verify_lower1,
)
from src.schemes.model import DemandVector, validate_symmetric
from src.simulation.demands import distinct_demand
from src.simulation.simulator import materialize_caches, run
from src.utils.combinatorics import binomial, ksubset_rank


def test_placement_parameters():
    params, placement = grouping_placement(4, 1, 2, 4)
    assert (params.K, params.F, params.Z, params.t) == (4, 6, 3, 2)
    assert params.cache_ratio == Fraction(1, 2)
    assert validate_symmetric(params, placement).valid


def test_placement_caches_iff_labels_meet():
    _, placement = grouping_placement(4, 1, 2)
    # user {1} holds the pairs containing element 1: {1,2}, {1,3}, {1,4}
    expected = {ksubset_rank(s, 4) for s in [(0, 1), (0, 2), (0, 3)]}
    assert placement.user_slots[0] == frozenset(expected)


def test_degenerate_placements():
    params, placement = grouping_placement(3, 0, 1, 1)
    assert (params.K, params.Z, params.cache_ratio) == (1, 0, 0)
    assert validate_symmetric(params, placement).valid

    params, placement = grouping_placement(5, 2, 0, 2)
    assert (params.F, params.cache_ratio) == (1, 0)
    assert all(not slots for slots in placement.user_slots)


def test_infeasible_labels():
    with pytest.raises(InfeasibleParametersError):
        GroupingParams(4, 3, 2)
    with pytest.raises(InfeasibleParametersError):
        grouping_placement(4, -1, 2)


def test_delivery_count_and_payload(make_store):
    scheme = GroupingScheme(4, 1, 2)
    store = make_store(scheme)
    demand = DemandVector((3, 2, 1, 0), 4)
    log = scheme.deliver(store.blocks, demand)
    assert len(log) == 4
    first = log.require((0, (0, 1, 2)))
    expected = (
        store.blocks[3, ksubset_rank((1, 2), 4)]
        ^ store.blocks[2, ksubset_rank((0, 2), 4)]
        ^ store.blocks[1, ksubset_rank((0, 1), 4)]
    )
    assert np.array_equal(first, expected)


@pytest.mark.parametrize("n, a, b, sent, rate", [(3, 0, 1, 3, 1), (4, 2, 0, 6, 6), (4, 1, 2, 4, Fraction(2, 3))])
def test_rates(make_store, n, a, b, sent, rate):
    scheme = GroupingScheme(n, a, b)
    result = run(scheme, make_store(scheme), distinct_demand(scheme.K, scheme.N))
    assert result.verified
    assert result.transmissions_sent == sent
    assert result.rate_measured == rate


def test_full_label_user(make_store):
    scheme = GroupingScheme(3, 3, 0)
    result = run(scheme, make_store(scheme), DemandVector((0,), 1))
    assert result.verified
    assert result.transmissions_sent == 1


def test_ten_users_decode(make_store):
    scheme = GroupingScheme(5, 2, 2)
    assert scheme.K == 10
    result = run(scheme, make_store(scheme), distinct_demand(10, 10))
    assert result.verified
    assert result.decoded_count == 10
    assert result.transmissions_sent == binomial(5, 4)


def test_rate_comparison_examples():
    c = grouping_rate_vs_optimal(4, 1, 2)
    assert (c.R, c.R0, c.ratio_R_over_R0) == (Fraction(2, 3), Fraction(2, 3), 1)
    assert c.paths_agree and c.above_optimum

    c = grouping_rate_vs_optimal(8, 2, 3)
    assert c.ratio_closed == Fraction(19, 10)
    assert c.ratio_direct == Fraction(19, 10)

    c = grouping_rate_vs_optimal(5, 0, 3)
    assert c.R == 1
    assert c.above_optimum


def test_rate_comparison_rejects_rate_below_optimum(monkeypatch):
    monkeypatch.setattr(grouping, "optimal_rate_for", lambda K, N, t: Fraction(5))
    with pytest.raises(ConsistencyError, match="below R"):
        grouping_rate_vs_optimal(4, 1, 2)


def test_rate_comparison_rejects_disagreeing_paths(monkeypatch):
    monkeypatch.setattr(grouping, "r0_rate", lambda K, t: Fraction(1, 7))
    with pytest.raises(ConsistencyError, match="closed form"):
        grouping_rate_vs_optimal(4, 1, 2)


def test_batched_decode_matches_per_user(make_store):
    scheme = GroupingScheme(5, 2, 1)
    store = make_store(scheme)
    demand = DemandVector(tuple((3 * u) % scheme.N for u in range(scheme.K)), scheme.N)
    log = scheme.deliver(store.blocks, demand)
    table = scheme.decoding_context(log, demand)
    caches = materialize_caches(scheme, store)
    batched = scheme.decode_all(caches, log, demand, table)
    for user in range(scheme.K):
        single = grouping_decode(scheme.layout, user, caches[user], log, demand)
        assert np.array_equal(batched[user], single)
        assert np.array_equal(single, store.blocks[demand.files[user]])


def test_decode_from_reversed_log(make_store):
    scheme = GroupingScheme(4, 1, 2)
    store = make_store(scheme)
    demand = DemandVector((1, 1, 0, 3), 4)
    log = scheme.deliver(store.blocks, demand)
    reversed_log = TransmissionLog.from_transmissions(list(log)[::-1], log.length)
    assert [tx.key for tx in reversed_log] == [tx.key for tx in log][::-1]
    table = scheme.decoding_context(reversed_log, demand)
    caches = materialize_caches(scheme, store)
    for user in range(scheme.K):
        rebuilt = scheme.decode(user, caches[user], reversed_log, demand, table)
        assert np.array_equal(rebuilt, store.blocks[demand.files[user]])


def test_lower1_boundaries_and_sweep():
    assert verify_lower1(6, 2, 0)
    assert verify_lower1(6, 2, 4)
    for n in range(1, 13):
        for a in range(n + 1):
            for b in range(n - a + 1):
                assert verify_lower1(n, a, b)
