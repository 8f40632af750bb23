"""
Property-based tests over randomly drawn instances.
"""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from src.schemes.grouping import GroupingScheme, grouping_placement, grouping_rate_vs_optimal, verify_lower1
from src.schemes.mn import MnScheme, transmission_count
from src.schemes.model import (
    DemandVector,
    intersection_count_identity,
    union_count_identity,
    validate_symmetric,
)
from src.simulation.simulator import run
from src.simulation.store import pack, random_files
from src.utils.combinatorics import binomial, enumerate_ksubsets, ksubset_rank, ksubset_unrank


@st.composite
def ranked_subsets(draw):
    n = draw(st.integers(min_value=0, max_value=40))
    k = draw(st.integers(min_value=0, max_value=n))
    rank = draw(st.integers(min_value=0, max_value=binomial(n, k) - 1))
    return n, k, rank


@st.composite
def mn_cases(draw):
    K = draw(st.integers(min_value=1, max_value=6))
    N = draw(st.integers(min_value=1, max_value=5))
    t = draw(st.integers(min_value=0, max_value=K))
    h = draw(st.integers(min_value=1, max_value=2))
    files = tuple(draw(st.lists(st.integers(min_value=0, max_value=N - 1), min_size=K, max_size=K)))
    seed = draw(st.integers(min_value=0, max_value=2**32))
    return K, N, t, h, files, seed


@st.composite
def grouping_triples(draw, max_n=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    a = draw(st.integers(min_value=0, max_value=n))
    b = draw(st.integers(min_value=0, max_value=n - a))
    return n, a, b


@given(st.integers(min_value=1, max_value=60), st.data())
def test_pascal(n, data):
    k = data.draw(st.integers(min_value=1, max_value=n))
    assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


@given(ranked_subsets())
def test_unrank_then_rank(case):
    n, k, rank = case
    subset = ksubset_unrank(rank, n, k)
    assert len(subset) == k
    assert list(subset) == sorted(set(subset))
    assert ksubset_rank(subset, n) == rank


@given(st.integers(min_value=0, max_value=9), st.data())
def test_enumeration_is_rank_order(n, data):
    k = data.draw(st.integers(min_value=0, max_value=n))
    subsets = list(enumerate_ksubsets(n, k))
    assert len(subsets) == math.comb(n, k)
    assert [ksubset_rank(s, n) for s in subsets] == list(range(len(subsets)))


@settings(max_examples=60, deadline=None)
@given(mn_cases())
def test_mn_every_user_decodes(case):
    K, N, t, h, files, seed = case
    scheme = MnScheme(K, N, t, h)
    demand = DemandVector(files, N)
    store = pack(random_files(N, 12, seed), scheme.F)
    result = run(scheme, store, demand)
    assert result.verified
    assert result.transmissions_sent == transmission_count(K, t, h, demand.e)


@settings(max_examples=40, deadline=None)
@given(grouping_triples(max_n=5))
def test_grouping_identities(triple):
    n, a, b = triple
    params, placement = grouping_placement(n, a, b)
    assert validate_symmetric(params, placement).valid
    for k in range(1, params.K + 1):
        assert union_count_identity(placement, k).holds
    for k in range(1, params.t + 1):
        assert intersection_count_identity(placement, k).holds


@settings(max_examples=40, deadline=None)
@given(grouping_triples(max_n=5), st.integers(min_value=0, max_value=2**32))
def test_grouping_decodes_distinct_demand(triple, seed):
    scheme = GroupingScheme(*triple)
    demand = DemandVector(tuple(range(scheme.K)), scheme.N)
    result = run(scheme, pack(random_files(scheme.N, 10, seed), scheme.F), demand)
    assert result.verified
    assert result.rate_measured == scheme.grouping.nominal_rate


@given(grouping_triples(max_n=30))
def test_grouping_rate_bounds(triple):
    n, a, b = triple
    assert verify_lower1(n, a, b)
    comparison = grouping_rate_vs_optimal(n, a, b)
    assert comparison.paths_agree
    assert comparison.above_optimum
