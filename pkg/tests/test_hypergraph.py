import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hgcolor.hypergraph import (
    GuardError,
    Hypergraph,
    Seed,
    asymptotic_no_bad_probability,
    classify_bad_edges,
    edge_count,
    isolated_vertices,
    sample_bernoulli,
    sample_multi,
    sample_uniform,
)


def test_golden_multi_sample():
    assert sample_multi(4, 2, 2, Seed(0)).edge_list() == [(4, 4), (1, 2)]


def test_sample_is_deterministic_per_substream():
    a = sample_multi(50, 3, 40, Seed(11), 2, 5).edges
    b = sample_multi(50, 3, 40, Seed(11), 2, 5).edges
    c = sample_multi(50, 3, 40, Seed(11), 2, 6).edges
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_uniform_takes_every_subset_when_m_equals_N():
    H = sample_uniform(3, 2, 3, Seed(1))
    assert sorted(H.supports()) == [(1, 2), (1, 3), (2, 3)]


@given(n=st.integers(3, 12), r=st.integers(2, 3), frac=st.floats(0, 1), seed=st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_uniform_edges_are_distinct_proper_subsets(n, r, frac, seed):
    N = math.comb(n, r)
    m = int(frac * N)
    H = sample_uniform(n, r, m, Seed(seed))
    assert H.m == m
    assert classify_bad_edges(H).empty
    assert len(set(map(tuple, H.canonical.tolist()))) == m


def test_uniform_rejects_too_many_edges():
    with pytest.raises(ValueError):
        sample_uniform(4, 2, 7, Seed(0))


def test_bernoulli_extremes():
    assert sample_bernoulli(6, 3, 0.0, Seed(3)).m == 0
    assert sample_bernoulli(6, 3, 1.0, Seed(3)).m == 20
    with pytest.raises(ValueError):
        sample_bernoulli(6, 3, 1.5, Seed(3))


def test_bernoulli_guard():
    with pytest.raises(GuardError):
        sample_bernoulli(200, 5, 0.1, Seed(0))


def test_classify_bad_edges_by_hand():
    H = Hypergraph.from_edges(5, [(1, 2, 3), (3, 1, 2), (4, 4, 5), (5, 4, 4), (2, 3, 4)])
    rep = classify_bad_edges(H)
    assert rep.defective == [2, 3]
    assert rep.duplicate == [1, 3]
    assert rep.bad == [1, 2, 3]
    assert not rep.empty


def test_simple_flag_rejects_bad_edges():
    with pytest.raises(ValueError):
        Hypergraph.from_edges(3, [(1, 1)], simple=True)


def test_labels_are_range_checked():
    with pytest.raises(ValueError):
        Hypergraph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        Hypergraph.from_edges(3, [(1, 4)])


@given(n=st.integers(1, 30), r=st.integers(1, 4), m=st.integers(0, 20), seed=st.integers(0, 2**32))
@settings(max_examples=80, deadline=None)
def test_isolated_vertices_complement_the_edge_union(n, r, m, seed):
    H = sample_multi(n, r, m, Seed(seed))
    used = {v for e in H.edge_list() for v in e}
    assert isolated_vertices(H) == set(range(1, n + 1)) - used


def test_isolated_fraction_matches_exponential():
    n = 10_000
    H = sample_multi(n, 3, edge_count(1.0, n), Seed(5))
    assert abs(len(isolated_vertices(H)) / n - math.exp(-3)) < 0.01


def test_no_bad_limits():
    assert asymptotic_no_bad_probability(3, 1.0) == pytest.approx(math.exp(-3))
    assert asymptotic_no_bad_probability(2, 1.0) == pytest.approx(math.exp(-2))
    assert asymptotic_no_bad_probability(4, 0.0) == 1.0


def test_edge_count_floors():
    assert edge_count(1.5, 7) == 10
    assert edge_count(0.3, 10) == 3  # 0.3 * 10 is 2.9999999999999996 in doubles
    assert edge_count(0.0, 10) == 0


def test_seed_range():
    with pytest.raises(ValueError):
        Seed(-1)
    with pytest.raises(ValueError):
        Seed(0, 2**64)
