import itertools

import pytest

from kgcalc.enumeration import (
    FILTERS,
    GuardLimitExceeded,
    basis,
    enumerate_graphs,
    enumerate_leibniz,
    ground_orbit_representative,
    leibniz_key,
)
from kgcalc.graphs import KGraph, canonicalize, is_canonical
from kgcalc.series import product_graph


def raw_oracle(n, m, pred=lambda g: True):
    """Every ordered target assignment, canonicalized; no pruning at all."""
    total = n + m
    choices = [[(a, b) for a in range(total) for b in range(total) if m + k not in (a, b)] for k in range(n)]
    out = set()
    for pairs in itertools.product(*choices):
        c = canonicalize(KGraph(n, m, pairs))
        if c.sign and pred(c.graph):
            out.add(c.graph)
    return sorted(out)


@pytest.mark.parametrize("n,m", [(0, 2), (1, 1), (1, 2), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
def test_complete_against_raw_oracle(n, m):
    assert enumerate_graphs(n, m) == raw_oracle(n, m)


@pytest.mark.parametrize("name", sorted(FILTERS))
def test_filters_against_raw_oracle(name):
    assert enumerate_graphs(3, 2, [FILTERS[name]]) == raw_oracle(3, 2, FILTERS[name])


@pytest.mark.parametrize(
    "bigrade,count",
    [((0, 2), 1), ((1, 2), 1), ((2, 2), 6), ((3, 2), 38), ((2, 3), 21), ((0, 3), 1)],
)
def test_counts(bigrade, count):
    assert len(basis(*bigrade)) == count


def test_small_bases():
    assert basis(1, 2) == [KGraph(1, 2, ((0, 1),))]
    assert basis(0, 3) == [product_graph(3)]


def test_sorted_canonical_no_duplicates():
    gs = enumerate_graphs(3, 2)
    assert gs == sorted(set(gs))
    assert all(is_canonical(g) for g in gs)


def test_loopy_hkr_classes():
    assert len(enumerate_graphs(3, 2, [FILTERS["loopy-hkr"]])) == 5
    reps = enumerate_graphs(3, 2, [FILTERS["loopy-hkr"]], up_to_ground_order=True)
    assert len(reps) == 4
    assert all(ground_orbit_representative(g) == g for g in reps)
    assert enumerate_graphs(3, 2, [FILTERS["loopless"], FILTERS["hkr"]], up_to_ground_order=True) == []


def test_guard_limits():
    with pytest.raises(GuardLimitExceeded):
        enumerate_graphs(6, 2)
    with pytest.raises(GuardLimitExceeded):
        enumerate_graphs(3, 3, max_raw=10)
    with pytest.raises(GuardLimitExceeded):
        enumerate_leibniz(4, 3, max_raw=10)


def test_leibniz_counts():
    bare = enumerate_leibniz(2, 3)
    assert len(bare) == 1 and bare[0].jacobiator == (0, 1, 2) and bare[0].targets == ()
    assert enumerate_leibniz(2, 0) == []
    first = enumerate_leibniz(4, 3)
    assert len(first) == 520
    assert enumerate_leibniz(4, 3) == first
    assert len({leibniz_key(lg) for lg in first}) == 520
    with pytest.raises(ValueError):
        enumerate_leibniz(1, 3)
