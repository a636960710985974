import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgcalc.graphs import (
    GraphError,
    KGraph,
    LeibnizGraph,
    ReducedGraph,
    canonicalize,
    encode_graph,
    ground_permute,
    has_directed_cycle,
    is_canonical,
    make_graph,
    parse_graph,
    permutation_parity,
    relabel_ground,
)


@st.composite
def graphs(draw, max_aerial=3, max_ground=3):
    n = draw(st.integers(0, max_aerial))
    m = draw(st.integers(0, max_ground))
    total = n + m
    if n and total < 2:
        m = 2 - n if n < 2 else m
        total = n + m
    pairs = []
    for k in range(n):
        v = m + k
        others = [t for t in range(total) if t != v]
        pairs.append((draw(st.sampled_from(others)), draw(st.sampled_from(others))))
    return KGraph(n, m, tuple(pairs))


def brute_orbit(g: KGraph):
    """All (graph, sign) obtained by aerial relabeling and slot swaps, computed from scratch."""
    n, m = g.n_aerial, g.n_ground
    out = set()
    for perm in itertools.permutations(range(n)):
        for swaps in itertools.product((0, 1), repeat=n):
            relabel = list(range(m)) + [m + p for p in perm]
            pairs = [None] * n
            sign = 1
            for k, (a, b) in enumerate(g.targets):
                ra, rb = relabel[a], relabel[b]
                if swaps[k]:
                    ra, rb = rb, ra
                    sign = -sign
                pairs[perm[k]] = (ra, rb)
            out.add((tuple(pairs), sign))
    return out


class TestEncoding:
    def test_examples(self):
        assert encode_graph(make_graph(2, [])) == "k 0 2 ;"
        assert encode_graph(make_graph(2, [(0, 1)])) == "k 1 2 ; 0 1"
        assert parse_graph("k 2 2 ; 0 3 ; 1 2") == make_graph(2, [(0, 3), (1, 2)])

    @pytest.mark.parametrize(
        "line",
        ["k 1 2 ; 0 1 ;", "k 1 2 ;0 1", "k 2 2 ; 0 3", "k 1 2 ; 0 2", "k 1 2 ; 0 5", "x 1 2 ; 0 1", ""],
    )
    def test_rejects_malformed(self, line):
        with pytest.raises(GraphError):
            parse_graph(line)

    @given(graphs())
    def test_roundtrip(self, g):
        assert parse_graph(encode_graph(g)) == g


class TestCanonical:
    def test_edge_swap(self):
        c = canonicalize(parse_graph("k 1 2 ; 1 0"))
        assert c.sign == -1 and encode_graph(c.graph) == "k 1 2 ; 0 1"

    def test_double_edge_is_zero(self):
        assert canonicalize(make_graph(2, [(0, 0)])).sign == 0

    @settings(max_examples=300)
    @given(graphs())
    def test_matches_brute_force(self, g):
        orbit = brute_orbit(g)
        zero = any((p, -s) in orbit for p, s in orbit) or any(a == b for a, b in g.targets)
        c = canonicalize(g)
        if zero:
            assert c.sign == 0
            return
        best = min(p for p, _ in orbit)
        signs = {s for p, s in orbit if p == best}
        assert signs == {c.sign}
        assert c.graph.targets == best

    @given(graphs())
    def test_idempotent_and_invariant(self, g):
        c = canonicalize(g)
        if c.sign == 0:
            return
        assert is_canonical(c.graph)
        for p, s in list(brute_orbit(g))[:8]:
            d = canonicalize(KGraph(g.n_aerial, g.n_ground, p))
            assert d.graph == c.graph and d.sign == s * c.sign


class TestGround:
    def test_relabel_and_parity(self):
        g = make_graph(2, [(0, 1)])
        assert relabel_ground(g, (1, 0)) == make_graph(2, [(1, 0)])
        assert permutation_parity((1, 0)) == -1
        assert permutation_parity((1, 2, 0)) == 1
        # swapping the grounds of the wedge: parity -1 times slot swap -1
        sg = ground_permute(g, (1, 0))
        assert sg.graph == g and sg.sign == 1

    def test_bad_permutation(self):
        with pytest.raises(GraphError):
            relabel_ground(make_graph(2, [(0, 1)]), (0, 0))


def _as_digraph(g: KGraph) -> nx.MultiDiGraph:
    d = nx.MultiDiGraph()
    d.add_nodes_from(range(g.n_vertices))
    d.add_edges_from(g.edges())
    return d


class TestCycles:
    def test_examples(self):
        assert has_directed_cycle(parse_graph("k 2 2 ; 0 3 ; 1 2"))
        assert not has_directed_cycle(parse_graph("k 2 2 ; 0 1 ; 0 2"))

    @settings(max_examples=300)
    @given(graphs(max_aerial=4, max_ground=2))
    def test_against_networkx(self, g):
        assert has_directed_cycle(g) == (not nx.is_directed_acyclic_graph(_as_digraph(g)))


class TestValidation:
    def test_self_edge(self):
        with pytest.raises(GraphError):
            make_graph(1, [(1, 0)])

    def test_reduced_attach(self):
        r = ReducedGraph(((1, None), (0, None)))
        assert r.free_legs() == [(0, 1), (1, 1)]
        assert r.attach((1, 0)) == make_graph(2, [(3, 1), (2, 0)])

    def test_leibniz_bigrade(self):
        lg = LeibnizGraph(3, (0, 1, 2), ())
        assert lg.bigrade == (2, 3) and lg.jacobiator_vertex == 3
        with pytest.raises(GraphError):
            LeibnizGraph(3, (0, 1, 3), ())
