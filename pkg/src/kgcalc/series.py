"""Graph series: the insertion bracket, Hochschild differential, gauge action and HKR projection."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .coeffs import Coefficient, format_coeff, parse_coeff
from .graphs import (
    GraphError,
    KGraph,
    ReducedGraph,
    canonicalize,
    encode_graph,
    ground_permute,
    parse_graph,
    permutation_parity,
)


class GraphSeries:
    """Finite linear combination of canonical graphs with Coefficient values.

    Constructing from arbitrary graphs canonicalizes them and folds signs into
    the coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[KGraph, object] | Iterable[tuple[KGraph, object]] = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, c in items:
            sg = canonicalize(g)
            if sg.sign == 0:
                continue
            c = Coefficient.lift(c)
            if sg.sign < 0:
                c = -c
            acc[sg.graph] = acc[sg.graph] + c if sg.graph in acc else c
        self._terms = {g: c for g, c in acc.items() if c}

    @classmethod
    def _trusted(cls, terms: dict) -> "GraphSeries":
        s = cls.__new__(cls)
        s._terms = {g: c for g, c in terms.items() if c}
        return s

    @classmethod
    def from_graph(cls, g: KGraph, c=1) -> "GraphSeries":
        return cls([(g, c)])

    def items(self):
        return sorted(self._terms.items())

    def graphs(self) -> list[KGraph]:
        return sorted(self._terms)

    def coefficient(self, g: KGraph) -> Coefficient:
        sg = canonicalize(g)
        if sg.sign == 0:
            return Coefficient()
        c = self._terms.get(sg.graph, Coefficient())
        return c if sg.sign > 0 else -c

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.graphs())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def bigrades(self) -> set[tuple[int, int]]:
        return {g.bigrade for g in self._terms}

    def ground_arity(self) -> int:
        ms = {g.n_ground for g in self._terms}
        if len(ms) > 1:
            raise GraphError(f"mixed ground arities {sorted(ms)}")
        return ms.pop() if ms else 0

    def part(self, n_aerial: int) -> "GraphSeries":
        return GraphSeries._trusted({g: c for g, c in self._terms.items() if g.n_aerial == n_aerial})

    def filter(self, pred) -> "GraphSeries":
        return GraphSeries._trusted({g: c for g, c in self._terms.items() if pred(g)})

    def map_coefficients(self, f) -> "GraphSeries":
        return GraphSeries._trusted({g: f(c) for g, c in self._terms.items()})

    def __add__(self, other: "GraphSeries") -> "GraphSeries":
        out = dict(self._terms)
        for g, c in other._terms.items():
            out[g] = out[g] + c if g in out else c
        return GraphSeries._trusted(out)

    def __neg__(self):
        return GraphSeries._trusted({g: -c for g, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            if scalar == 0:
                return GraphSeries()
            return GraphSeries._trusted({g: c * scalar for g, c in self._terms.items()})
        scalar = Coefficient.lift(scalar)
        return GraphSeries._trusted({g: c * scalar for g, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GraphSeries):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        inner = ", ".join(f"{c} * {encode_graph(g)}" for g, c in self.items())
        return f"GraphSeries([{inner}])"


def series_sum(parts: Iterable[GraphSeries]) -> GraphSeries:
    out: dict = {}
    for s in parts:
        for g, c in s._terms.items():
            out[g] = out[g] + c if g in out else c
    return GraphSeries._trusted(out)


# ----------------------------------------------------------------------------
# text I/O


def format_series(s: GraphSeries) -> str:
    return "".join(f"{format_coeff(c)} * {encode_graph(g)}\n" for g, c in s.items())


def parse_series(text: str) -> GraphSeries:
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        idx = line.find(" * k ")
        if idx < 0:
            raise GraphError(f"line {lineno}: expected '<coefficient> * <graph line>'")
        try:
            c = parse_coeff(line[:idx])
        except ValueError as e:
            raise GraphError(f"line {lineno}: {e}") from None
        terms.append((parse_graph(line[idx + 3:]), c))
    return GraphSeries(terms)


# ----------------------------------------------------------------------------
# insertion and bracket


@lru_cache(maxsize=1 << 18)
def _compose_graphs(x: KGraph, y: KGraph, i: int) -> tuple[tuple[KGraph, int], ...]:
    """Signed canonical terms of inserting ``y`` into ground vertex ``i`` of ``x`` (no Gerstenhaber sign)."""
    mx, my = x.n_ground, y.n_ground
    m = mx + my - 1
    nx = x.n_aerial

    def xmap(t):
        if t < i:
            return t
        if t < mx:
            return t + my - 1
        return m + (t - mx)

    def ymap(t):
        if t < my:
            return i + t
        return m + nx + (t - my)

    y_vertices = [ymap(t) for t in range(y.n_vertices)]
    slots = []  # (aerial index in x, slot) pointing at ground i
    base = []
    for k, pair in enumerate(x.targets):
        row = [xmap(t) for t in pair]
        for s, t in enumerate(pair):
            if t == i:
                slots.append((k, s))
        base.append(row)
    y_pairs = [tuple(ymap(t) for t in pair) for pair in y.targets]

    acc: dict = {}
    for choice in itertools.product(y_vertices, repeat=len(slots)):
        rows = [list(r) for r in base]
        for (k, s), t in zip(slots, choice):
            rows[k][s] = t
        g = KGraph(nx + y.n_aerial, m, tuple(tuple(r) for r in rows) + tuple(y_pairs))
        sg = canonicalize(g)
        if sg.sign:
            acc[sg.graph] = acc.get(sg.graph, 0) + sg.sign
    return tuple(sorted((g, c) for g, c in acc.items() if c))


def compose_at(x: GraphSeries, y: GraphSeries, i: int) -> GraphSeries:
    """Insert ``y`` into ground vertex ``i`` of ``x``; edges into that vertex follow the Leibniz rule."""
    out: dict = {}
    for gx, cx in x._terms.items():
        if not 0 <= i < gx.n_ground:
            raise GraphError(f"ground index {i} out of range for {encode_graph(gx)}")
        for gy, cy in y._terms.items():
            c = cx * cy
            for g, k in _compose_graphs(gx, gy, i):
                term = c * k
                out[g] = out[g] + term if g in out else term
    return GraphSeries._trusted(out)


def _circ_graphs(x: KGraph, y: KGraph) -> dict:
    acc: dict = {}
    my = y.n_ground
    for i in range(x.n_ground):
        sgn = -1 if (i * (my - 1)) % 2 else 1
        for g, k in _compose_graphs(x, y, i):
            acc[g] = acc.get(g, 0) + sgn * k
    return acc


def circ(x: GraphSeries, y: GraphSeries) -> GraphSeries:
    """Gerstenhaber pre-Lie product ``x o y = sum_i (-1)^(i(m_y-1)) x o_i y``."""
    out: dict = {}
    for gx, cx in x._terms.items():
        for gy, cy in y._terms.items():
            c = cx * cy
            for g, k in _circ_graphs(gx, gy).items():
                if k:
                    term = c * k
                    out[g] = out[g] + term if g in out else term
    return GraphSeries._trusted(out)


def gerstenhaber_bracket(x: GraphSeries, y: GraphSeries) -> GraphSeries:
    out: dict = {}

    def add(g, term):
        out[g] = out[g] + term if g in out else term

    for gx, cx in x._terms.items():
        for gy, cy in y._terms.items():
            c = cx * cy
            sign = -1 if ((gx.n_ground - 1) * (gy.n_ground - 1)) % 2 else 1
            acc = dict(_circ_graphs(gx, gy))
            for g, k in _circ_graphs(gy, gx).items():
                acc[g] = acc.get(g, 0) - sign * k
            for g, k in acc.items():
                if k:
                    add(g, c * k)
    return GraphSeries._trusted(out)


def product_graph(m: int = 2) -> KGraph:
    return KGraph(0, m, ())


A0 = GraphSeries.from_graph(product_graph(2))


def hochschild_d(x: GraphSeries) -> GraphSeries:
    return gerstenhaber_bracket(A0, x)


# ----------------------------------------------------------------------------
# star series


def split_by_order(s: GraphSeries) -> list[GraphSeries]:
    """Homogeneous pieces ``[a_0, a_1, ...]`` by aerial vertex count."""
    top = max((g.n_aerial for g in s.graphs()), default=0)
    return [s.part(j) for j in range(top + 1)]


def gauge_exp(L: GraphSeries, t, a: Sequence[GraphSeries] | GraphSeries, max_order: int) -> list[GraphSeries]:
    """``exp(t [L, .]) a`` truncated to at most ``max_order`` aerial vertices, split by order."""
    if isinstance(a, GraphSeries):
        a = split_by_order(a)
    t = Coefficient.lift(t)
    if L and L.ground_arity() != 1:
        raise GraphError("gauge graph must have exactly one ground vertex")
    if any(g.n_aerial == 0 for g in L.graphs()):
        raise GraphError("gauge graph needs at least one aerial vertex")
    current = series_sum(a).filter(lambda g: g.n_aerial <= max_order)
    total = current
    k = 0
    while current and L:
        k += 1
        current = gerstenhaber_bracket(L, current).filter(lambda g: g.n_aerial <= max_order) * (t / k)
        total = total + current
    return [total.part(j) for j in range(max_order + 1)]


def mc_residual(a: Sequence[GraphSeries], order: int) -> GraphSeries:
    if len(a) <= order:
        raise GraphError(f"star series known only through order {len(a) - 1}, need {order}")
    return series_sum(gerstenhaber_bracket(a[i], a[order - i]) for i in range(order + 1))


# ----------------------------------------------------------------------------
# HKR projection and drawings


def hkr_skew(x: GraphSeries) -> GraphSeries:
    """Keep graphs whose ground vertices all have in-degree 1, then antisymmetrize over the ground."""
    out: dict = {}
    for g, c in x._terms.items():
        if not g.is_hkr_shaped():
            continue
        m = g.n_ground
        w = c / math.factorial(m)
        for perm in itertools.permutations(range(m)):
            sg = ground_permute(g, perm)
            if sg.sign:
                term = w * sg.sign
                out[sg.graph] = out[sg.graph] + term if sg.graph in out else term
    return GraphSeries._trusted(out)


def saturate_to_ground(r: ReducedGraph, m: int) -> GraphSeries:
    """Attach the free legs of ``r`` to ``m`` ground vertices, antisymmetrized.

    Average over all bijections legs -> ground weighted by parity, so the
    identity bijection carries sign +1 and the result is fixed by ``hkr_skew``.
    """
    legs = r.free_legs()
    if len(legs) != m:
        raise GraphError(f"{len(legs)} free legs cannot be attached to {m} ground vertices")
    w = Fraction(1, math.factorial(m))
    terms = []
    for perm in itertools.permutations(range(m)):
        terms.append((r.attach(perm), w * permutation_parity(perm)))
    return GraphSeries(terms)


def graph_series(*pairs) -> GraphSeries:
    """Convenience: ``graph_series((c1, g1), (c2, g2), ...)``."""
    return GraphSeries([(g, c) for c, g in pairs])
