"""Relation spaces: expansions of the Jacobi identity of pi, and Hochschild coboundaries."""
from __future__ import annotations

import itertools

from .enumeration import basis as graph_basis
from .enumeration import enumerate_leibniz
from .graphs import KGraph, LeibnizGraph
from .linalg import BigradeMismatch, Certificate, RelationSystem, membership as _membership
from .series import GraphSeries, hochschild_d


def jacobiator_expand(lg: LeibnizGraph) -> GraphSeries:
    """Replace the Jacobiator by ``pi^{a l} d_l pi^{b c}`` summed over cyclic (a, b, c).

    The two new vertices are ``u = (a, w)`` and ``w = (b, c)``; edges that hit
    the Jacobiator are distributed over ``u`` and ``w`` (Leibniz rule).
    """
    m, k = lg.n_ground, lg.n_ordinary
    j = m + k
    u, w = j, j + 1
    incoming = [(i, s) for i, pair in enumerate(lg.targets) for s, t in enumerate(pair) if t == j]
    x, y, z = lg.jacobiator
    terms = []
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        for choice in itertools.product((u, w), repeat=len(incoming)):
            rows = [list(p) for p in lg.targets]
            for (i, s), t in zip(incoming, choice):
                rows[i][s] = t
            pairs = tuple(tuple(r) for r in rows) + ((a, w), (b, c))
            terms.append((KGraph(k + 2, m, pairs), 1))
    return GraphSeries(terms)


def jacobi_rows(n_aerial: int, n_ground: int, **kw) -> list[tuple[str, GraphSeries]]:
    rows = []
    for lg in enumerate_leibniz(n_aerial, n_ground, **kw):
        s = jacobiator_expand(lg)
        if s:
            rows.append((f"jacobi {lg.jacobiator} {lg.targets}", s))
    return rows


def generate_jacobi_relations(n_aerial: int, n_ground: int, *, track: bool = False, **kw) -> RelationSystem:
    return RelationSystem(
        graph_basis(n_aerial, n_ground, **kw),
        jacobi_rows(n_aerial, n_ground, **kw),
        track=track,
        name=f"jacobi({n_aerial},{n_ground})",
    )


def coboundary_rows(n_aerial: int, n_ground: int, **kw) -> list[tuple[str, GraphSeries]]:
    if n_ground < 1:
        raise ValueError("coboundaries need at least one ground vertex")
    rows = []
    for g in graph_basis(n_aerial, n_ground - 1, **kw):
        s = hochschild_d(GraphSeries.from_graph(g))
        if s:
            rows.append((f"d {g}", s))
    return rows


def generate_coboundaries(n_aerial: int, n_ground: int, *, track: bool = False, **kw) -> RelationSystem:
    return RelationSystem(
        graph_basis(n_aerial, n_ground, **kw),
        coboundary_rows(n_aerial, n_ground, **kw),
        track=track,
        name=f"coboundary({n_aerial},{n_ground})",
    )


def _check_bigrade(x: GraphSeries, system: RelationSystem):
    grades = x.bigrades()
    if grades and grades != {system.bigrade}:
        raise BigradeMismatch(f"series in bigrades {sorted(grades)}, system in {system.bigrade}")


def reduce_mod(x: GraphSeries, system: RelationSystem) -> GraphSeries:
    _check_bigrade(x, system)
    return system.reduce(x)


def membership(x: GraphSeries, system: RelationSystem) -> Certificate:
    _check_bigrade(x, system)
    return _membership(x, system)
