"""Exhaustive generation of canonical Kontsevich graphs and Leibniz graphs."""
from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable

from .graphs import KGraph, LeibnizGraph, canonicalize, ground_permute, has_directed_cycle

DEFAULT_MAX_AERIAL = 5
DEFAULT_MAX_RAW = 5_000_000


class GuardLimitExceeded(RuntimeError):
    pass


def is_loopless(g: KGraph) -> bool:
    return not has_directed_cycle(g)


def is_hkr(g: KGraph) -> bool:
    return g.is_hkr_shaped()


def is_loopy_hkr(g: KGraph) -> bool:
    return g.is_hkr_shaped() and has_directed_cycle(g)


FILTERS: dict[str, Callable[[KGraph], bool]] = {
    "loopless": is_loopless,
    "loopy": has_directed_cycle,
    "hkr": is_hkr,
    "loopy-hkr": is_loopy_hkr,
}


def _check_guard(n_aerial: int, raw: int, max_aerial: int, max_raw: int):
    if n_aerial > max_aerial:
        raise GuardLimitExceeded(f"{n_aerial} aerial vertices exceeds the limit {max_aerial}")
    if raw > max_raw:
        raise GuardLimitExceeded(f"{raw} raw assignments exceeds the limit {max_raw}")


def ground_orbit_representative(g: KGraph):
    """Least canonical graph among ground relabelings of ``g``; None if its skew projection vanishes."""
    signs: dict = {}
    for perm in itertools.permutations(range(g.n_ground)):
        sg = ground_permute(g, perm)
        if sg.sign:
            signs.setdefault(sg.graph, set()).add(sg.sign)
    if not signs or any(len(s) > 1 for s in signs.values()):
        return None
    return min(signs)


def enumerate_graphs(
    n_aerial: int,
    n_ground: int,
    filters: Iterable[Callable[[KGraph], bool]] = (),
    *,
    up_to_ground_order: bool = False,
    max_aerial: int = DEFAULT_MAX_AERIAL,
    max_raw: int = DEFAULT_MAX_RAW,
) -> list[KGraph]:
    """All nonzero canonical graphs of the bigrade passing every filter, in canonical order.

    With ``up_to_ground_order`` only one graph per orbit under ground
    relabeling is returned (the least one), and orbits whose antisymmetrization
    vanishes are dropped.  This is the natural count for HKR-shaped families,
    whose drawings omit the ground vertices.

    Candidates assign each aerial vertex an increasing pair of distinct targets;
    a candidate is kept only if it is its own canonical form with sign +1.
    """
    filters = list(filters)
    total = n_aerial + n_ground
    choices = [
        [p for p in itertools.combinations(range(total), 2) if n_ground + k not in p]
        for k in range(n_aerial)
    ]
    _check_guard(n_aerial, math.prod(len(c) for c in choices), max_aerial, max_raw)
    out = []
    for pairs in itertools.product(*choices):
        g = KGraph(n_aerial, n_ground, pairs)
        c = canonicalize(g)
        if c.sign == 1 and c.graph == g and all(f(g) for f in filters):
            out.append(g)
    if up_to_ground_order:
        out = sorted({r for r in map(ground_orbit_representative, out) if r is not None})
    out.sort()
    return out


def basis(n_aerial: int, n_ground: int, **kw) -> list[KGraph]:
    return enumerate_graphs(n_aerial, n_ground, **kw)


def leibniz_key(lg: LeibnizGraph) -> tuple:
    """Invariant of a Leibniz graph under relabeling ordinary vertices (legs taken unordered)."""
    m, k = lg.n_ground, lg.n_ordinary
    j = m + k
    best = None
    for perm in itertools.permutations(range(k)):
        relabel = list(range(m)) + [m + p for p in perm] + [j]
        new = [None] * k
        for i, pair in enumerate(lg.targets):
            new[perm[i]] = tuple(sorted(relabel[t] for t in pair))
        cand = (tuple(sorted(relabel[t] for t in lg.jacobiator)), tuple(new))
        if best is None or cand < best:
            best = cand
    return best


def enumerate_leibniz(
    n_aerial: int,
    n_ground: int,
    *,
    max_aerial: int = DEFAULT_MAX_AERIAL,
    max_raw: int = DEFAULT_MAX_RAW,
) -> list[LeibnizGraph]:
    """Leibniz graphs whose expansion lands in bigrade ``(n_aerial, n_ground)``, one per relabeling class."""
    if n_aerial < 2:
        raise ValueError("a Leibniz graph expands to at least two aerial vertices")
    k = n_aerial - 2
    m = n_ground
    j = m + k
    triples = list(itertools.combinations(range(m + k), 3))
    choices = [[p for p in itertools.combinations(range(j + 1), 2) if m + i not in p] for i in range(k)]
    _check_guard(n_aerial, len(triples) * math.prod(len(c) for c in choices), max_aerial, max_raw)
    seen = set()
    out = []
    for tri in triples:
        for pairs in itertools.product(*choices):
            lg = LeibnizGraph(m, tri, tuple(pairs))
            key = leibniz_key(lg)
            if key in seen:
                continue
            seen.add(key)
            out.append(LeibnizGraph(m, key[0], key[1]))
    out.sort()
    return out
