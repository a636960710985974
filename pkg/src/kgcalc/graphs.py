"""Kontsevich graphs: representation, signed canonical forms and the line encoding.

Vertex numbering: ground vertices are ``0 .. m-1``, aerial vertices are
``m .. m+n-1``.  Aerial vertex ``m+k`` carries the ordered target pair
``targets[k]``.

Sign rules used throughout the package:

* relabeling aerial vertices is free (sign +1);
* swapping the two slots of one aerial vertex costs a factor -1;
* ground vertices are ordered and never permuted implicitly.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for invalid graph data or malformed graph lines."""


@dataclass(frozen=True, order=True)
class KGraph:
    n_aerial: int
    n_ground: int
    targets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n_aerial < 0 or self.n_ground < 0:
            raise GraphError("vertex counts must be non-negative")
        if len(self.targets) != self.n_aerial:
            raise GraphError(
                f"declared {self.n_aerial} aerial vertices but got {len(self.targets)} target pairs"
            )
        total = self.n_aerial + self.n_ground
        for k, pair in enumerate(self.targets):
            if len(pair) != 2:
                raise GraphError(f"aerial vertex {self.n_ground + k} needs exactly two targets")
            v = self.n_ground + k
            for t in pair:
                if not 0 <= t < total:
                    raise GraphError(f"target {t} out of range for vertex {v}")
                if t == v:
                    raise GraphError(f"self-edge at aerial vertex {v}")

    @property
    def n_vertices(self) -> int:
        return self.n_aerial + self.n_ground

    @property
    def bigrade(self) -> tuple[int, int]:
        return (self.n_aerial, self.n_ground)

    def aerial_vertices(self) -> range:
        return range(self.n_ground, self.n_ground + self.n_aerial)

    def edges(self) -> list[tuple[int, int]]:
        """All directed edges ``(source, target)`` in slot order."""
        out = []
        for k, pair in enumerate(self.targets):
            out.extend((self.n_ground + k, t) for t in pair)
        return out

    def in_degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for pair in self.targets:
            for t in pair:
                deg[t] += 1
        return deg

    def ground_in_degrees(self) -> tuple[int, ...]:
        return tuple(self.in_degrees()[: self.n_ground])

    def is_hkr_shaped(self) -> bool:
        return all(d == 1 for d in self.ground_in_degrees())

    def __str__(self) -> str:
        return encode_graph(self)


ZERO_GRAPH = None  # canonical zero marker used in SignedGraph results


@dataclass(frozen=True)
class SignedGraph:
    graph: KGraph | None
    sign: int

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


def make_graph(n_ground: int, targets: Iterable[Sequence[int]]) -> KGraph:
    pairs = tuple((int(a), int(b)) for a, b in targets)
    return KGraph(len(pairs), n_ground, pairs)


# ----------------------------------------------------------------------------
# text encoding

_LINE_RE = re.compile(r"^k (\d+) (\d+) ;(?: (\d+ \d+(?: ; \d+ \d+)*))?$")


def parse_graph(text: str) -> KGraph:
    line = text.rstrip("\n")
    m = _LINE_RE.match(line)
    if not m:
        raise GraphError(f"malformed graph line: {text!r}")
    n, g = int(m.group(1)), int(m.group(2))
    body = m.group(3).split(" ; ") if m.group(3) else []
    pairs = []
    for chunk in body:
        a, b = chunk.split()
        pairs.append((int(a), int(b)))
    if len(pairs) != n:
        raise GraphError(f"declared {n} aerial vertices but body lists {len(pairs)}")
    return KGraph(n, g, tuple(pairs))


def encode_graph(g: KGraph) -> str:
    head = f"k {g.n_aerial} {g.n_ground} ;"
    if not g.targets:
        return head
    return head + " " + " ; ".join(f"{a} {b}" for a, b in g.targets)


# ----------------------------------------------------------------------------
# canonical forms


@lru_cache(maxsize=1 << 20)
def _canonical(n: int, m: int, targets: tuple[tuple[int, int], ...]):
    """Return ``(canonical_targets, sign)``; sign 0 marks a graph equal to minus itself."""
    for a, b in targets:
        if a == b:
            return None, 0
    best = None
    best_parity = 0
    for perm in itertools.permutations(range(n)):
        relabel = list(range(m)) + [m + p for p in perm]
        new = [None] * n
        parity = 0
        for k, (a, b) in enumerate(targets):
            ra, rb = relabel[a], relabel[b]
            if ra > rb:
                ra, rb = rb, ra
                parity ^= 1
            new[perm[k]] = (ra, rb)
        cand = tuple(new)
        if best is None or cand < best:
            best, best_parity = cand, parity
        elif cand == best and parity != best_parity:
            # two relabelings reach the same form with different parity: odd automorphism
            return None, 0
    return best, -1 if best_parity else 1


def canonicalize(g: KGraph) -> SignedGraph:
    """Canonical representative ``c`` and sign ``s`` with ``g = s * c``."""
    best, sign = _canonical(g.n_aerial, g.n_ground, g.targets)
    if sign == 0:
        return SignedGraph(ZERO_GRAPH, 0)
    return SignedGraph(KGraph(g.n_aerial, g.n_ground, best), sign)


def is_canonical(g: KGraph) -> bool:
    c = canonicalize(g)
    return c.sign == 1 and c.graph == g


def relabel_ground(g: KGraph, perm: Sequence[int]) -> KGraph:
    """Send ground vertex ``j`` to ``perm[j]``; aerial vertices keep their labels."""
    m = g.n_ground
    if sorted(perm) != list(range(m)):
        raise GraphError(f"not a permutation of 0..{m - 1}: {perm}")
    mp = list(perm) + list(range(m, g.n_vertices))
    return KGraph(g.n_aerial, m, tuple((mp[a], mp[b]) for a, b in g.targets))


def permutation_parity(perm: Sequence[int]) -> int:
    """+1 for even, -1 for odd permutations."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def ground_permute(g: KGraph, perm: Sequence[int]) -> SignedGraph:
    c = canonicalize(relabel_ground(g, perm))
    if c.sign == 0:
        return c
    return SignedGraph(c.graph, c.sign * permutation_parity(perm))


# ----------------------------------------------------------------------------
# cycles


def has_directed_cycle(g: KGraph) -> bool:
    m = g.n_ground
    state = [0] * g.n_aerial  # 0 new, 1 on stack, 2 done

    def visit(k: int) -> bool:
        state[k] = 1
        for t in g.targets[k]:
            if t < m:
                continue
            j = t - m
            if state[j] == 1:
                return True
            if state[j] == 0 and visit(j):
                return True
        state[k] = 2
        return False

    return any(state[k] == 0 and visit(k) for k in range(g.n_aerial))


# ----------------------------------------------------------------------------
# drawings with omitted ground vertices


@dataclass(frozen=True)
class ReducedGraph:
    """Aerial part of a graph; ``None`` slots are free legs to be sent to the ground.

    Aerial targets use aerial numbering ``0 .. n-1``.
    """

    targets: tuple[tuple[int | None, int | None], ...]

    def __post_init__(self):
        n = len(self.targets)
        for k, pair in enumerate(self.targets):
            if len(pair) != 2:
                raise GraphError("each aerial vertex has two slots")
            for t in pair:
                if t is not None and not (0 <= t < n and t != k):
                    raise GraphError(f"bad aerial target {t} at vertex {k}")

    @property
    def n_aerial(self) -> int:
        return len(self.targets)

    def free_legs(self) -> list[tuple[int, int]]:
        return [(k, s) for k, pair in enumerate(self.targets) for s, t in enumerate(pair) if t is None]

    def attach(self, assignment: Sequence[int]) -> KGraph:
        """Graph with the i-th free leg sent to ground vertex ``assignment[i]``."""
        m = len(assignment)
        legs = iter(assignment)
        pairs = []
        for pair in self.targets:
            pairs.append(tuple(next(legs) if t is None else m + t for t in pair))
        return KGraph(self.n_aerial, m, tuple(pairs))


# ----------------------------------------------------------------------------
# Leibniz graphs


@dataclass(frozen=True, order=True)
class LeibnizGraph:
    """Graph with one trivalent Jacobiator vertex standing for the Jacobi expression of pi.

    Numbering: ground ``0 .. m-1``, ordinary aerial ``m .. m+k-1``, Jacobiator
    ``m+k``.  Ordinary vertices may point at the Jacobiator.
    """

    n_ground: int
    jacobiator: tuple[int, int, int]
    targets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        m, k = self.n_ground, len(self.targets)
        total = m + k + 1
        j = m + k
        if len(self.jacobiator) != 3:
            raise GraphError("Jacobiator vertex needs three legs")
        for t in self.jacobiator:
            if not 0 <= t < total or t == j:
                raise GraphError(f"bad Jacobiator target {t}")
        for i, pair in enumerate(self.targets):
            if len(pair) != 2:
                raise GraphError("ordinary vertices need two targets")
            for t in pair:
                if not 0 <= t < total or t == m + i:
                    raise GraphError(f"bad target {t} at vertex {m + i}")

    @property
    def n_ordinary(self) -> int:
        return len(self.targets)

    @property
    def jacobiator_vertex(self) -> int:
        return self.n_ground + len(self.targets)

    @property
    def bigrade(self) -> tuple[int, int]:
        """Bigrade of the expansion: the Jacobiator becomes two aerial vertices."""
        return (len(self.targets) + 2, self.n_ground)
