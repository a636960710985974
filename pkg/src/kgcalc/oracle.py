"""Graphs as multidifferential operators on polynomials, for concrete polynomial bivectors.

This module is an independent semantic check on the combinatorics: it never
canonicalizes graphs, it just sums over index assignments and differentiates.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .coeffs import Coefficient
from .graphs import GraphError, KGraph, permutation_parity
from .series import GraphSeries


class Poly:
    """Sparse polynomial in ``x1 .. xd``: ``{exponent tuple: scalar}``.

    Scalars may be Fractions or Coefficients (parameters pass through).
    """

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: Mapping[tuple, object] | None = None):
        self.d = d
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, d, c) -> "Poly":
        return cls(d, {(0,) * d: c})

    @classmethod
    def var(cls, d, i) -> "Poly":
        e = [0] * d
        e[i] = 1
        return cls(d, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=Fraction(1)) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(self.d, out)

    def __neg__(self):
        return Poly(self.d, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.d, {e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return Poly(self.d, out)

    __rmul__ = __mul__

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.d, out)

    def diff_many(self, idx: Iterable[int]) -> "Poly":
        p = self
        for i in idx:
            if not p:
                break
            p = p.diff(i)
        return p

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


_PTERM = re.compile(r"([+-]?)([^+-]+)")
_VAR = re.compile(r"^x(\d+)(?:\^(\d+))?$")
_NUM = re.compile(r"^\d+(?:/\d+)?$")


def parse_poly(text: str, d: int) -> Poly:
    s = text.replace(" ", "")
    out = Poly(d)
    if s == "0":
        return out
    pos = 0
    for m in _PTERM.finditer(s):
        if m.start() != pos:
            raise ValueError(f"malformed polynomial {text!r}")
        pos = m.end()
        c = Fraction(-1 if m.group(1) == "-" else 1)
        e = [0] * d
        for f in m.group(2).split("*"):
            if _NUM.match(f):
                c *= Fraction(f)
                continue
            v = _VAR.match(f)
            if not v or not 1 <= int(v.group(1)) <= d:
                raise ValueError(f"bad factor {f!r} in {text!r}")
            e[int(v.group(1)) - 1] += int(v.group(2) or 1)
        out = out + Poly(d, {tuple(e): c})
    if pos != len(s) or not s:
        raise ValueError(f"malformed polynomial {text!r}")
    return out


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e in sorted(p.terms, reverse=True):
        c = p.terms[e]
        mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        cs = str(c) if not isinstance(c, Coefficient) else f"({c})"
        if mono:
            body = mono if cs == "1" else (f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
        else:
            body = cs
        parts.append(body)
    return " + ".join(parts).replace("+ -", "- ")


class PolyBivector:
    """Skew matrix of polynomials ``pi^{ij}``; indices are 0-based internally."""

    def __init__(self, d: int, entries: Mapping[tuple[int, int], Poly], *, poisson: bool = False):
        self.d = d
        self._m: dict = {}
        for (i, j), p in entries.items():
            if i == j:
                if p:
                    raise GraphError("diagonal entries of a bivector must vanish")
                continue
            if not (0 <= i < d and 0 <= j < d):
                raise GraphError(f"index pair {(i, j)} out of range")
            self._m[(i, j)] = p
            self._m[(j, i)] = -p
        self._cache: dict = {}
        if poisson and not self.is_poisson():
            raise GraphError("bivector flagged Poisson fails the Jacobi identity")
        self.poisson = poisson

    def entry(self, i: int, j: int) -> Poly:
        return self._m.get((i, j), Poly(self.d))

    def derivative(self, i: int, j: int, idx: tuple) -> Poly:
        key = (i, j, tuple(sorted(idx)))
        p = self._cache.get(key)
        if p is None:
            p = self.entry(i, j).diff_many(key[2])
            self._cache[key] = p
        return p

    def jacobiator(self, i: int, j: int, k: int) -> Poly:
        out = Poly(self.d)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(self.d):
                out = out + self.entry(a, l) * self.derivative(b, c, (l,))
        return out

    def is_poisson(self) -> bool:
        d = self.d
        return all(
            not self.jacobiator(i, j, k)
            for i in range(d)
            for j in range(i + 1, d)
            for k in range(j + 1, d)
        )


def parse_bivector(text: str, *, poisson: bool = False) -> PolyBivector:
    """File form: ``dim <d>`` then lines ``i j : <polynomial>`` with 1-based ``i < j``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or not re.match(r"^dim \d+$", lines[0]):
        raise ValueError("bivector file must start with 'dim <d>'")
    d = int(lines[0].split()[1])
    entries = {}
    for ln in lines[1:]:
        m = re.match(r"^(\d+) (\d+) : (.+)$", ln)
        if not m:
            raise ValueError(f"malformed bivector entry {ln!r}")
        i, j = int(m.group(1)), int(m.group(2))
        if not 1 <= i < j <= d:
            raise ValueError(f"entry indices must satisfy 1 <= i < j <= {d}: {ln!r}")
        entries[(i - 1, j - 1)] = parse_poly(m.group(3), d)
    return PolyBivector(d, entries, poisson=poisson)


# ----------------------------------------------------------------------------
# standard test bivectors


def constant_symplectic() -> PolyBivector:
    return PolyBivector(2, {(0, 1): Poly.const(2, Fraction(1))}, poisson=True)


def linear_so3() -> PolyBivector:
    """``pi^{ij} = sum_k eps_{ijk} x_k``."""
    v = lambda i: Poly.var(3, i)  # noqa: E731
    return PolyBivector(3, {(0, 1): v(2), (1, 2): v(0), (0, 2): -v(1)}, poisson=True)


def perturbed_so3() -> PolyBivector:
    """A non-Poisson deformation of ``linear_so3``."""
    v = lambda i: Poly.var(3, i)  # noqa: E731
    return PolyBivector(3, {(0, 1): v(2) + v(0) * v(0), (1, 2): v(0), (0, 2): -v(1)})


def log_canonical(c: Sequence[Sequence[int]]) -> PolyBivector:
    """Quadratic ``pi^{ij} = c_ij x_i x_j``; Poisson for every skew ``c``."""
    d = len(c)
    entries = {}
    for i in range(d):
        for j in range(i + 1, d):
            if c[i][j]:
                entries[(i, j)] = Poly.var(d, i) * Poly.var(d, j) * Fraction(c[i][j])
    return PolyBivector(d, entries, poisson=True)


def jacobian_bivector(f: Poly, g: Poly) -> PolyBivector:
    """Four-dimensional ``pi^{ij} = eps_{ijkl} d_k f d_l g``: Poisson with Casimirs ``f`` and ``g``.

    Unlike the low-degree structures above it produces nonzero trivectors from
    graphs with four aerial vertices, so it can separate order-four residues.
    """
    if f.d != 4 or g.d != 4:
        raise GraphError("the Jacobian bivector is defined in dimension 4")
    entries = {}
    for i, j in itertools.combinations(range(4), 2):
        k, l = (t for t in range(4) if t not in (i, j))
        sign = permutation_parity((i, j, k, l))
        entries[(i, j)] = (f.diff(k) * g.diff(l) - f.diff(l) * g.diff(k)) * Fraction(sign)
    return PolyBivector(4, entries, poisson=True)


# ----------------------------------------------------------------------------
# evaluation


def _plan(g: KGraph):
    """For each aerial step, the vertices whose factors become computable after it."""
    m, n = g.n_ground, g.n_aerial
    sources: dict = {v: [] for v in range(g.n_vertices)}
    for k, pair in enumerate(g.targets):
        for s, t in enumerate(pair):
            sources[t].append((k, s))
    ready_at = {}
    for v in range(g.n_vertices):
        last = max([k for k, _ in sources[v]], default=-1)
        if v >= m:
            last = max(last, v - m)
        ready_at[v] = last
    steps = [[v for v in range(g.n_vertices) if ready_at[v] == k] for k in range(n)]
    early = [v for v in range(g.n_vertices) if ready_at[v] == -1]
    return sources, steps, early


def _walk(g: KGraph, pi: PolyBivector, ground_factor):
    """Yield (index assignment, product of aerial factors) over nonzero branches."""
    d, m, n = pi.d, g.n_ground, g.n_aerial
    sources, steps, early = _plan(g)
    assign: list = [None] * n
    results = []

    def factor(v):
        idx = tuple(assign[k][s] for k, s in sources[v])
        if v < m:
            return ground_factor(v, idx)
        i, j = assign[v - m]
        return pi.derivative(i, j, idx)

    def rec(k, acc):
        if k == n:
            results.append((tuple(assign), acc))
            return
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                assign[k] = (i, j)
                cur = acc
                for v in steps[k]:
                    f = factor(v)
                    if f is None:
                        continue
                    if not f:
                        cur = None
                        break
                    cur = f if cur is None or cur is True else cur * f
                if cur is not None:
                    rec(k + 1, cur)
        assign[k] = None

    acc = True
    for v in early:
        f = factor(v)
        if f is None:
            continue
        if not f:
            return []
        acc = f if acc is True else acc * f
    rec(0, acc)
    return results


def evaluate(g: KGraph, pi: PolyBivector, args: Sequence[Poly]) -> Poly:
    """Apply the operator of ``g`` (built from ``pi``) to ``args``, one per ground vertex."""
    if len(args) != g.n_ground:
        raise GraphError(f"graph has {g.n_ground} ground vertices but {len(args)} arguments were given")
    if any(a.d != pi.d for a in args):
        raise GraphError("argument dimension differs from the bivector's")
    total = Poly(pi.d)
    for _, acc in _walk(g, pi, lambda v, idx: args[v].diff_many(idx)):
        total = total + (Poly.const(pi.d, Fraction(1)) if acc is True else acc)
    return total


@lru_cache(maxsize=1 << 16)
def _operator_cached(g: KGraph, pi_id: int):
    pi = _PI_REGISTRY[pi_id]
    out: dict = {}
    marks: dict = {}

    def ground(v, idx):
        marks[v] = tuple(sorted(idx))
        return None

    sources, _, _ = _plan(g)
    for assign, acc in _walk(g, pi, ground):
        key = tuple(tuple(sorted(assign[k][s] for k, s in sources[v])) for v in range(g.n_ground))
        p = Poly.const(pi.d, Fraction(1)) if acc is True else acc
        out[key] = out[key] + p if key in out else p
    return {k: p for k, p in out.items() if p}


_PI_REGISTRY: dict = {}


def operator(g: KGraph, pi: PolyBivector) -> dict:
    """Full operator of ``g``: derivative multi-indices per ground vertex -> coefficient polynomial."""
    _PI_REGISTRY[id(pi)] = pi
    return _operator_cached(g, id(pi))


def series_operator(x: GraphSeries, pi: PolyBivector) -> dict:
    """Operator of a series with rational coefficients."""
    x.ground_arity()
    out: dict = {}
    for g, c in x.items():
        q = c.constant_value()
        for k, p in operator(g, pi).items():
            out[k] = out[k] + p * q if k in out else p * q
    return {k: p for k, p in out.items() if p}


def operator_vanishes(x: GraphSeries, pi: PolyBivector) -> bool:
    return not series_operator(x, pi)


def evaluate_series(x: GraphSeries, pi: PolyBivector, args: Sequence[Poly]) -> Poly:
    """Linear extension of ``evaluate``; parameters in coefficients pass through symbolically."""
    x.ground_arity()
    total = Poly(pi.d)
    for g, c in x.items():
        val = evaluate(g, pi, args)
        if val:
            scalar = c.constant_value() if c.is_constant() else c
            total = total + val * scalar
    return total


def monomials(d: int, max_degree: int) -> list[Poly]:
    out = []

    def rec(prefix, left):
        if len(prefix) == d:
            out.append(Poly.monomial(prefix))
            return
        for k in range(left + 1):
            rec(prefix + [k], left - k)

    rec([], max_degree)
    return out


def associator(parts: Sequence[GraphSeries], pi: PolyBivector, f: Poly, g: Poly, h: Poly, order: int) -> Poly:
    """Order-``order`` part of ``(f * g) * h - f * (g * h)`` for the product ``sum_k parts[k]``."""
    if len(parts) <= order:
        raise GraphError(f"product known only through order {len(parts) - 1}")
    total = Poly(pi.d)
    for i in range(order + 1):
        j = order - i
        left = evaluate_series(parts[j], pi, [f, g])
        right = evaluate_series(parts[j], pi, [g, h])
        total = total + evaluate_series(parts[i], pi, [left, h]) - evaluate_series(parts[i], pi, [f, right])
    return total
