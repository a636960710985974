"""Exact sparse row spaces over the rationals, with parametric membership certificates."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coeffs import Coefficient, format_coeff
from .graphs import KGraph, encode_graph
from .series import GraphSeries, format_series

SparseVec = dict  # column -> Fraction


class BigradeMismatch(ValueError):
    pass


def _axpy(dst: SparseVec, a: Fraction, src: SparseVec):
    """dst += a * src, in place, dropping zeros."""
    for k, v in src.items():
        nv = dst.get(k, 0) + a * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)


class RelationSystem:
    """Row space of rational relation vectors over a fixed, ordered graph basis.

    The echelon form is kept fully reduced: every pivot row is monic and no
    other row has an entry in its pivot column.  Pivots are first nonzero
    entries in basis order, so the normal form of a vector is independent of
    the order rows were supplied in.
    """

    def __init__(
        self,
        basis: Sequence[KGraph],
        rows: Iterable[tuple[str, GraphSeries]] = (),
        *,
        track: bool = False,
        name: str = "",
    ):
        self.basis = list(basis)
        self.index = {g: i for i, g in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise ValueError("basis has repeated graphs")
        self.bigrade = self.basis[0].bigrade if self.basis else None
        self.track = track
        self.name = name
        self.labels: list[str] = []
        self.raw: list[SparseVec] = []
        self.pivots: dict[int, SparseVec] = {}
        self.combos: dict[int, dict] = {}
        for label, s in rows:
            self.add_row(label, s)

    # -- construction --------------------------------------------------------

    def vector(self, s: GraphSeries) -> SparseVec:
        """Rational coordinates of a series with constant coefficients."""
        v = {}
        for g, c in s.items():
            if g not in self.index:
                raise BigradeMismatch(f"{encode_graph(g)} is not in the basis of {self.bigrade}")
            v[self.index[g]] = c.constant_value()
        return v

    def parametric_vectors(self, s: GraphSeries) -> dict:
        """Monomial -> rational coordinate vector."""
        out: dict = {}
        for g, c in s.items():
            if g not in self.index:
                raise BigradeMismatch(f"{encode_graph(g)} is not in the basis of {self.bigrade}")
            col = self.index[g]
            for mono, q in c.terms.items():
                out.setdefault(mono, {})[col] = q
        return out

    def add_row(self, label: str, s: GraphSeries) -> bool:
        """Add a relation; return True if it increased the rank."""
        v = self.vector(s)
        self.labels.append(label)
        self.raw.append(v)
        combo = {len(self.raw) - 1: Fraction(1)} if self.track else None
        v = dict(v)
        self._reduce_in_place(v, combo)
        if not v:
            return False
        p = min(v)
        inv = 1 / v[p]
        for k in v:
            v[k] *= inv
        if combo is not None:
            for k in combo:
                combo[k] *= inv
        for q, row in self.pivots.items():
            a = row.get(p)
            if a:
                _axpy(row, -a, v)
                if combo is not None:
                    _axpy(self.combos[q], -a, combo)
        self.pivots[p] = v
        if combo is not None:
            self.combos[p] = combo
        return True

    def _reduce_in_place(self, v: SparseVec, combo: dict | None):
        for p in sorted(k for k in v if k in self.pivots):
            a = v.get(p)
            if a:
                _axpy(v, -a, self.pivots[p])
                if combo is not None:
                    _axpy(combo, -a, self.combos[p])

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def n_rows(self) -> int:
        return len(self.raw)

    def union(self, *others: "RelationSystem", extra: Iterable[tuple[str, GraphSeries]] = (), name: str = "") -> "RelationSystem":
        out = RelationSystem(self.basis, track=self.track, name=name or self.name)
        for sysm in (self,) + others:
            if sysm.basis != self.basis:
                raise BigradeMismatch("systems live on different bases")
            for label, v in zip(sysm.labels, sysm.raw):
                out._add_vector(label, v)
        for label, s in extra:
            out.add_row(label, s)
        return out

    def _add_vector(self, label: str, v: SparseVec):
        s = GraphSeries._trusted({self.basis[k]: Coefficient.const(q) for k, q in v.items()})
        self.add_row(label, s)

    def row_series(self, i: int) -> GraphSeries:
        return GraphSeries._trusted({self.basis[k]: Coefficient.const(q) for k, q in self.raw[i].items()})

    # -- queries ---------------------------------------------------------------

    def reduce_vector(self, v: SparseVec) -> tuple[SparseVec, dict]:
        """Normal form of ``v`` and raw-row combination ``c`` with ``v - nf = sum c_i row_i``."""
        v = dict(v)
        combo: dict = {}
        for p in [k for k in v if k in self.pivots]:
            a = v.get(p)
            if not a:
                continue
            _axpy(v, -a, self.pivots[p])
            if self.track:
                _axpy(combo, a, self.combos[p])
        return v, combo

    def reduce(self, s: GraphSeries) -> GraphSeries:
        """Normal form of a (possibly parametric) series modulo the row space."""
        out: dict = {}
        for mono, v in self.parametric_vectors(s).items():
            nf, _ = self.reduce_vector(v)
            for k, q in nf.items():
                g = self.basis[k]
                term = Coefficient({mono: q})
                out[g] = out[g] + term if g in out else term
        return GraphSeries._trusted(out)

    def contains(self, s: GraphSeries) -> bool:
        return self.reduce(s).is_zero()

    def functional(self, col: int) -> SparseVec:
        """Dual vector vanishing on the row space with value 1 on the free column ``col``."""
        if col in self.pivots:
            raise ValueError("pivot columns carry no separating functional")
        phi = {col: Fraction(1)}
        for p, row in self.pivots.items():
            a = row.get(col)
            if a:
                phi[p] = -a
        return phi

    def digest(self) -> str:
        h = hashlib.sha256()
        for g in self.basis:
            h.update(encode_graph(g).encode() + b"\n")
        for v in self.raw:
            h.update(repr(sorted(v.items())).encode() + b"\n")
        return h.hexdigest()[:16]


# ----------------------------------------------------------------------------
# certificates


def series_digest(s: GraphSeries) -> str:
    return hashlib.sha256(format_series(s).encode()).hexdigest()[:16]


def pair(phi: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Fraction:
    if len(phi) > len(v):
        phi, v = v, phi
    return sum((q * v[k] for k, q in phi.items() if k in v), Fraction(0))


@dataclass
class Certificate:
    verdict: str  # "member" | "non-member" | "conditional"
    basis_size: int
    rank: int
    system: str
    target_digest: str
    system_digest: str
    combination: dict = field(default_factory=dict)  # row index -> Coefficient
    functionals: list = field(default_factory=list)  # (condition Coefficient, {graph: Fraction})
    conditions: list = field(default_factory=list)  # Coefficients that must vanish for membership
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "system": self.system,
            "basis_size": self.basis_size,
            "rank": self.rank,
            "target_digest": self.target_digest,
            "system_digest": self.system_digest,
            "conditions": [format_coeff(c) + " = 0" for c in self.conditions],
            "combination": {str(k): format_coeff(c) for k, c in sorted(self.combination.items())},
            "functionals": [
                {
                    "value": format_coeff(val),
                    "entries": [[encode_graph(g), _fmt(q)] for g, q in sorted(phi.items())],
                }
                for val, phi in self.functionals
            ],
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [
            f"verdict: {self.verdict}",
            f"system: {self.system}",
            f"basis_size: {self.basis_size}",
            f"rank: {self.rank}",
            f"target_digest: {self.target_digest}",
            f"system_digest: {self.system_digest}",
        ]
        for c in self.conditions:
            lines.append(f"condition: {format_coeff(c)} = 0")
        for k, c in sorted(self.combination.items()):
            lines.append(f"combination: row {k} * {format_coeff(c)}")
        for val, phi in self.functionals:
            lines.append(f"functional: value {format_coeff(val)} support {len(phi)}")
        if self.note:
            lines.append(f"note: {self.note}")
        return "\n".join(lines) + "\n"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


CONSERVATIVE_NOTE = (
    "relations are the span of the generated rows only; a non-membership verdict "
    "is relative to that span, which is a subspace of all valid identities"
)


def linear_span_basis(polys: list[Coefficient]) -> tuple[list[Coefficient], list[dict]]:
    """Echelon basis of the rational span of ``polys`` and, for each basis element, its combination."""
    monos = sorted({m for p in polys for m in p.terms}, key=lambda m: (len(m), m))
    order = {m: i for i, m in enumerate(monos)}
    rows: list[tuple[dict, dict]] = []
    for idx, p in enumerate(polys):
        v = {order[m]: q for m, q in p.terms.items()}
        combo = {idx: Fraction(1)}
        for pv, pc in rows:
            piv = min(pv)
            a = v.get(piv)
            if a:
                _axpy(v, -a, pv)
                _axpy(combo, -a, pc)
        if not v:
            continue
        piv = min(v)
        inv = 1 / v[piv]
        v = {k: q * inv for k, q in v.items()}
        combo = {k: q * inv for k, q in combo.items()}
        for pv, pc in rows:
            a = pv.get(piv)
            if a:
                _axpy(pv, -a, v)
                _axpy(pc, -a, combo)
        rows.append((v, combo))
    rows.sort(key=lambda r: min(r[0]))
    basis = [Coefficient({monos[k]: q for k, q in v.items()}) for v, _ in rows]
    return basis, [c for _, c in rows]


def membership(x: GraphSeries, system: RelationSystem) -> Certificate:
    """Decide whether ``x`` lies in the row space, for all, some or no parameter values."""
    parts = system.parametric_vectors(x)
    normal: dict = {}
    combination: dict = {}
    for mono, v in parts.items():
        nf, combo = system.reduce_vector(v)
        for k, q in nf.items():
            normal[k] = normal.get(k, Coefficient()) + Coefficient({mono: q})
        for r, q in combo.items():
            combination[r] = combination.get(r, Coefficient()) + Coefficient({mono: q})
    normal = {k: c for k, c in normal.items() if c}
    common = dict(
        basis_size=len(system.basis),
        rank=system.rank,
        system=system.name,
        target_digest=series_digest(x),
        system_digest=system.digest(),
    )
    if not normal:
        return Certificate(
            "member",
            combination={k: c for k, c in combination.items() if c} if system.track else {},
            **common,
        )
    cols = sorted(normal)
    conds, combos = linear_span_basis([normal[k] for k in cols])
    functionals = []
    for cond, combo in zip(conds, combos):
        phi: dict = {}
        for i, mu in combo.items():
            _axpy(phi, mu, system.functional(cols[i]))
        functionals.append((cond, {system.basis[k]: q for k, q in phi.items()}))
    verdict = "non-member" if any(c.is_constant() for c in conds) else "conditional"
    return Certificate(verdict, functionals=functionals, conditions=conds, note=CONSERVATIVE_NOTE, **common)


def verify_certificate(cert: Certificate, x: GraphSeries, system: RelationSystem) -> bool:
    """Re-check a certificate by direct arithmetic against the raw rows of ``system``."""
    if cert.verdict == "member":
        if not system.track and x:
            return False
        total = GraphSeries()
        for r, c in cert.combination.items():
            total = total + system.row_series(r) * c
        return total == x
    parts = system.parametric_vectors(x)
    for cond, phi_g in cert.functionals:
        phi = {system.index[g]: q for g, q in phi_g.items()}
        if any(pair(phi, row) for row in system.raw):
            return False
        value = Coefficient()
        for mono, v in parts.items():
            value = value + Coefficient({mono: pair(phi, v)})
        if value != cond:
            return False
    return bool(cert.functionals)


def forced_zero(cert: Certificate, variables: Iterable[str]) -> list[str]:
    """Variables that the (linear) membership conditions force to vanish."""
    if cert.verdict == "member":
        return []
    out = []
    for var in variables:
        probe = Coefficient.var(var)
        basis, _ = linear_span_basis(list(cert.conditions) + [probe])
        if len(basis) == len(linear_span_basis(list(cert.conditions))[0]):
            out.append(var)
    return out
