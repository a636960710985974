"""Exact polynomial coefficients in named formal parameters (alpha, beta, t, ...)."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Union

Monomial = tuple  # sorted tuple of parameter names, with repetition

Scalar = Union[int, Fraction]


def _monomial_key(mono: Monomial):
    return (len(mono), mono)


class Coefficient:
    """Sparse polynomial ``{monomial: Fraction}`` with no stored zeros."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[tuple(sorted(mono))] = clean.get(tuple(sorted(mono)), 0) + c
            clean = {k: v for k, v in clean.items() if v}
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: Scalar) -> "Coefficient":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, c: Scalar = 1) -> "Coefficient":
        return cls({(name,): c})

    @classmethod
    def lift(cls, x) -> "Coefficient":
        if isinstance(x, Coefficient):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        if isinstance(x, str):
            return parse_coeff(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Coefficient")

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for mono in self._terms for v in mono}

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def __add__(self, other):
        other = Coefficient.lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Coefficient(out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Coefficient.lift(other))

    def __rsub__(self, other):
        return Coefficient.lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Coefficient({m: c * other for m, c in self._terms.items()})
        other = Coefficient.lift(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                key = tuple(sorted(m1 + m2))
                out[key] = out.get(key, 0) + c1 * c2
        return Coefficient(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def __pow__(self, k: int):
        out = Coefficient.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = Coefficient.lift(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Coefficient({format_coeff(self)!r})"

    def __str__(self):
        return format_coeff(self)


def coeff_add(a, b) -> Coefficient:
    return Coefficient.lift(a) + b


def coeff_mul(a, b) -> Coefficient:
    return Coefficient.lift(a) * Coefficient.lift(b)


def coeff_neg(a) -> Coefficient:
    return -Coefficient.lift(a)


def coeff_substitute(c: Coefficient, bindings: Mapping[str, Scalar]) -> Coefficient:
    out = Coefficient()
    for mono, k in c.terms.items():
        val = Fraction(k)
        rest = []
        for v in mono:
            if v in bindings:
                val *= Fraction(bindings[v])
            else:
                rest.append(v)
        out = out + Coefficient({tuple(rest): val})
    return out


def coeff_linear_parts(c: Coefficient) -> dict:
    """Monomial -> rational decomposition (the stored representation)."""
    return c.terms


# ----------------------------------------------------------------------------
# text form


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coeff(c: Coefficient) -> str:
    terms = c.terms
    if not terms:
        return "0"
    pieces = []
    for mono in sorted(terms, key=_monomial_key):
        q = terms[mono]
        mag = abs(q)
        if not mono:
            body = _fmt_rational(mag)
        elif mag == 1:
            body = "*".join(mono)
        else:
            body = _fmt_rational(mag) + "*" + "*".join(mono)
        pieces.append(("-" if q < 0 else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, body in pieces[1:]:
        out += s + body
    return out


_TERM_RE = re.compile(r"([+-]?)([^+-]+)")
_RAT_RE = re.compile(r"^\d+(?:/\d+)?$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def parse_coeff(text: str) -> Coefficient:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    pos = 0
    out = Coefficient()
    for m in _TERM_RE.finditer(s):
        if m.start() != pos:
            raise ValueError(f"malformed coefficient: {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        factor = Fraction(sign)
        mono = []
        for f in m.group(2).split("*"):
            if _RAT_RE.match(f):
                factor *= Fraction(f)
            elif _IDENT_RE.match(f):
                mono.append(f)
            else:
                raise ValueError(f"malformed coefficient factor {f!r} in {text!r}")
        out = out + Coefficient({tuple(mono): factor})
    if pos != len(s):
        raise ValueError(f"malformed coefficient: {text!r}")
    return out


ALPHA = Coefficient.var("alpha")
BETA = Coefficient.var("beta")
ONE = Coefficient.const(1)
ZERO = Coefficient()
