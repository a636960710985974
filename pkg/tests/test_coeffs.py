from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgcalc.coeffs import (
    ALPHA,
    BETA,
    Coefficient,
    coeff_linear_parts,
    coeff_substitute,
    format_coeff,
    parse_coeff,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
monomials = st.lists(st.sampled_from(["alpha", "beta", "c1"]), max_size=2).map(lambda v: tuple(sorted(v)))
coefficients = st.dictionaries(monomials, rationals, max_size=4).map(Coefficient)


@given(coefficients, coefficients, coefficients)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Coefficient()
    assert a * Coefficient.const(1) == a


@given(coefficients)
def test_format_parse_roundtrip(a):
    assert parse_coeff(format_coeff(a)) == a


def test_format_examples():
    assert format_coeff(ALPHA) == "alpha"
    assert format_coeff(Coefficient.const(Fraction(-1, 2))) == "-1/2"
    assert format_coeff(ALPHA * 2 + BETA * 2) == "2*alpha+2*beta"
    assert format_coeff(Coefficient()) == "0"


@pytest.mark.parametrize("bad", ["", "2**alpha", "alpha+", "1/0x", "3 beta"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_coeff(bad)


def test_substitute_and_linear_parts():
    c = ALPHA * 3 + BETA * Fraction(1, 2) + Coefficient.const(1)
    assert coeff_substitute(c, {"alpha": Fraction(1, 3)}) == BETA * Fraction(1, 2) + Coefficient.const(2)
    parts = coeff_linear_parts(c)
    assert parts == {(): 1, ("alpha",): 3, ("beta",): Fraction(1, 2)}


def test_degree_and_variables():
    c = ALPHA * BETA + ALPHA
    assert c.degree() == 2 and c.variables() == {"alpha", "beta"}
    assert (ALPHA ** 2).degree() == 2
