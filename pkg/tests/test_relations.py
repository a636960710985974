from fractions import Fraction

import pytest

from kgcalc.graphs import LeibnizGraph, make_graph
from kgcalc.linalg import BigradeMismatch, verify_certificate
from kgcalc.oracle import constant_symplectic, linear_so3, operator_vanishes, perturbed_so3
from kgcalc.relations import (
    generate_coboundaries,
    generate_jacobi_relations,
    jacobiator_expand,
    membership,
    reduce_mod,
)
from kgcalc.series import GraphSeries, gerstenhaber_bracket, hkr_skew

A1 = GraphSeries.from_graph(make_graph(2, [(0, 1)]), Fraction(1, 2))


@pytest.fixture(scope="module")
def j43():
    return generate_jacobi_relations(4, 3)


@pytest.fixture(scope="module")
def c43():
    return generate_coboundaries(4, 3)


def test_bare_jacobiator():
    s = jacobiator_expand(LeibnizGraph(3, (0, 1, 2), ()))
    assert len(s) == 3
    j = generate_jacobi_relations(2, 3)
    assert (j.n_rows, j.rank) == (1, 1)
    assert j.contains(s)


def test_bare_jacobiator_is_the_jacobi_expression():
    # pi^{al} d_l pi^{bc} summed cyclically: vanishes exactly for Poisson pi
    s = jacobiator_expand(LeibnizGraph(3, (0, 1, 2), ()))
    assert operator_vanishes(s, linear_so3())
    assert not operator_vanishes(s, perturbed_so3())


def test_a1_squared_needs_coboundaries():
    x = gerstenhaber_bracket(A1, A1)
    j = generate_jacobi_relations(2, 3)
    assert membership(x, j).verdict == "non-member"
    both = j.union(generate_coboundaries(2, 3, track=True), name="both")
    assert membership(x, both).verdict == "member"
    # independent reason it is not a Jacobi consequence alone: it acts nontrivially for constant pi
    assert not operator_vanishes(x, constant_symplectic())


def test_bigrade_mismatch():
    j = generate_jacobi_relations(2, 3)
    with pytest.raises(BigradeMismatch):
        reduce_mod(A1, j)


def test_jacobi_43(j43):
    assert (j43.n_rows, j43.rank, len(j43.basis)) == (490, 478, 2250)


def test_coboundary_43(c43, j43):
    assert (c43.n_rows, c43.rank) == (393, 375)
    assert j43.union(c43).rank == 793
    for i in range(0, c43.n_rows, 7):
        assert hkr_skew(c43.row_series(i)).is_zero()


def test_row_combination_verifies(j43):
    x = j43.row_series(3) * 2 - j43.row_series(100)
    tracked = generate_jacobi_relations(4, 3, track=True)
    cert = membership(x, tracked)
    assert cert.verdict == "member" and verify_certificate(cert, x, tracked)
