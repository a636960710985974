import json
import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from kgcalc.coeffs import ALPHA, BETA
from kgcalc.enumeration import basis
from kgcalc.linalg import RelationSystem, forced_zero, membership, verify_certificate
from kgcalc.series import GraphSeries

B22 = basis(2, 2)
vectors = st.lists(st.fractions(-4, 4, max_denominator=3), min_size=len(B22), max_size=len(B22))


def series_of(v):
    return GraphSeries([(g, q) for g, q in zip(B22, v) if q])


@settings(max_examples=60, deadline=None)
@given(st.lists(vectors, max_size=4), vectors)
def test_reduce_idempotent_and_order_free(rows, target):
    series = [(f"r{i}", series_of(v)) for i, v in enumerate(rows)]
    a = RelationSystem(B22, series)
    b = RelationSystem(B22, list(reversed(series)))
    x = series_of(target)
    nf = a.reduce(x)
    assert a.reduce(nf) == nf
    assert b.reduce(x) == nf
    assert a.rank == b.rank <= len(rows)
    assert a.contains(x - nf)


@settings(max_examples=40, deadline=None)
@given(st.lists(vectors, min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_member_certificate(rows, mult):
    series = [(f"r{i}", series_of(v)) for i, v in enumerate(rows)]
    sysm = RelationSystem(B22, series, track=True)
    x = GraphSeries()
    for (_, s), k in zip(series, mult):
        x = x + s * k
    cert = membership(x, sysm)
    assert cert.verdict == "member"
    assert verify_certificate(cert, x, sysm)


def test_non_member_functional_and_tampering():
    rng = random.Random(7)
    rows = [(f"r{i}", series_of([Fraction(rng.randint(-2, 2)) for _ in B22])) for i in range(3)]
    sysm = RelationSystem(B22, rows)
    free = [c for c in range(len(B22)) if c not in sysm.pivots]
    x = GraphSeries.from_graph(B22[free[0]])
    cert = membership(x, sysm)
    assert cert.verdict == "non-member"
    assert verify_certificate(cert, x, sysm)
    assert "subspace" in cert.note
    cond, phi = cert.functionals[0]
    g = next(iter(phi))
    phi[g] += 1
    assert not verify_certificate(cert, x, sysm)


def test_parametric_condition():
    rows = [("r", GraphSeries([(B22[0], 1), (B22[1], 1)]))]
    sysm = RelationSystem(B22, rows)
    x = GraphSeries([(B22[0], ALPHA), (B22[1], ALPHA), (B22[2], BETA)])
    cert = membership(x, sysm)
    assert cert.verdict == "conditional"
    assert forced_zero(cert, ["alpha", "beta"]) == ["beta"]
    assert verify_certificate(cert, x, sysm)
    doc = json.loads(cert.to_json())
    assert doc["conditions"] == ["beta = 0"] and doc["verdict"] == "conditional"
    assert "condition: beta = 0" in cert.to_text()


def test_digest_stable():
    rows = [("r", GraphSeries([(B22[0], 1)]))]
    assert RelationSystem(B22, rows).digest() == RelationSystem(B22, rows).digest()
