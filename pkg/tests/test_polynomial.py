from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigame import univariate as up
from semigame.algebraic import AlgebraicNumber, InvalidIsolation, sign_at
from semigame.polynomial import Polynomial

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=12)


def polys(n, max_deg=3):
    exps = st.tuples(*[st.integers(0, max_deg)] * n)
    return st.dictionaries(exps, rationals, max_size=5).map(lambda t: Polynomial(n, t))


def test_sparse_arithmetic():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    p = (x + y) ** 2 - 2 * x * y
    assert p == x**2 + y**2
    assert p.degrees() == (2, 2)
    assert p.evaluate([F(1, 2), F(1, 3)]) == F(13, 36)


def test_high_degree_is_cheap():
    x = Polynomial.variable(1, 0)
    p = x**64 - 1
    assert len(p.terms) == 2
    assert p.evaluate([F(1)]) == 0


@settings(max_examples=60, deadline=None)
@given(polys(2), polys(2), st.tuples(rationals, rationals))
def test_evaluation_is_a_ring_map(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)


@settings(max_examples=60, deadline=None)
@given(polys(2), st.tuples(rationals, rationals), rationals, st.fractions(1, 4, max_denominator=5))
def test_affine_substitute(p, pt, shift, factor):
    sub = p.affine_substitute([shift, shift], [factor, factor])
    assert sub.evaluate(pt) == p.evaluate([shift + factor * v for v in pt])


def test_text_round_trip_through_parser():
    from semigame.certificate import parse_certificate

    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = F(11, 8) * x**2 * y - 3 * y + F(-1, 7)
    text = f"vars: a b\npoly P: {p.to_text(('a', 'b'))}\nformula: P\nwitness: 0, 0\n"
    assert parse_certificate(text).poly("P") == p


def test_sturm_counts():
    assert up.count_roots_open((-1, 0, 2), 0, 1) == 1
    assert up.count_roots_open((-1, 0, 2), 0, F(1, 2)) == 0
    assert up.count_roots_open((3, -16, 16), 0, 1) == 2
    # roots on the boundary are excluded from the open count, included in the closed one
    assert up.count_roots_open((3, -16, 16), F(1, 4), F(3, 4)) == 0
    assert up.count_roots_closed((3, -16, 16), F(1, 4), F(3, 4)) == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(0, 1, max_denominator=9), min_size=1, max_size=4, unique=True))
def test_sturm_matches_constructed_roots(roots):
    p = (F(1),)
    for r in roots:
        p = up.mul(p, (-r, F(1)))
    assert up.count_roots_closed(p, 0, 1) == len(roots)


def test_gcd_and_squarefree():
    p = up.mul((-1, 1), (-1, 1))
    assert not up.is_squarefree(p)
    assert up.gcd(p, (-1, 1)) == (F(-1), F(1))
    assert up.is_squarefree((-1, 0, 2))


def test_algebraic_number():
    r = AlgebraicNumber.isolate((-1, 0, 2), F(1, 2), 1)
    assert r.compare(F(7, 10)) > 0
    assert r.compare(F(71, 100)) < 0
    fine = r.refine_to(F(1, 2**40))
    assert fine.hi - fine.lo <= F(1, 2**40)
    assert fine.lo ** 2 * 2 <= 1 <= fine.hi ** 2 * 2


def test_isolation_rejects_two_roots():
    with pytest.raises(InvalidIsolation):
        AlgebraicNumber.isolate((3, -16, 16), 0, 1)
    with pytest.raises(InvalidIsolation):
        AlgebraicNumber.isolate((-1, 0, 2), 0, F(1, 2))


def test_sign_at_algebraic_point_is_exact_on_boundary():
    r = AlgebraicNumber.isolate((-1, 0, 2), F(1, 2), 1)
    x = Polynomial.variable(1, 0)
    assert sign_at(2 * x**2 - 1, (r,)) == 0
    assert sign_at(x - F(7, 10), (r,)) == 1
    assert sign_at(4 * x**4 - 1, (r,)) == 0
