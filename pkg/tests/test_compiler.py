import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certs import DISC, HALF, load, suite
from semigame.certificate import Certificate, Leaf, Node
from semigame.compiler import (
    CompileError,
    build_power_ladder,
    compile_certificate,
    index_from_game,
    ladder_q,
    multiaffine_lift,
    player_count,
)
from semigame.game import check_equilibrium, eval_map
from semigame.polynomial import Polynomial


@pytest.mark.parametrize("d,q", [(0, 1), (1, 1), (2, 2), (3, 2), (4, 3), (7, 3), (8, 4)])
def test_ladder_q(d, q):
    assert ladder_q(d) == q
    assert d < 2**q


def test_lift_examples():
    x = Polynomial.variable(1, 0)
    assert multiaffine_lift(x**3, [(10, 11)]).terms == {frozenset({10, 11}): 1}
    assert multiaffine_lift(2 * x - 1, [(10,)]).terms == {frozenset({10}): 2, frozenset(): -1}
    with pytest.raises(CompileError):
        multiaffine_lift(x**2, [(10,)])


def test_ladder_layout():
    players = build_power_ladder(1, 2, basic=0, first_index=1)
    assert [p.id.name for p in players] == ["X1_0", "Y1_0", "X1_1", "Y1_1"]
    # X_i1 is pinned to x_i * x_i0
    assert players[2].top.terms == {frozenset({0, 1}): 1}


def test_half_interval_compiles_to_five_players():
    game, index = compile_certificate(load(HALF))
    assert game.names() == ["X1", "X1_0", "Y1_0", "S1", "U"]
    count = player_count(load(HALF))
    assert (count.exact, count.closed_form_bound, count.refined_bound) == (5, 5.0, 5.0)


def test_disc_compiles_to_twelve_players():
    game, _ = compile_certificate(load(DISC))
    assert game.n_players == 12 == player_count(load(DISC)).exact


def one_var_dnf():
    x = Polynomial.variable(1, 0)
    polys = (("a", x**3 - 1), ("b", x), ("c", x - 1), ("d", x**2))
    f = Node("OR", (Node("AND", (Leaf("a", 0), Leaf("b", 1))), Node("AND", (Leaf("c", 2), Leaf("d", 3)))))
    return Certificate(("x",), polys, f, (F(0),))


def test_dnf_count_against_closed_form():
    cert = one_var_dnf()
    count = player_count(cert)
    assert count.exact == 10 == compile_certificate(cert)[0].n_players
    assert count.closed_form_bound == pytest.approx(1 + 4 + 3 + 2 * math.log2(3))
    assert count.exact <= count.closed_form_bound


def test_count_with_degree_four():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    polys = (("a", x**4 + y**4 - 1), ("b", x**4 * y**4))
    cert = Certificate(("x", "y"), polys, Node("AND", (Leaf("a", 0), Leaf("b", 1))), (F(0), F(0)))
    count = player_count(cert)
    assert count.exact == 17 == compile_certificate(cert)[0].n_players
    assert count.closed_form_bound == 17.0


def test_refined_bound_uses_per_variable_degrees():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    cert = Certificate(("x", "y"), (("a", x + y**4 - 1),), Leaf("a", 0), (F(0), F(0)))
    count = player_count(cert)
    assert count.exact == 2 + 2 * (1 + 3) + 1 + 1
    assert count.refined_bound == pytest.approx(1 + 1 + 6 + 2 * math.log2(4))
    assert count.refined_bound <= count.closed_form_bound


def test_compile_rejects_witness_outside_set():
    half = load(HALF)
    bad = Certificate(half.var_names, half.polys, half.formula, (F(1),))
    with pytest.raises(CompileError):
        compile_certificate(bad)


def test_compilation_is_deterministic_and_reindexable():
    for cert in suite().values():
        g1, i1 = compile_certificate(cert)
        g2, _ = compile_certificate(cert)
        assert g1 == g2
        assert g1.certificate_digest == cert.digest()
        again = index_from_game(g1)
        assert (again.basic, again.ladder, again.sign, again.detector, again.witness) == (
            i1.basic, i1.ladder, i1.sign, i1.detector, i1.witness
        )


def test_payoffs_are_multiaffine_without_self_reference():
    for cert in suite().values():
        game, _ = compile_certificate(cert)
        for pl in game.players:
            assert pl.id.index not in pl.top.variables() | pl.bottom.variables()


def test_canonical_at_witness_passes_for_suite():
    from semigame.verifier import canonical_profile

    for cert in suite().values():
        game, index = compile_certificate(cert)
        sigma = canonical_profile(cert, game, index, cert.witness)
        assert check_equilibrium(game, sigma).passed


# --- lift identity --------------------------------------------------------

coef = st.fractions(-5, 5, max_denominator=9)


def poly_strategy():
    def build(n, terms):
        return Polynomial(n, {e[:n]: c for e, c in terms.items()})

    exps = st.tuples(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
    return st.builds(build, st.integers(1, 3), st.dictionaries(exps, coef, min_size=1, max_size=6))


@settings(max_examples=60, deadline=None)
@given(poly_strategy(), st.lists(st.fractions(0, 1, max_denominator=20), min_size=3, max_size=3))
def test_lift_identity(p, point):
    n = p.n_vars
    q = [ladder_q(d) for d in p.degrees()]
    ladders, nxt = [], 0
    for qi in q:
        ladders.append(tuple(range(nxt, nxt + qi)))
        nxt += qi
    lifted = multiaffine_lift(p, ladders)
    sigma = {ladders[i][k]: point[i] ** (2**k) for i in range(n) for k in range(q[i])}
    assert eval_map(lifted, sigma) == p.evaluate(point[:n])
