import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certs import HALF, load
from semigame.compiler import compile_certificate, pin_gadget
from semigame.export import export_game, payoff_tensor, profile_bits, pure_payoff
from semigame.game import (
    GADGET,
    BinaryGame,
    GameError,
    MixedProfile,
    MultiaffineMap,
    Player,
    PlayerId,
    check_equilibrium,
    eval_map,
    game_from_json,
    game_to_json,
    max_gap_spread,
    payoff_gap,
)

V = MultiaffineMap.var
K = MultiaffineMap.constant


def test_eval_map_examples():
    assert eval_map(V(0), {0: F(1, 3)}) == F(1, 3)
    assert eval_map(2 * V(0) * V(1) - 1, {0: F(1, 2), 1: F(1, 2)}) == F(-1, 2)
    assert eval_map(K(0), {0: F(1, 5)}) == 0


def test_multiaffine_rejects_repeated_variable():
    with pytest.raises(ValueError):
        V(0) * V(0)


def test_gadget_gaps():
    g = pin_gadget(F(1, 2))
    assert payoff_gap(g, 0, {0: F(1, 2), 1: F(1, 2)}) == 0
    assert payoff_gap(g, 0, {0: F(1, 2), 1: F(0)}) == F(1, 2)
    same = Player(PlayerId(0, GADGET), V(1), V(1))
    game = BinaryGame((same, Player(PlayerId(1, GADGET), K(0), K(1))))
    assert payoff_gap(game, 0, {0: F(1, 3), 1: F(2, 3)}) == 0


def test_check_equilibrium_examples():
    g = pin_gadget(F(1, 2))
    assert check_equilibrium(g, MixedProfile({0: F(1, 2), 1: F(1, 2)})).passed
    v = check_equilibrium(g, MixedProfile({0: F(3, 4), 1: F(1)}))
    assert not v.passed and v.violator == 0
    assert v.gaps[0] == F(1, 2) - 1


def test_mixed_profile_range():
    with pytest.raises(ValueError):
        MixedProfile({0: F(3, 2)})


def test_invalid_games_rejected():
    own = Player(PlayerId(0, GADGET), V(0), K(0))
    with pytest.raises(GameError):
        BinaryGame((own,))
    unknown = Player(PlayerId(0, GADGET), V(3), K(0))
    with pytest.raises(GameError):
        BinaryGame((unknown,))


def test_gadget_bimatrix():
    g = pin_gadget(F(1, 2))
    # rows: X_alpha Top/Bottom; columns: X_beta Top/Bottom; bit 1 = Top
    table = [[tuple(pure_payoff(g, p, (a, b)) for p in (0, 1)) for b in (1, 0)] for a in (1, 0)]
    half = F(1, 2)
    assert table == [[(half, 1), (half, half)], [(1, 0), (0, half)]]


def test_json_round_trip():
    cert = load(HALF)
    game, _ = compile_certificate(cert)
    text = game_to_json(game)
    again = game_from_json(text)
    assert again == game
    assert game_to_json(again) == text


def test_tensor_matches_eval_map():
    game, _ = compile_certificate(load(HALF))
    rows = payoff_tensor(game)
    assert len(rows) == 5 and all(len(r) == 32 for r in rows)
    for t in range(32):
        bits = profile_bits(t, 5)
        sigma = dict(enumerate(map(F, bits)))
        for p, pl in enumerate(game.players):
            side = pl.top if bits[p] else pl.bottom
            assert rows[p][t] == eval_map(side, sigma)
    data = json.loads(export_game(game, "tensor"))
    assert data["payoffs"][3][0] == f"{rows[3][0].numerator}/{rows[3][0].denominator}"


def test_nfg_export_header():
    text = export_game(pin_gadget(F(1, 2)), "nfg").decode()
    assert text.startswith("NFG 1 R")
    assert "{ 2 2 }" in text
    # outcome order: player 0 varies fastest, Top first
    assert text.strip().splitlines()[-1].split() == ["0.5", "1.0", "1.0", "0.0", "0.5", "0.5", "0.0", "0.5"]


# --- properties -----------------------------------------------------------

probs = st.fractions(0, 1, max_denominator=12)
small_maps = st.dictionaries(
    st.frozensets(st.integers(1, 3), max_size=3), st.fractions(-3, 3, max_denominator=6), max_size=6
).map(MultiaffineMap)


@settings(max_examples=80, deadline=None)
@given(small_maps, st.lists(probs, min_size=4, max_size=4), probs, probs, st.integers(1, 3))
def test_maps_are_affine_in_each_coordinate(m, point, a, t, var):
    lo = dict(enumerate(point))
    hi = dict(lo)
    lo[var], hi[var] = F(0), F(1)
    mid = dict(lo)
    mid[var] = t
    assert eval_map(m, mid) == (1 - t) * eval_map(m, lo) + t * eval_map(m, hi)


def small_games():
    def game(tops, bottoms):
        players = []
        for p in range(3):
            others = lambda m: MultiaffineMap({k - {p}: c for k, c in m.terms.items()})  # noqa: E731
            players.append(Player(PlayerId(p, GADGET), others(tops[p]), others(bottoms[p])))
        return BinaryGame(tuple(players))

    maps = st.dictionaries(
        st.frozensets(st.integers(0, 2), max_size=2), st.fractions(-2, 2, max_denominator=4), max_size=4
    ).map(MultiaffineMap)
    return st.builds(game, st.lists(maps, min_size=3, max_size=3), st.lists(maps, min_size=3, max_size=3))


@settings(max_examples=80, deadline=None)
@given(small_games(), st.lists(probs, min_size=3, max_size=3), st.fractions(0, 2, max_denominator=8),
       st.fractions(0, 2, max_denominator=8))
def test_epsilon_monotone_and_vacuous(game, sigma, e1, e2):
    sigma = MixedProfile(sigma)
    lo, hi = min(e1, e2), max(e1, e2)
    if check_equilibrium(game, sigma, lo).passed:
        assert check_equilibrium(game, sigma, hi).passed
    assert check_equilibrium(game, sigma, 2 * max_gap_spread(game)).passed
