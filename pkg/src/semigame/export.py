"""Pure-strategy expansions of binary games: payoff tensors and Gambit NFG text."""

import itertools
import json
from fractions import Fraction

TENSOR_LIMIT = 16


class ExportError(ValueError):
    pass


def vertex_values(m):
    """Values of a multiaffine map at every 0/1 assignment of its own variables."""
    vars_ = sorted(m.variables())
    for bits in itertools.product((0, 1), repeat=len(vars_)):
        yield m.evaluate(dict(zip(vars_, bits)))


def pure_payoff(game, p, profile_bits):
    """Payoff of player p at a pure profile; ``profile_bits[j] == 1`` means j plays Top."""
    pl = game.players[p]
    values = dict(enumerate(profile_bits))
    side = pl.top if profile_bits[p] else pl.bottom
    return side.evaluate(values)


def profile_bits(t, n):
    # profile t: player j plays Top iff bit j of t is 0 (so t=0 is all-Top, player 0 fastest)
    return tuple(0 if (t >> j) & 1 else 1 for j in range(n))


def payoff_tensor(game):
    n = game.n_players
    if n > TENSOR_LIMIT:
        raise ExportError(f"tensor export materializes 2^N profiles; N={n} exceeds {TENSOR_LIMIT}")
    rows = [[Fraction(0)] * (1 << n) for _ in range(n)]
    for t in range(1 << n):
        bits = profile_bits(t, n)
        for p in range(n):
            rows[p][t] = pure_payoff(game, p, bits)
    return rows


def _q(x):
    return f"{x.numerator}/{x.denominator}"


def tensor_json(game):
    rows = payoff_tensor(game)
    data = {
        "players": [pl.id.name for pl in game.players],
        "profile_order": "index t: player j plays Top iff bit j of t is 0",
        "payoffs": [[_q(v) for v in row] for row in rows],
    }
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def nfg_text(game, title="binary game"):
    """Gambit NFG (payoff-list form). Strategy 1 is Top; player 1 varies fastest.

    Payoffs are written as decimals; the comment line lists the exact rationals.
    """
    rows = payoff_tensor(game)
    n = game.n_players
    names = " ".join(f'"{pl.id.name}"' for pl in game.players)
    dims = " ".join("2" for _ in range(n))
    exact = "; ".join(" ".join(_q(rows[p][t]) for p in range(n)) for t in range(1 << n))
    lines = [
        f'NFG 1 R "{title}" {{ {names} }} {{ {dims} }}',
        f'"exact payoffs per profile: {exact}"',
        "",
        " ".join(repr(float(rows[p][t])) for t in range(1 << n) for p in range(n)),
    ]
    return "\n".join(lines) + "\n"


def export_game(game, fmt):
    from .game import game_to_json

    fmt = fmt.lower()
    if fmt == "json":
        return game_to_json(game).encode()
    if fmt == "tensor":
        return tensor_json(game).encode()
    if fmt == "nfg":
        return nfg_text(game).encode()
    raise ExportError(f"unknown format {fmt!r}")
