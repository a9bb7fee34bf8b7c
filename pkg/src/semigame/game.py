"""Binary-game IR: multiaffine Top/Bottom payoffs, exact profiles, equilibrium checks."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

# role tags
BASIC = "BASIC"  # X_i
POWER = "POWER"  # X_ik
MIRROR = "MIRROR"  # Y_ik
SIGN = "SIGN"  # S_c
DETECTOR = "DETECTOR"  # U
PAYOFF = "PAYOFF"  # Y_i0 in payoff mode
ROOT = "ROOT"  # V_i (integer mode)
ROOT_POWER = "ROOT_POWER"  # V_ik
ROOT_MIRROR = "ROOT_MIRROR"  # W_ik
ANCHOR_MIRROR = "ANCHOR_MIRROR"  # Y_i (integer mode)
PIN_A = "PIN_A"  # two-player pin gadget, the pinned player
PIN_B = "PIN_B"  # its partner
GADGET = "GADGET"  # other hand-built test players

_NAMES = {
    BASIC: "X{}",
    POWER: "X{}_{}",
    MIRROR: "Y{}_{}",
    SIGN: "S{}",
    DETECTOR: "U",
    PAYOFF: "Y{}_{}",
    ROOT: "V{}",
    ROOT_POWER: "V{}_{}",
    ROOT_MIRROR: "W{}_{}",
    ANCHOR_MIRROR: "Y{}",
    PIN_A: "Xa",
    PIN_B: "Xb",
    GADGET: "G{}",
}


@dataclass(frozen=True)
class PlayerId:
    index: int
    role: str
    role_indices: tuple = ()

    @property
    def name(self):
        return _NAMES[self.role].format(*(self.role_indices or (self.index,)))


class MultiaffineMap:
    """Sum of rational coefficients times products of distinct player variables."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for k, v in (terms or {}).items():
            k = frozenset(k)
            v = Fraction(v)
            if v:
                clean[k] = clean.get(k, 0) + v
                if not clean[k]:
                    del clean[k]
        self.terms = clean

    @classmethod
    def constant(cls, c):
        return cls({frozenset(): c})

    @classmethod
    def var(cls, i):
        return cls({frozenset([i]): 1})

    def variables(self):
        out = set()
        for k in self.terms:
            out |= k
        return out

    def __add__(self, other):
        if not isinstance(other, MultiaffineMap):
            other = MultiaffineMap.constant(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return MultiaffineMap(terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiaffineMap({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiaffineMap):
            other = MultiaffineMap.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return MultiaffineMap.constant(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiaffineMap):
            c = Fraction(other)
            return MultiaffineMap({k: v * c for k, v in self.terms.items()})
        terms = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                if k1 & k2:
                    raise ValueError("product would repeat a variable (not multiaffine)")
                k = k1 | k2
                terms[k] = terms.get(k, 0) + v1 * v2
        return MultiaffineMap(terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, MultiaffineMap) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coefficient(self, variables=()):
        return self.terms.get(frozenset(variables), Fraction(0))

    def evaluate(self, values):
        """Evaluate with ``values[i]`` for each variable; values may be any ring elements."""
        total = Fraction(0)
        for k, coef in self.terms.items():
            term = coef
            for i in k:
                term = values[i] * term
            total = term + total
        return total

    def partial(self, values):
        """Substitute the variables present in ``values``; the rest stay symbolic."""
        terms = {}
        for k, coef in self.terms.items():
            c = coef
            rest = []
            for i in k:
                if i in values:
                    c *= values[i]
                else:
                    rest.append(i)
            key = frozenset(rest)
            terms[key] = terms.get(key, 0) + c
        return MultiaffineMap(terms)

    def sorted_terms(self):
        return sorted(((tuple(sorted(k)), v) for k, v in self.terms.items()), key=lambda t: (len(t[0]), t[0]))

    def text(self, names=None):
        if not self.terms:
            return "0"
        parts = []
        for vars_, coef in self.sorted_terms():
            factors = [names[i] if names else f"v{i}" for i in vars_]
            if factors and abs(coef) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(coef))] + factors)
            parts.append(("-" if coef < 0 else "+", body))
        s, body = parts[0]
        out = ("-" if s == "-" else "") + body
        for s, body in parts[1:]:
            out += f" {s} {body}"
        return out

    def __repr__(self):
        return f"MultiaffineMap({self.text()!r})"


@dataclass(frozen=True)
class Player:
    id: PlayerId
    top: MultiaffineMap
    bottom: MultiaffineMap

    def gap_map(self):
        return self.top - self.bottom


class GameError(ValueError):
    pass


@dataclass
class BinaryGame:
    players: tuple
    n_projection: int = 0
    mode: str = "equilibrium"
    certificate_digest: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.players = tuple(self.players)
        n = len(self.players)
        for pos, pl in enumerate(self.players):
            if pl.id.index != pos:
                raise GameError(f"player indices must be dense: position {pos} holds index {pl.id.index}")
            for side in (pl.top, pl.bottom):
                bad = [v for v in side.variables() if not 0 <= v < n]
                if bad:
                    raise GameError(f"{pl.id.name} references unknown players {bad}")
                if pos in side.variables():
                    raise GameError(f"{pl.id.name}'s payoff depends on its own strategy")

    @property
    def n_players(self):
        return len(self.players)

    def player(self, p):
        if isinstance(p, PlayerId):
            p = p.index
        if not 0 <= p < len(self.players):
            raise GameError(f"unknown player {p}")
        return self.players[p]

    def names(self):
        return [pl.id.name for pl in self.players]

    def find(self, role, *role_indices):
        for pl in self.players:
            if pl.id.role == role and pl.id.role_indices == tuple(role_indices):
                return pl.id.index
        raise KeyError((role, role_indices))


class MixedProfile(dict):
    """Probability of Top for every player, as exact rationals in [0, 1]."""

    def __init__(self, probs):
        if not isinstance(probs, dict):
            probs = dict(enumerate(probs))
        clean = {}
        for k, v in probs.items():
            v = Fraction(v)
            if not 0 <= v <= 1:
                raise ValueError(f"probability {v} of player {k} outside [0,1]")
            clean[k] = v
        super().__init__(clean)

    def require_complete(self, game):
        missing = [pl.id.name for pl in game.players if pl.id.index not in self]
        if missing:
            raise ValueError(f"profile leaves players unassigned: {missing}")


def eval_map(m, sigma):
    missing = m.variables() - set(sigma)
    if missing:
        raise KeyError(f"unassigned variables {sorted(missing)}")
    return m.evaluate(sigma)


def payoff_gap(game, p, sigma):
    pl = game.player(p)
    return eval_map(pl.top, sigma) - eval_map(pl.bottom, sigma)


def expected_payoff(game, p, sigma):
    pl = game.player(p)
    s = sigma[pl.id.index]
    return s * eval_map(pl.top, sigma) + (1 - s) * eval_map(pl.bottom, sigma)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    gaps: tuple
    violator: Optional[int] = None
    reason: str = ""

    def to_json(self, game=None):
        out = {"verdict": "PASS" if self.passed else "FAIL", "gaps": [_q(g) for g in self.gaps]}
        if self.violator is not None:
            out["violator"] = game.players[self.violator].id.name if game else self.violator
            out["reason"] = self.reason
        return out


def check_equilibrium(game, sigma, eps=0):
    """Best-response test with one-sided slack ``eps`` (exact)."""
    eps = Fraction(eps)
    if not isinstance(sigma, MixedProfile):
        sigma = MixedProfile(sigma)
    sigma.require_complete(game)
    gaps = []
    violator = None
    reason = ""
    for pl in game.players:
        i = pl.id.index
        g = payoff_gap(game, i, sigma)
        gaps.append(g)
        if violator is None:
            if sigma[i] > 0 and g < -eps:
                violator, reason = i, f"plays Top with probability {sigma[i]} but Bottom is better by {-g}"
            elif sigma[i] < 1 and g > eps:
                violator, reason = i, f"plays Bottom with probability {1 - sigma[i]} but Top is better by {g}"
    return Verdict(violator is None, tuple(gaps), violator, reason)


# --- JSON -----------------------------------------------------------------


def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(s):
    if isinstance(s, int):
        return Fraction(s)
    num, _, den = str(s).partition("/")
    return Fraction(int(num), int(den) if den else 1)


def _map_json(m):
    return [{"vars": list(vars_), "coef": _q(c)} for vars_, c in m.sorted_terms()]


def _map_from_json(items):
    return MultiaffineMap({frozenset(t["vars"]): parse_q(t["coef"]) for t in items})


def game_to_dict(game):
    out = {
        "n_projection": game.n_projection,
        "mode": game.mode,
        "certificate_digest": game.certificate_digest,
        "players": [
            {
                "index": pl.id.index,
                "role": pl.id.role,
                "role_indices": list(pl.id.role_indices),
                "top": _map_json(pl.top),
                "bottom": _map_json(pl.bottom),
            }
            for pl in game.players
        ],
    }
    if game.metadata:
        out["metadata"] = game.metadata
    return out


def game_to_json(game):
    return json.dumps(game_to_dict(game), sort_keys=True, indent=1) + "\n"


def game_from_dict(data):
    players = [
        Player(
            PlayerId(p["index"], p["role"], tuple(p["role_indices"])),
            _map_from_json(p["top"]),
            _map_from_json(p["bottom"]),
        )
        for p in data["players"]
    ]
    return BinaryGame(
        tuple(players),
        n_projection=data["n_projection"],
        mode=data["mode"],
        certificate_digest=data["certificate_digest"],
        metadata=data.get("metadata", {}),
    )


def game_from_json(text):
    return game_from_dict(json.loads(text))


def max_gap_spread(game):
    """max |Top - Bottom| over pure profiles; multiaffine, so vertices suffice."""
    from .export import vertex_values

    best = Fraction(0)
    for pl in game.players:
        for v in vertex_values(pl.gap_map()):
            best = max(best, abs(v))
    return best
