"""Independent re-checker for refutation traces.

Works from the game's payoff maps and the trace alone: pin pairs are recognized
structurally, sign and detector steps are re-evaluated, and root steps rebuild
the univariate polynomial hidden behind a power ladder.
"""

from fractions import Fraction

from . import univariate as up
from .algebraic import AlgebraicNumber
from .game import MultiaffineMap


class ReplayError(AssertionError):
    pass


def _fail(msg):
    raise ReplayError(msg)


def pin_structure(game, a):
    """If player a is pinned by a partner b, return (b, target map); else None.

    Accepted shape: gap_a = ca*(T - x_b) and gap_b = cb*(x_a - T) with ca, cb > 0
    and T free of a and b.
    """
    pa = game.players[a]
    bottom_vars = pa.bottom.variables()
    if len(pa.bottom.terms) != 1 or len(bottom_vars) != 1:
        return None
    (b,) = bottom_vars
    ca = pa.bottom.coefficient([b])
    if ca <= 0:
        return None
    target = pa.top * (1 / ca)
    if {a, b} & target.variables():
        return None
    gap_b = game.players[b].gap_map()
    cb = gap_b.coefficient([a])
    if cb <= 0:
        return None
    if gap_b != (MultiaffineMap.var(a) - target) * cb:
        return None
    return b, target


def _known(values, players):
    missing = [p for p in players if p not in values]
    if missing:
        _fail(f"premises {missing} are not yet forced")


def _replay_pin(game, step, values):
    ps = pin_structure(game, step.player)
    if ps is None:
        _fail(f"player {step.player} is not part of a pin pair")
    _, target = ps
    _known(values, target.variables())
    v = target.evaluate(values)
    if not 0 <= v <= 1:
        _fail(f"pin target {v} outside [0,1]")
    if v != step.value:
        _fail(f"pin of player {step.player} gives {v}, trace says {step.value}")
    return v


def _replay_sign(game, step, values):
    gap = game.players[step.player].gap_map()
    _known(values, gap.variables())
    g = gap.evaluate(values)
    want = 1 if step.rule == "SIGN-POS" else 0
    if (want == 1 and not g > 0) or (want == 0 and not g < 0):
        _fail(f"sign player {step.player}: gap {g} does not force {want}")
    if step.value != want:
        _fail("sign step records the wrong value")
    return Fraction(want)


def _replay_detector(game, step, values):
    gap = game.players[step.player].gap_map()
    rest = gap.partial({v: values[v] for v in gap.variables() if v in values})
    for k, c in rest.terms.items():
        if k and c < 0:
            _fail("detector payoff not monotone in the unforced players")
    low = rest.coefficient(())
    if not low > 0:
        _fail(f"detector minimum {low} is not positive")
    if step.value != 1:
        _fail("detector step must force Top")
    return Fraction(1)


def _ladder_exponents(game, root_player, variables):
    """Exponent e with x_var = x_root^e, following pin pairs back to the root player."""
    memo = {root_player: 1}

    def exp_of(v, depth=0):
        if v in memo:
            return memo[v]
        if depth > len(game.players):
            _fail("cyclic pin chain")
        ps = pin_structure(game, v)
        if ps is None:
            _fail(f"player {v} is not pinned to a power of the root player")
        _, target = ps
        if len(target.terms) != 1:
            _fail("ladder target is not a single monomial")
        ((vars_, coef),) = target.terms.items()
        if coef != 1:
            _fail("ladder target has a non-unit coefficient")
        memo[v] = sum(exp_of(w, depth + 1) for w in vars_)
        return memo[v]

    return {v: exp_of(v) for v in variables}


def _replay_root(game, step, values):
    if not isinstance(step.value, AlgebraicNumber):
        _fail("root step must carry an algebraic value")
    gap = game.players[step.player].gap_map()
    u_vars = [v for v in gap.variables() if values.get(v) == 1]
    if not u_vars:
        _fail("root step needs the detector forced to Top")
    g = gap.partial({v: Fraction(1) for v in u_vars})
    exps = _ladder_exponents(game, step.player, g.variables())
    coeffs = {}
    for vars_, c in g.terms.items():
        e = sum(exps[v] for v in vars_)
        coeffs[e] = coeffs.get(e, 0) + c
    Q = up.trim([coeffs.get(k, 0) for k in range(max(coeffs, default=0) + 1)])
    if not Q:
        _fail("root polynomial vanishes identically")
    if not (up.evaluate(Q, 0) >= 0 >= up.evaluate(Q, 1)):
        _fail("root polynomial does not satisfy Q(0) >= 0 >= Q(1)")
    if up.count_roots_closed(Q, 0, 1) != 1:
        _fail("root polynomial must have exactly one root in [0,1]")
    val = step.value
    if up.gcd(Q, val.poly) != up.monic(Q) and up.monic(val.poly) != up.monic(Q):
        _fail("recorded polynomial differs from the payoff's polynomial")
    if not (0 <= val.lo <= val.hi <= 1) or up.count_roots_closed(Q, val.lo, val.hi) != 1:
        _fail("recorded interval does not isolate the root")
    return AlgebraicNumber(Q, val.lo, val.hi)


RULES = {
    "PIN": _replay_pin,
    "SIGN-POS": _replay_sign,
    "SIGN-NEG": _replay_sign,
    "DETECTOR": _replay_detector,
    "ROOT": _replay_root,
}


def _replay_contradiction(game, c, values):
    p = c.player
    if values.get(p) != c.assumed:
        _fail("contradiction must involve an assumed projection value")
    ps = pin_structure(game, p)
    if isinstance(c.forced, AlgebraicNumber):
        if ps is None:
            _fail("algebraic anchor needs a pin pair")
        _, target = ps
        alg = [v for v in target.variables() if isinstance(values.get(v), AlgebraicNumber)]
        rational = {v: values[v] for v in target.variables() if v in values and v not in alg}
        if len(alg) != 1 or len(rational) + 1 != len(target.variables()):
            _fail("anchor target must depend on one algebraic value and forced rationals")
        (a,) = alg
        t = target.partial(rational)
        shift, factor = t.coefficient(()), t.coefficient([a])
        image = values[a].affine_image(shift, factor)
        if image.compare(0) < 0 or image.compare(1) > 0:
            _fail("anchor pin target outside [0,1]")
        if image.equals_rational(c.assumed):
            _fail("anchor value equals the assumed coordinate: no contradiction")
        image.separate_from(c.assumed)
        return
    gap = game.players[p].gap_map()
    others = gap.variables()
    _known(values, others)
    g = gap.evaluate(values)
    if g == 0:
        _fail("player is indifferent: no contradiction")
    forced = Fraction(1 if g > 0 else 0)
    if forced != c.forced:
        _fail("recorded best response is wrong")
    if forced == c.assumed:
        _fail("best response agrees with the assumed value")


def replay_trace(game, trace):
    """Re-derive every step of ``trace`` and its final contradiction; raise ReplayError on mismatch."""
    values = dict(trace.assumed)
    if not trace.refuted:
        _fail("nothing to replay: point was not refuted")
    for step in trace.steps:
        rule = RULES.get(step.rule)
        if rule is None:
            _fail(f"unknown rule {step.rule}")
        if step.player in values:
            _fail(f"player {step.player} forced twice")
        values[step.player] = rule(game, step, values)
    _replay_contradiction(game, trace.contradiction, values)
    return values
