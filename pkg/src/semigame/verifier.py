"""Desk-scale verification of compiled games.

For a point x in E the canonical profile is an exact equilibrium; for x outside
E a forward forcing pass derives a contradiction and records it as a trace that
``replay.replay_trace`` can re-check from the game alone.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebraic import AlgebraicNumber, sign_at
from .certificate import membership, unit_certificate
from .game import MixedProfile, check_equilibrium, expected_payoff, payoff_gap
from .polynomial import Polynomial

PIN = "PIN"
SIGN_POS = "SIGN-POS"
SIGN_NEG = "SIGN-NEG"
DETECTOR_RULE = "DETECTOR"
ANCHOR = "ANCHOR"
ROOT_RULE = "ROOT"

DEFAULT_WIDTH = Fraction(1, 2**40)
SCAN_LIMIT = 6


def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _value_json(v):
    if isinstance(v, AlgebraicNumber):
        return v.to_json()
    return _q(v)


@dataclass(frozen=True)
class ForcedValue:
    player: int
    value: object  # Fraction or AlgebraicNumber
    rule: str
    premises: tuple = ()

    def to_json(self, game):
        names = game.names()
        return {
            "player": names[self.player],
            "value": _value_json(self.value),
            "rule": self.rule,
            "premises": [names[p] for p in self.premises],
        }


@dataclass(frozen=True)
class Contradiction:
    player: int
    forced: object  # value the player is forced to take
    assumed: Fraction  # value fixed by the hypothesis
    constraint: str
    premises: tuple = ()

    def to_json(self, game):
        names = game.names()
        return {
            "player": names[self.player],
            "forced": _value_json(self.forced),
            "assumed": _q(self.assumed),
            "constraint": self.constraint,
            "premises": [names[p] for p in self.premises],
        }


@dataclass(frozen=True)
class RefutationTrace:
    assumed: tuple  # ((player, value), ...) for the projection players
    steps: tuple
    contradiction: Contradiction
    refuted = True

    def __len__(self):
        return len(self.steps) + 1

    def to_json(self, game):
        names = game.names()
        return {
            "verdict": "REFUTED",
            "assumed": {names[p]: _q(v) for p, v in self.assumed},
            "steps": [s.to_json(game) for s in self.steps],
            "contradiction": self.contradiction.to_json(game),
        }


@dataclass(frozen=True)
class NotRefuted:
    assumed: tuple
    steps: tuple
    reason: str
    refuted = False

    def to_json(self, game):
        names = game.names()
        return {
            "verdict": "NOT_REFUTED",
            "assumed": {names[p]: _q(v) for p, v in self.assumed},
            "steps": [s.to_json(game) for s in self.steps],
            "reason": self.reason,
        }


# --- canonical equilibria -------------------------------------------------


def _canonical_values(unit, index, x, leaf_sign):
    vals = {}
    for i in range(index.n):
        vals[index.basic[i]] = x[i]
        p = x[i]
        for xk, yk in index.ladder[i]:
            vals[xk] = vals[yk] = p
            p = p * p
    for c, s in enumerate(index.sign):
        sg = leaf_sign(c)
        if sg is None:
            raise ValueError(f"sign of leaf {c + 1} undecided at this point")
        vals[s] = Fraction(0 if sg <= 0 else 1)
    vals[index.detector] = Fraction(0)
    ii = index.integer
    if ii is not None:
        for i in range(index.n):
            vals[ii.root[i]] = x[i]
            vals[ii.anchor_mirror[i]] = x[i]
            p = x[i]
            for vk, wk in ii.root_ladder[i]:
                vals[vk] = vals[wk] = p
                p = p * p
    return vals


def canonical_profile(cert, game, index, x):
    """Profile extending x: ladders at exact powers, sign players by the sign of P_c, U at Bottom."""
    if len(x) != index.n:
        raise ValueError(f"arity mismatch: expected {index.n} coordinates, got {len(x)}")
    x = [Fraction(v) for v in x]
    if any(not 0 <= v <= 1 for v in x):
        raise ValueError("point outside [0,1]^n")
    unit = unit_certificate(cert)
    polys = unit.leaf_polys()

    def leaf_sign(c):
        v = polys[c].evaluate(x)
        return (v > 0) - (v < 0)

    vals = _canonical_values(unit, index, x, leaf_sign)
    return MixedProfile(vals)


@dataclass(frozen=True)
class CertifiedCheck:
    status: str  # PASS, FAIL, UNDECIDED
    gap_signs: tuple  # per player: -1, 0, 1 or None
    exact_zero: tuple  # per player: gap certified identically 0 modulo the witness polynomials
    width: Fraction  # isolating-interval width used for interval certification
    violator: Optional[int] = None

    def to_json(self, game):
        out = {
            "verdict": self.status,
            "gap_signs": list(self.gap_signs),
            "width": _q(self.width),
        }
        if self.violator is not None:
            out["violator"] = game.names()[self.violator]
        return out


def certify_canonical(cert, game, index, point=None, width=DEFAULT_WIDTH):
    """Check the canonical profile at a point with algebraic coordinates.

    Profile values are polynomials in the coordinates; every gap is reduced
    modulo the coordinates' defining polynomials (an exact zero test) and
    otherwise sign-certified after refining each isolating interval to ``width``.
    """
    unit = unit_certificate(cert)
    if point is None:
        point = index.witness
    point = tuple(p if isinstance(p, AlgebraicNumber) else AlgebraicNumber.rational(p) for p in point)
    point = tuple(p if p.lo == p.hi else p.refine_to(width) for p in point)
    n = index.n
    z = [Polynomial.variable(n, i) for i in range(n)]
    polys = unit.leaf_polys()
    leaf_sign = lambda c: sign_at(polys[c], point)  # noqa: E731
    vals = _canonical_values(unit, index, z, leaf_sign)
    vals = {k: (v if isinstance(v, Polynomial) else Polynomial.constant(n, v)) for k, v in vals.items()}

    signs, zeros = [], []
    status, violator = "PASS", None
    for pl in game.players:
        i = pl.id.index
        gap = pl.top.evaluate(vals) - pl.bottom.evaluate(vals)
        if not isinstance(gap, Polynomial):
            gap = Polynomial.constant(n, gap)
        reduced = gap
        for j, a in enumerate(point):
            if a.lo != a.hi and reduced.degree_in(j) >= len(a.poly) - 1:
                reduced = reduced.reduce_mod(j, a.poly)
        zeros.append(reduced.is_zero())
        g = 0 if reduced.is_zero() else sign_at(gap, point)
        signs.append(g)
        s_pos = sign_at(vals[i], point)
        s_lt1 = sign_at(1 - vals[i], point)
        if g is None or s_pos is None or s_lt1 is None:
            if status == "PASS":
                status, violator = "UNDECIDED", i
            continue
        bad = (s_pos > 0 and g < 0) or (s_lt1 > 0 and g > 0)
        if bad and status != "FAIL":
            status, violator = "FAIL", i
    used = max((p.hi - p.lo for p in point), default=Fraction(0))
    return CertifiedCheck(status, tuple(signs), tuple(zeros), used, violator)


# --- refutation -----------------------------------------------------------


def _selector_minimum(game, u, values):
    """Min of U's gap over unforced sign players (all coefficients are >= 0, so at 0)."""
    m = game.players[u].gap_map().partial(values)
    free = m.variables()
    for k, c in m.terms.items():
        if k and c < 0:
            raise ValueError("detector payoff is not monotone in the free sign players")
    return m.partial({v: 0 for v in free}).coefficient(()), free


def refute(cert, game, index, x):
    """Forward forcing pass with the first n coordinates fixed to x."""
    if len(x) != index.n:
        raise ValueError(f"arity mismatch: expected {index.n} coordinates, got {len(x)}")
    x = [Fraction(v) for v in x]
    values = {index.basic[i]: x[i] for i in range(index.n)}
    assumed = tuple((index.basic[i], x[i]) for i in range(index.n))
    steps = []

    for i in range(index.n):
        for xk, _ in index.ladder[i]:
            target = game.players[xk].top
            v = target.evaluate(values)
            values[xk] = v
            steps.append(ForcedValue(xk, v, PIN, tuple(sorted(target.variables()))))

    forced_signs = []
    for s in index.sign:
        gap_map = game.players[s].gap_map()
        g = gap_map.evaluate(values)
        premises = tuple(sorted(gap_map.variables()))
        if g > 0:
            values[s] = Fraction(1)
            steps.append(ForcedValue(s, Fraction(1), SIGN_POS, premises))
            forced_signs.append(s)
        elif g < 0:
            values[s] = Fraction(0)
            steps.append(ForcedValue(s, Fraction(0), SIGN_NEG, premises))
            forced_signs.append(s)

    u = index.detector
    minimum, _ = _selector_minimum(game, u, {s: values[s] for s in forced_signs})
    if minimum <= 0:
        return NotRefuted(assumed, tuple(steps), "selector can vanish: detector is not forced to Top")
    values[u] = Fraction(1)
    steps.append(ForcedValue(u, Fraction(1), DETECTOR_RULE, tuple(forced_signs)))

    ii = index.integer
    for i in range(index.n):
        b = index.basic[i]
        x_i0 = index.ladder[i][0][0]
        if ii is None:
            g = game.players[b].gap_map().evaluate(values)
            if g == 0:
                continue
            forced = Fraction(1 if g > 0 else 0)
            word = "Top" if g > 0 else "Bottom"
            return RefutationTrace(
                assumed,
                tuple(steps),
                Contradiction(
                    b,
                    forced,
                    x[i],
                    f"with u=1 the gap (z_i - x_i0)u = {g} makes {word} strictly better, but x_i = x_i0 = {x[i]}",
                    (x_i0, u),
                ),
            )
        v_i = ii.root[i]
        root = ii.root_value(i)
        shift, factor = Fraction(ii.alphas[i], ii.M2), Fraction(1, ii.M2)
        pinned = root.affine_image(shift, factor)
        if pinned.equals_rational(x[i]):
            steps.append(ForcedValue(v_i, root, ROOT_RULE, (u,)))
            continue
        while pinned.lo <= x[i] <= pinned.hi:
            root = root.bisect()
            pinned = root.affine_image(shift, factor)
        steps.append(ForcedValue(v_i, root, ROOT_RULE, (u,)))
        return RefutationTrace(
            assumed,
            tuple(steps),
            Contradiction(
                b,
                pinned,
                x[i],
                "with u=1 the anchor pin forces x_i = (v_i + alpha_i)/M2, which excludes the assumed value",
                (u, x_i0, v_i),
            ),
        )
    return NotRefuted(assumed, tuple(steps), "detector forced but the point coincides with the anchor")


# --- grid projection ------------------------------------------------------


@dataclass
class PointResult:
    x: tuple
    member: bool
    canonical: str
    refutation: object
    replay_ok: Optional[bool] = None
    payoffs: tuple = ()

    @property
    def refuted(self):
        return self.refutation.refuted


@dataclass
class GridReport:
    resolution: int
    points: list
    disagreements: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.disagreements

    def members(self):
        return [p.x for p in self.points if p.member]

    def to_json(self, game, box=None):
        def coords(x):
            return [_q(v) for v in x]

        out = {
            "resolution": self.resolution,
            "n_points": len(self.points),
            "n_members": sum(p.member for p in self.points),
            "verdict": "PASS" if self.passed else "FAIL",
            "points": [
                {
                    "x": coords(p.x),
                    "member": p.member,
                    "canonical": p.canonical,
                    "refuted": p.refuted,
                    **({"payoffs": coords(p.payoffs)} if p.payoffs else {}),
                }
                for p in self.points
            ],
            "disagreements": [
                {"x": coords(p.x), "kind": kind, "trace": p.refutation.to_json(game)} for p, kind in self.disagreements
            ],
        }
        return out


def check_point(cert, game, index, x, replay=True):
    from .replay import ReplayError, replay_trace

    unit = unit_certificate(cert)
    member = membership(unit, x)
    sigma = canonical_profile(cert, game, index, x)
    verdict = check_equilibrium(game, sigma, 0)
    ref = refute(cert, game, index, x)
    replay_ok = None
    if ref.refuted and replay:
        try:
            replay_trace(game, ref)
            replay_ok = True
        except ReplayError:
            replay_ok = False
    payoffs = ()
    if index.payoff_players and verdict.passed:
        payoffs = tuple(expected_payoff(game, p, sigma) for p in index.payoff_players)
    return PointResult(tuple(x), member, "PASS" if verdict.passed else "FAIL", ref, replay_ok, payoffs)


def disagreement(res):
    if res.member and res.canonical != "PASS":
        return "member without canonical equilibrium"
    if res.member and res.refuted:
        return "member refuted"
    if not res.member and not res.refuted:
        return "non-member not refuted"
    if not res.member and res.canonical == "PASS":
        return "non-member with canonical equilibrium"
    if res.refuted and res.replay_ok is False:
        return "refutation trace failed replay"
    return None


def grid_points(n, resolution):
    axis = [Fraction(k, resolution) for k in range(resolution + 1)]
    return itertools.product(axis, repeat=n)


def project_grid(cert, game, index, resolution, replay=True):
    """Run membership, canonical check and refutation on every point of the grid {k/r}^n."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    report = GridReport(resolution, [])
    for x in grid_points(index.n, resolution):
        res = check_point(cert, game, index, x, replay)
        report.points.append(res)
        kind = disagreement(res)
        if kind:
            report.disagreements.append((res, kind))
    return report


# --- brute-force oracle ---------------------------------------------------


def _scaled_gap(m, r):
    """Integer form of a multiaffine map on the grid {k/r}: value * L * r^deg."""
    deg = max((len(k) for k in m.terms), default=0)
    L = 1
    for c in m.terms.values():
        L = L * c.denominator // _gcd(L, c.denominator)
    terms = [(int(c * L) * r ** (deg - len(k)), tuple(k)) for k, c in m.terms.items()]
    return terms, L * r**deg


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def grid_scan_equilibria(game, resolution, eps=0):
    """Every profile on the grid {k/r}^N that passes the eps-equilibrium test (N <= 6)."""
    n = game.n_players
    if n > SCAN_LIMIT:
        raise ValueError(f"full grid scan supports at most {SCAN_LIMIT} players, got {n}")
    r = int(resolution)
    eps = Fraction(eps)
    compiled = []
    for pl in game.players:
        terms, scale = _scaled_gap(pl.gap_map(), r)
        bound = eps * scale
        compiled.append((terms, bound))
    found = []
    for ks in itertools.product(range(r + 1), repeat=n):
        ok = True
        for p, (terms, bound) in enumerate(compiled):
            g = 0
            for c, vars_ in terms:
                t = c
                for v in vars_:
                    t *= ks[v]
                g += t
            if ks[p] > 0 and g < -bound:
                ok = False
                break
            if ks[p] < r and g > bound:
                ok = False
                break
        if ok:
            found.append(tuple(Fraction(k, r) for k in ks))
    return found


__all__ = [
    "ForcedValue",
    "Contradiction",
    "RefutationTrace",
    "NotRefuted",
    "canonical_profile",
    "certify_canonical",
    "refute",
    "check_point",
    "project_grid",
    "grid_scan_equilibria",
    "payoff_gap",
]
