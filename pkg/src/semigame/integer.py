"""Integer-payoff construction for integer certificates with algebraic witnesses.

Each witness coordinate z_i is a root of an integer polynomial R_i isolated in a
cell [alpha_i/M2, (alpha_i+1)/M2]. The shifted polynomial
Q_i(x) = M2^d1 * R_i((x + alpha_i)/M2) has integer coefficients and a unique root
in [0,1]; a player V_i paid u*Q_i(v_i) is then forced onto that root once the
detector plays Top, and the anchor pair X_i/Y_i pins x_i to (v_i + alpha_i)/M2.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm

from . import univariate as up
from .algebraic import DEFAULT_DEPTH, AlgebraicNumber, InvalidIsolation
from .certificate import Certificate
from .compiler import (
    CompilationIndex,
    CompileError,
    _check_witness,
    _core_players,
    build_power_ladder,
    ladder_q,
    multiaffine_lift,
    pin_pair,
)
from .export import vertex_values
from .game import (
    ANCHOR_MIRROR,
    BASIC,
    ROOT,
    ROOT_MIRROR,
    ROOT_POWER,
    BinaryGame,
    MultiaffineMap,
    Player,
    PlayerId,
)

MAX_CELL_SEARCH = 64


class QuotientError(ValueError):
    pass


def sturm_root_count(poly, lo, hi):
    """Distinct real roots of ``poly`` in the open interval (lo, hi)."""
    poly = up.trim(poly)
    if not poly:
        raise ValueError("zero polynomial")
    return up.count_roots_open(poly, lo, hi)


def build_isolated_quotient(R, alpha, M2, d1=None):
    """Q(x) = M2^d1 * R((x + alpha)/M2), sign-normalized so Q(0) >= 0 >= Q(1).

    Raises QuotientError unless Q has exactly one root in [0, 1].
    """
    R = up.trim(R)
    d1 = up.degree(R) if d1 is None else d1
    if up.degree(R) > d1:
        raise QuotientError("d1 is smaller than deg R")
    M2 = int(M2)
    alpha = int(alpha)
    if M2 < 1 or not 0 <= alpha < M2:
        raise QuotientError("need M2 >= 1 and 0 <= alpha < M2")
    Q = up.scale(up.compose_affine(R, Fraction(alpha, M2), Fraction(1, M2)), Fraction(M2) ** d1)
    if any(c.denominator != 1 for c in Q):
        raise QuotientError("Q has non-integer coefficients; is R integral?")
    q0, q1 = up.evaluate(Q, 0), up.evaluate(Q, 1)
    if q0 < 0 or (q0 == 0 and q1 > 0):
        Q = up.neg(Q)
        q0, q1 = -q0, -q1
    if q0 < 0 or q1 > 0:
        raise QuotientError("Q(0) and Q(1) have the same strict sign: the cell does not isolate a root")
    count = up.count_roots_closed(Q, 0, 1)
    if count != 1:
        raise QuotientError(f"Q has {count} roots in [0,1], expected exactly one")
    return Q


def _as_algebraic(z):
    if isinstance(z, AlgebraicNumber):
        return AlgebraicNumber.isolate(z.poly, z.lo, z.hi)
    z = Fraction(z)
    return AlgebraicNumber((Fraction(-z.numerator), Fraction(z.denominator)), z, z)


def _cell_of(a, m):
    """Index c with the root in [c/m, (c+1)/m], c clipped to m-1."""
    while True:
        v = a.exact_value()
        if v is not None:
            return min(floor(v * m), m - 1)
        fl, fh = floor(a.lo * m), floor(a.hi * m)
        if fl == fh:
            return min(fl, m - 1)
        k = fl + 1
        if up.evaluate(a.poly, Fraction(k, m)) == 0:
            return min(k, m - 1)
        a = a.bisect()


def _is_cell(a):
    w = a.hi - a.lo
    if w <= 0 or w.numerator != 1:
        return None
    m = w.denominator
    lo = a.lo * m
    return m if lo.denominator == 1 else None


def _cell_size(a):
    m = _is_cell(a)
    if m is not None:
        return m
    m = 1
    for _ in range(MAX_CELL_SEARCH):
        c = _cell_of(a, m)
        if up.count_roots_closed(a.poly, Fraction(c, m), Fraction(c + 1, m)) == 1:
            return m
        m *= 2
    raise CompileError("could not find a dyadic cell isolating the witness root")


def choose_cells(witness):
    """Common M2 and per-coordinate alpha_i from the witness isolating intervals.

    An interval of the form [a/m, (a+1)/m] is taken literally; other intervals get
    the coarsest dyadic cell that still isolates the root.
    """
    M2 = 1
    for a in witness:
        M2 = lcm(M2, _cell_size(a))
    alphas = tuple(_cell_of(a, M2) for a in witness)
    for a, al in zip(witness, alphas):
        if up.count_roots_closed(a.poly, Fraction(al, M2), Fraction(al + 1, M2)) != 1:
            raise CompileError("cell does not isolate the witness root")
    return M2, alphas


@dataclass
class IntegerIndex:
    root: tuple  # V_i
    root_ladder: tuple  # per i: ((V_ik, W_ik), ...)
    anchor_mirror: tuple  # Y_i
    quotients: tuple  # Q_i coefficient tuples
    alphas: tuple
    M2: int
    d1: int
    witness: tuple  # AlgebraicNumbers (rational coordinates as linear roots)

    def root_value(self, i):
        """The unique root of Q_i in [0, 1] as an algebraic number."""
        z = self.witness[i]
        return z.affine_image(-self.alphas[i], self.M2) if z.lo != z.hi else AlgebraicNumber.rational(
            z.lo * self.M2 - self.alphas[i]
        )


def compile_integer(cert, accept_undecided=False, depth=DEFAULT_DEPTH):
    """Game with integer pure payoffs whose equilibria project onto E."""
    if cert.mode != "equilibrium":
        raise CompileError("integer construction requires an equilibrium-mode certificate")
    for name, p in cert.polys:
        if any(c.denominator != 1 for c in p.terms.values()):
            raise CompileError(f"polynomial {name} has non-integer coefficients")
    try:
        witness = tuple(_as_algebraic(z) for z in cert.witness)
    except InvalidIsolation as exc:
        raise CompileError(f"invalid witness isolation: {exc}") from exc
    alg_cert = Certificate(cert.var_names, cert.polys, cert.formula, witness, cert.mode, cert.box)
    _, overridden = _check_witness(alg_cert, accept_undecided, depth)

    M2, alphas = choose_cells(witness)
    d1 = max(up.degree(a.poly) for a in witness)
    try:
        quotients = tuple(build_isolated_quotient(a.poly, al, M2, d1) for a, al in zip(witness, alphas))
    except QuotientError as exc:
        raise CompileError(str(exc)) from exc

    n = cert.n
    core, q, ladder, sign, u = _core_players(cert, n)
    nxt = u + 1
    root = tuple(range(nxt, nxt + n))
    nxt += n
    root_players = []
    root_ladder = []
    for i in range(n):
        length = ladder_q(up.degree(quotients[i]))
        rungs = build_power_ladder(i + 1, length, root[i], nxt, roles=(ROOT_POWER, ROOT_MIRROR))
        root_players.extend(rungs)
        root_ladder.append(tuple((rungs[2 * k].id.index, rungs[2 * k + 1].id.index) for k in range(length)))
        nxt += 2 * length
    anchor_mirror = tuple(range(nxt, nxt + n))

    U = MultiaffineMap.var(u)
    v_players = []
    for i in range(n):
        Q_poly = _univariate_as_poly(quotients[i])
        f = multiaffine_lift(Q_poly, [[v for v, _ in root_ladder[i]]])
        v_players.append(Player(PlayerId(root[i], ROOT, (i + 1,)), U * f, MultiaffineMap()))

    basic = []
    mirrors = []
    for i in range(n):
        x_i0 = ladder[i][0][0]
        # M2 * ((1-u) x_i0 + u (v_i + alpha_i)/M2)
        target = (
            MultiaffineMap.var(x_i0) * M2
            - U * MultiaffineMap.var(x_i0) * M2
            + U * MultiaffineMap.var(root[i])
            + U * alphas[i]
        )
        a, b = pin_pair(PlayerId(i, BASIC, (i + 1,)), PlayerId(anchor_mirror[i], ANCHOR_MIRROR, (i + 1,)), target)
        basic.append(Player(a.id, a.top, a.bottom * M2))
        mirrors.append(Player(b.id, b.top * M2, b.bottom))

    players = basic + core + v_players + root_players + mirrors
    metadata = {
        "integer": True,
        "M2": M2,
        "alphas": list(alphas),
        "d1": d1,
        "quotients": [[_q(c) for c in Q] for Q in quotients],
        "witness_polys": [[_q(c) for c in a.poly] for a in witness],
    }
    if overridden:
        metadata["witness_override"] = True
    game = BinaryGame(tuple(players), n_projection=n, mode="equilibrium", certificate_digest=cert.digest(), metadata=metadata)
    for pl in game.players:
        for side in (pl.top, pl.bottom):
            for v in vertex_values(side):
                if v.denominator != 1:
                    raise CompileError(f"non-integer pure payoff {v} for {pl.id.name}")
    index = CompilationIndex(
        n,
        q,
        tuple(range(n)),
        ladder,
        sign,
        u,
        witness,
        integer=IntegerIndex(root, tuple(root_ladder), anchor_mirror, quotients, alphas, M2, d1, witness),
    )
    return game, index


def _univariate_as_poly(coeffs):
    from .polynomial import Polynomial

    return Polynomial.from_univariate(coeffs)


def _q(x):
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MagnitudeReport:
    max_payoff: int
    per_root_player: tuple  # (name, actual max, construction bound 2^(D_i+1) * max|coef Q_i|)

    def to_json(self):
        return {
            "max_payoff": self.max_payoff,
            "root_players": [
                {"player": name, "max_payoff": m, "construction_bound": b} for name, m, b in self.per_root_player
            ],
        }


def max_payoff_magnitude(game, index=None):
    """Largest |pure payoff| over all players, plus per-V_i construction bounds."""
    best = Fraction(0)
    per_player = {}
    for pl in game.players:
        m = Fraction(0)
        for side in (pl.top, pl.bottom):
            for v in vertex_values(side):
                m = max(m, abs(v))
        per_player[pl.id.index] = m
        best = max(best, m)
    rows = []
    if index is not None and index.integer is not None:
        ii = index.integer
        for i, v in enumerate(ii.root):
            Q = ii.quotients[i]
            bound = (1 << len(ii.root_ladder[i])) * max(abs(c) for c in Q)
            rows.append((game.players[v].id.name, int(per_player[v]), int(bound)))
    if best.denominator != 1:
        raise ValueError("game has non-integer pure payoffs")
    return MagnitudeReport(int(best), tuple(rows))
