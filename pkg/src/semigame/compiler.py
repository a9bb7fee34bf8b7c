"""Certificate -> binary game compilation (equilibrium and payoff modes)."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebraic import DEFAULT_DEPTH
from .certificate import (
    CONFIRMED,
    EQUILIBRIUM,
    PAYOFF as PAYOFF_MODE,
    UNDECIDED,
    to_selector,
    transform_to_unit_box,
    validate_witness,
)
from .game import (
    BASIC,
    DETECTOR,
    MIRROR,
    PAYOFF,
    PIN_A,
    PIN_B,
    POWER,
    SIGN,
    BinaryGame,
    MultiaffineMap,
    Player,
    PlayerId,
)


class CompileError(ValueError):
    pass


def ladder_q(d):
    """Smallest q >= 1 with d < 2**q."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return max(1, int(d).bit_length())


def pin_gadget(x):
    """Two-player game in which the first player's probability equals x at every equilibrium."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("pin target must lie in [0,1]")
    a = Player(PlayerId(0, PIN_A), MultiaffineMap.constant(x), MultiaffineMap.var(1))
    b = Player(PlayerId(1, PIN_B), MultiaffineMap.var(0), MultiaffineMap.constant(x))
    return BinaryGame((a, b), n_projection=1, mode="gadget")


def pin_pair(a_id, b_id, target):
    """Players for a pin: a plays Top iff ``target`` beats b; b copies a."""
    return (
        Player(a_id, target, MultiaffineMap.var(b_id.index)),
        Player(b_id, MultiaffineMap.var(a_id.index), target),
    )


def build_power_ladder(i, q, basic, first_index, roles=(POWER, MIRROR)):
    """Pairs (X_ik, Y_ik), k < q, forcing x_ik = x_i^(2^k).

    ``basic`` is the player index of X_i, ``first_index`` the index given to X_i0;
    players are laid out X_i0, Y_i0, X_i1, Y_i1, ...
    """
    if q < 1:
        raise ValueError("ladder length must be at least 1")
    players = []
    target = MultiaffineMap.var(basic)
    for k in range(q):
        xid = PlayerId(first_index + 2 * k, roles[0], (i, k))
        yid = PlayerId(first_index + 2 * k + 1, roles[1], (i, k))
        players.extend(pin_pair(xid, yid, target))
        target = target * MultiaffineMap.var(xid.index)
    return players


def multiaffine_lift(poly, ladders):
    """Rewrite ``poly`` as a multiaffine map over ladder players.

    ``ladders[i][k]`` is the player index carrying x_i^(2^k); each power x_i^m
    becomes the product of the players at the set bits of m.
    """
    terms = {}
    for exps, coef in poly.terms.items():
        vars_ = []
        for i, m in enumerate(exps):
            if m >= 1 << len(ladders[i]):
                raise CompileError(
                    f"degree {m} in variable {i + 1} exceeds ladder capacity {(1 << len(ladders[i])) - 1}"
                )
            vars_.extend(ladders[i][k] for k in range(m.bit_length()) if (m >> k) & 1)
        terms[frozenset(vars_)] = coef
    return MultiaffineMap(terms)


@dataclass
class CompilationIndex:
    n: int
    q: tuple
    basic: tuple  # X_i
    ladder: tuple  # per i: tuple of (X_ik, Y_ik)
    sign: tuple  # S_c in leaf order
    detector: int  # U
    witness: tuple  # anchor point in the unit box (rational in equilibrium/payoff mode)
    mode: str = EQUILIBRIUM
    box: Optional[Fraction] = None
    payoff_players: tuple = ()  # Y_i0 in payoff mode
    integer: Optional[object] = None  # IntegerIndex in integer mode
    extra: dict = field(default_factory=dict)

    @property
    def ladder_x(self):
        return tuple(tuple(x for x, _ in rungs) for rungs in self.ladder)

    def order(self):
        """Forcing order: ladders, sign players, detector."""
        out = []
        for rungs in self.ladder:
            out.extend(x for x, _ in rungs)
        return out + list(self.sign) + [self.detector]


def _check_witness(cert, accept_undecided, depth):
    report = validate_witness(cert, depth)
    if report.status == CONFIRMED:
        return report, False
    if report.status == UNDECIDED and accept_undecided:
        return report, True
    if report.status == UNDECIDED:
        raise CompileError(f"witness membership UNDECIDED after {depth} bisections (override to accept)")
    raise CompileError("witness is not a member of the set (REJECTED)")


def _core_players(cert, start):
    """Ladders, sign players and detector, numbered from ``start``.

    Returns (players, ladder, sign indices, detector index, ladder player lists).
    """
    q = tuple(ladder_q(d) for d in cert.degrees())
    players = []
    ladder = []
    nxt = start
    for i in range(cert.n):
        rungs = build_power_ladder(i + 1, q[i], i, nxt)
        players.extend(rungs)
        ladder.append(tuple((rungs[2 * k].id.index, rungs[2 * k + 1].id.index) for k in range(q[i])))
        nxt += 2 * q[i]
    ladder_x = [[x for x, _ in rungs] for rungs in ladder]
    sign = []
    for leaf, poly in zip(cert.leaves, cert.leaf_polys()):
        sid = PlayerId(nxt, SIGN, (leaf.index + 1,))
        players.append(Player(sid, multiaffine_lift(poly, ladder_x), MultiaffineMap()))
        sign.append(nxt)
        nxt += 1
    selector = to_selector(cert.formula).expand()
    u_top = MultiaffineMap({frozenset(sign[c] for c in k): v for k, v in selector.items()})
    players.append(Player(PlayerId(nxt, DETECTOR), u_top, MultiaffineMap()))
    return players, q, tuple(ladder), tuple(sign), nxt


def compile_equilibrium(cert, accept_undecided=False, depth=DEFAULT_DEPTH, digest=None):
    """Game whose equilibria project onto E (a subset of [0,1]^n) on the first n players."""
    if cert.mode != EQUILIBRIUM:
        raise CompileError("certificate is in payoff mode; use compile_payoff")
    if cert.algebraic:
        raise CompileError("algebraic witnesses need the integer-payoff construction")
    _, overridden = _check_witness(cert, accept_undecided, depth)
    n = cert.n
    core, q, ladder, sign, u = _core_players(cert, n)
    basic = []
    for i in range(n):
        x_i0 = ladder[i][0][0]
        top = (MultiaffineMap.constant(cert.witness[i]) - MultiaffineMap.var(x_i0)) * MultiaffineMap.var(u)
        basic.append(Player(PlayerId(i, BASIC, (i + 1,)), top, MultiaffineMap()))
    metadata = {}
    if overridden:
        metadata["witness_override"] = True
    game = BinaryGame(
        tuple(basic + core),
        n_projection=n,
        mode=EQUILIBRIUM,
        certificate_digest=digest or cert.digest(),
        metadata=metadata,
    )
    index = CompilationIndex(n, q, tuple(range(n)), ladder, sign, u, tuple(cert.witness))
    return game, index


def compile_payoff(cert, accept_undecided=False, depth=DEFAULT_DEPTH):
    """Game whose equilibrium payoffs of Y_10..Y_n0 project onto E (a subset of [-D,D]^n)."""
    if cert.mode != PAYOFF_MODE:
        raise CompileError("certificate is not in payoff mode")
    if cert.algebraic:
        raise CompileError("payoff mode needs a rational witness")
    D = Fraction(cert.box)
    unit = transform_to_unit_box(cert)
    game, index = compile_equilibrium(unit, accept_undecided, depth, digest=cert.digest())
    players = list(game.players)
    payoff_players = []
    for i in range(cert.n):
        x_i0, y_i0 = index.ladder[i][0]
        old = players[y_i0]
        top = MultiaffineMap.constant(-D) + MultiaffineMap.var(x_i0) * (2 * D)
        bottom = MultiaffineMap.constant(-D) + MultiaffineMap.var(i) * (2 * D)
        players[y_i0] = Player(PlayerId(y_i0, PAYOFF, old.id.role_indices), top, bottom)
        payoff_players.append(y_i0)
    metadata = dict(game.metadata)
    metadata["box"] = f"{D.numerator}/{D.denominator}"
    metadata["payoff_players"] = payoff_players
    game = BinaryGame(
        tuple(players), n_projection=cert.n, mode=PAYOFF_MODE, certificate_digest=cert.digest(), metadata=metadata
    )
    index.mode = PAYOFF_MODE
    index.box = D
    index.payoff_players = tuple(payoff_players)
    return game, index


def compile_certificate(cert, integer=False, accept_undecided=False, depth=DEFAULT_DEPTH):
    """Pick the construction: integer payoffs, payoff mode or equilibrium mode."""
    if integer or cert.algebraic:
        if cert.mode == PAYOFF_MODE:
            raise CompileError("integer-payoff construction requires an equilibrium-mode certificate")
        from .integer import compile_integer

        return compile_integer(cert, accept_undecided=accept_undecided, depth=depth)
    if cert.mode == PAYOFF_MODE:
        return compile_payoff(cert, accept_undecided, depth)
    return compile_equilibrium(cert, accept_undecided, depth)


@dataclass(frozen=True)
class PlayerCount:
    exact: int
    closed_form_bound: Optional[float]
    refined_bound: Optional[float]

    def to_json(self):
        return {"exact": self.exact, "closed_form_bound": self.closed_form_bound, "refined_bound": self.refined_bound}


def player_count(cert, integer=False, root_degrees=None):
    """Exact construction size next to the closed-form bounds (real-valued log2).

    Bounds that would need log2(0) are reported as None.
    """
    n, C = cert.n, cert.n_leaves
    degs = cert.degrees()
    q = [ladder_q(d) for d in degs]
    d = max(degs)
    if not integer:
        exact = n + 2 * sum(q) + C + 1
        closed_form = 1 + C + n * (3 + 2 * math.log2(d)) if d >= 1 else None
        refined = 1 + C + 3 * n + 2 * sum(math.log2(di) for di in degs) if min(degs) >= 1 else None
    else:
        # root_degrees: deg Q_i per coordinate
        root_degrees = list(root_degrees)
        d1 = max(root_degrees)
        ladders_v = [ladder_q(r) for r in root_degrees]
        exact = 3 * n + 2 * sum(q) + C + 1 + 2 * sum(ladders_v)
        closed_form = 1 + C + n * (5 + 2 * math.log2(d)) + 2 * n * (1 + math.log2(d1)) if d >= 1 else None
        refined = (
            1 + C + 5 * n + 2 * sum(math.log2(di) for di in degs) + 2 * sum(1 + math.log2(r) for r in root_degrees)
            if min(degs) >= 1
            else None
        )
    return PlayerCount(exact, closed_form, refined)


def index_from_game(game):
    """Rebuild the CompilationIndex of a compiled game from its role tags and metadata."""
    by_role = {}
    for pl in game.players:
        by_role.setdefault(pl.id.role, []).append(pl.id)
    n = game.n_projection
    basic = tuple(p.index for p in sorted(by_role.get(BASIC, []), key=lambda p: p.role_indices))
    if len(basic) != n:
        raise CompileError("game does not look like a compiled certificate (basic players missing)")
    rungs = {}
    for role in (POWER, MIRROR, PAYOFF):
        for p in by_role.get(role, []):
            i, k = p.role_indices
            rungs.setdefault((i, k), [None, None])[0 if role == POWER else 1] = p.index
    ladder = []
    for i in range(1, n + 1):
        ks = sorted(k for (j, k) in rungs if j == i)
        ladder.append(tuple(tuple(rungs[(i, k)]) for k in ks))
    sign = tuple(p.index for p in sorted(by_role.get(SIGN, []), key=lambda p: p.role_indices))
    (u,) = [p.index for p in by_role[DETECTOR]]
    q = tuple(len(r) for r in ladder)
    meta = game.metadata or {}
    integer = None
    if meta.get("integer"):
        from .algebraic import AlgebraicNumber
        from .game import ANCHOR_MIRROR, ROOT, ROOT_MIRROR, ROOT_POWER, parse_q
        from .integer import IntegerIndex

        M2 = int(meta["M2"])
        alphas = tuple(int(a) for a in meta["alphas"])
        witness = tuple(
            AlgebraicNumber(tuple(parse_q(c) for c in R), Fraction(a, M2), Fraction(a + 1, M2))
            for R, a in zip(meta["witness_polys"], alphas)
        )
        root = tuple(p.index for p in sorted(by_role[ROOT], key=lambda p: p.role_indices))
        vr = {}
        for role in (ROOT_POWER, ROOT_MIRROR):
            for p in by_role[role]:
                vr.setdefault(tuple(p.role_indices), [None, None])[0 if role == ROOT_POWER else 1] = p.index
        root_ladder = tuple(
            tuple(tuple(vr[(i, k)]) for k in sorted(k for (j, k) in vr if j == i)) for i in range(1, n + 1)
        )
        mirrors = tuple(p.index for p in sorted(by_role[ANCHOR_MIRROR], key=lambda p: p.role_indices))
        quotients = tuple(tuple(parse_q(c) for c in Q) for Q in meta["quotients"])
        integer = IntegerIndex(root, root_ladder, mirrors, quotients, alphas, M2, int(meta["d1"]), witness)
        wit = witness
    else:
        wit = tuple(game.players[b].top.coefficient([u]) for b in basic)
    index = CompilationIndex(n, q, basic, tuple(ladder), sign, u, wit, integer=integer)
    if game.mode == PAYOFF_MODE:
        from .game import parse_q

        index.mode = PAYOFF_MODE
        index.box = parse_q(meta["box"])
        index.payoff_players = tuple(meta["payoff_players"])
    return index
