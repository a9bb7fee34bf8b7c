"""Acceptance criteria 1-8, one PASS/FAIL line each (shown in the terminal summary)."""

import math
import random
import time
from fractions import Fraction as F

from certs import PAYOFF, ROOT2, load, lower_bound, suite
from conftest import ACCEPTANCE_LINES
from semigame.bounds import coste_bound, equilibrium_components_bound
from semigame.compiler import compile_certificate, ladder_q, multiaffine_lift, pin_gadget, player_count
from semigame.export import vertex_values
from semigame.game import eval_map
from semigame.integer import max_payoff_magnitude
from semigame.polynomial import Polynomial
from semigame.replay import replay_trace
from semigame.univariate import format_poly
from semigame.verifier import PIN, ROOT_RULE, canonical_profile, certify_canonical, grid_scan_equilibria, project_grid, refute


def report(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def test_criterion_1_pin_gadget():
    start = time.perf_counter()
    bad, sizes = [], []
    for x in (F(0), F(1, 4), F(1, 2), F(1)):
        found = grid_scan_equilibria(pin_gadget(x), 100, eps=0)
        sizes.append(len(found))
        bad += [p for p in found if p[0] != x]
    elapsed = time.perf_counter() - start
    ok = not bad and all(sizes) and elapsed < 1.0
    report(1, "pin gadget", ok, f"equilibria per target {sizes}, off-target {len(bad)}, {elapsed:.2f}s (< 1s)")


def test_criterion_2_power_ladder():
    checked, wrong = 0, []
    for name in ("half", "lb_n1_d2"):  # q = 1 and q = 3
        cert = suite()[name]
        game, index = compile_certificate(cert)
        for x in (F(0), F(1, 3), F(1, 2), F(1)):
            trace = refute(cert, game, index, [x] * cert.n)
            forced = {s.player: s.value for s in trace.steps if s.rule == PIN}
            for i, rungs in enumerate(index.ladder):
                for k, (xk, _) in enumerate(rungs):
                    checked += 1
                    if forced.get(xk) != x ** (2**k):
                        wrong.append((name, x, i, k, forced.get(xk)))
    report(2, "power ladder", not wrong, f"{checked} pinned rungs equal x^(2^k) exactly, {len(wrong)} mismatches")


def test_criterion_3_lift_identity():
    rng = random.Random(20261016)
    failures = evaluations = 0
    for _ in range(200):
        n = rng.randint(1, 3)
        terms = {}
        for _ in range(rng.randint(1, 8)):
            exps = tuple(rng.randint(0, 7) for _ in range(n))
            terms[exps] = F(rng.randint(-50, 50), rng.randint(1, 30))
        p = Polynomial(n, terms)
        q = [ladder_q(d) for d in p.degrees()]
        ladders, nxt = [], 0
        for qi in q:
            ladders.append(tuple(range(nxt, nxt + qi)))
            nxt += qi
        lifted = multiaffine_lift(p, ladders)
        for _ in range(10):
            x = [F(rng.randint(0, 60), rng.randint(1, 60)) for _ in range(n)]
            sigma = {ladders[i][k]: x[i] ** (2**k) for i in range(n) for k in range(q[i])}
            evaluations += 1
            failures += eval_map(lifted, sigma) != p.evaluate(x)
    report(3, "lift identity", failures == 0, f"{evaluations} exact evaluations, {failures} failures")


def test_criterion_4_projection_suite():
    start = time.perf_counter()
    lines, problems = [], []
    for name, cert in suite().items():
        game, index = compile_certificate(cert)
        rep = project_grid(cert, game, index, 16)
        for p in rep.points:
            if p.member and p.canonical != "PASS":
                problems.append((name, p.x, "canonical"))
            if not p.member and not (p.refuted and p.replay_ok):
                problems.append((name, p.x, "refutation"))
        problems += [(name, p.x, kind) for p, kind in rep.disagreements]
        lines.append(f"{name}:{len(rep.members())}/{len(rep.points)}")
    elapsed = time.perf_counter() - start
    ok = not problems and len(lines) >= 6 and elapsed < 30
    report(4, "projection at r=16", ok, f"{', '.join(lines)} members; {len(problems)} disagreements; {elapsed:.1f}s (< 30s)")


def test_criterion_5_player_counts():
    rows, bad = [], []
    for name, cert in suite().items():
        game, _ = compile_certificate(cert)
        degs = cert.degrees()
        exact = cert.n + 2 * sum(max(1, d.bit_length()) for d in degs) + cert.n_leaves + 1
        closed_form = 1 + cert.n_leaves + cert.n * (3 + 2 * math.log2(max(degs)))
        count = player_count(cert)
        ok = game.n_players == exact == count.exact and exact <= closed_form + 1e-9 and exact <= count.refined_bound + 1e-9
        rows.append(f"{name}:{exact}<={closed_form:.2f}")
        if not ok:
            bad.append(name)
    half = compile_certificate(suite()["half"])[0].n_players
    report(5, "player counts", not bad and half == 5, f"half N={half}; {', '.join(rows)}")


def test_criterion_6_payoff_mode():
    cert = load(PAYOFF)
    D = cert.box
    game, index = compile_certificate(cert)
    rep = project_grid(cert, game, index, 16)
    mismatched, payoffs = [], set()
    for p in rep.points:
        if not p.member:
            continue
        target = -D + 2 * D * p.x[0]
        sigma = canonical_profile(cert, game, index, p.x)
        x10 = sigma[index.payoff_players[0]]
        if not (p.payoffs == (target,) and -D + 2 * D * x10 == target):
            mismatched.append(p.x)
        payoffs.add(p.payoffs[0])
    grid = {-D + F(4 * k, 16) for k in range(17)}
    expected = {y for y in grid if -1 <= y <= F(1, 2)}
    ok = rep.passed and not mismatched and payoffs == expected
    shown = ", ".join(str(v) for v in sorted(payoffs))
    report(6, "payoff mode", ok, f"payoffs over grid members {{{shown}}} == E on grid; {len(mismatched)} mismatches")


def test_criterion_7_integer_mode():
    start = time.perf_counter()
    cert = load(ROOT2)
    game, index = compile_certificate(cert, integer=True)
    non_integer = sum(
        1 for pl in game.players for side in (pl.top, pl.bottom) for v in vertex_values(side) if v.denominator != 1
    )
    Q = index.integer.quotients[0]
    q_ok = Q == (2, -4, -2) and Q[0] >= 0 >= sum(Q)
    trace = refute(cert, game, index, [F(1, 2)])
    root_steps = [s for s in trace.steps if s.rule == ROOT_RULE]
    refuted = trace.refuted and len(root_steps) == 1
    if refuted:
        replay_trace(game, trace)
    check = certify_canonical(cert, game, index)
    mag = max_payoff_magnitude(game, index)
    elapsed = time.perf_counter() - start
    ok = non_integer == 0 and q_ok and refuted and check.status == "PASS" and check.width <= F(1, 2**40) and elapsed < 10
    report(
        7,
        "integer mode",
        ok,
        f"N={game.n_players}, max |payoff| {mag.max_payoff}, Q1={format_poly(Q)}, refuted x=1/2 via ROOT, "
        f"canonical {check.status} at width 2^{math.log2(check.width):.0f}, {elapsed:.2f}s (< 10s)",
    )


def test_criterion_8_bounds():
    comp2 = equilibrium_components_bound(2).bound
    coste = coste_bound(2, 1, 1)
    sizes = []
    for n in (1, 2):
        cert = lower_bound(n)
        game, index = compile_certificate(cert)
        sizes.append(len(project_grid(cert, game, index, 4).members()))
    ok = comp2 == 32768 and coste == 6 and sizes == [2, 4]
    report(8, "bounds", ok, f"2N^(7N) at N=2 = {comp2}, coste(2,1,1) = {coste}, lower-bound members {sizes} (d^n = 2, 4)")
