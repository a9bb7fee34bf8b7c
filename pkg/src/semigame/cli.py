"""Command-line front end: compile, check, project, bounds, gen-lb, export.

JSON goes to stdout (sorted keys, rationals as p/q); human-readable summaries go
to stderr. Exit codes: 0 success, 1 verification failure, 2 input error.
"""

import argparse
import json
import sys
from fractions import Fraction

from .algebraic import InvalidIsolation
from .bounds import bound_report, gen_lower_bound_instance
from .certificate import (
    EQUILIBRIUM,
    PAYOFF,
    Certificate,
    CertificateError,
    parse_certificate,
    parse_rational,
)
from .compiler import CompileError, compile_certificate, index_from_game, player_count
from .export import ExportError, export_game
from .game import GameError, check_equilibrium, game_from_json, game_to_json
from .verifier import canonical_profile, check_point, disagreement, project_grid

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _emit(payload, out=None):
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    (out or sys.stdout).write(text)


def _say(msg):
    print(msg, file=sys.stderr)


def _load_cert(path, mode=None, box=None):
    try:
        with open(path, encoding="utf-8") as fh:
            cert = parse_certificate(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except CertificateError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if mode == EQUILIBRIUM and cert.mode != EQUILIBRIUM:
        if any(not 0 <= z <= 1 for z in cert.witness if isinstance(z, Fraction)):
            raise InputError("witness outside [0,1]^n for equilibrium mode")
        cert = Certificate(cert.var_names, cert.polys, cert.formula, cert.witness, EQUILIBRIUM, None)
    elif mode == PAYOFF:
        D = Fraction(box) if box is not None else cert.box
        if D is None or D <= 0:
            raise InputError("payoff mode needs a positive box radius (--box)")
        if any(abs(z) > D for z in cert.witness if isinstance(z, Fraction)):
            raise InputError(f"witness outside [-D, D]^n with D={D}")
        cert = Certificate(cert.var_names, cert.polys, cert.formula, cert.witness, PAYOFF, D)
    return cert


def _compile(cert, args):
    try:
        return compile_certificate(cert, integer=getattr(args, "integer", False),
                                   accept_undecided=getattr(args, "accept_undecided", False))
    except (CompileError, InvalidIsolation) as exc:
        raise InputError(str(exc)) from exc


def _game_for(cert, args):
    if getattr(args, "game", None):
        try:
            with open(args.game, encoding="utf-8") as fh:
                game = game_from_json(fh.read())
        except (OSError, ValueError, KeyError, GameError) as exc:
            raise InputError(f"cannot load game {args.game}: {exc}") from exc
        if game.certificate_digest != cert.digest():
            raise InputError("game was not compiled from this certificate (digest mismatch)")
        try:
            return game, index_from_game(game)
        except (CompileError, KeyError, ValueError) as exc:
            raise InputError(f"cannot index game: {exc}") from exc
    return _compile(cert, args)


def _count(cert, game, index):
    if index.integer is not None:
        return player_count(cert, integer=True, root_degrees=[len(Q) - 1 for Q in index.integer.quotients])
    return player_count(cert)


def cmd_compile(args):
    cert = _load_cert(args.certificate, args.mode, args.box)
    game, index = _compile(cert, args)
    count = _count(cert, game, index)
    if count.exact != game.n_players:
        raise AssertionError("player count disagrees with the compiled game")
    payload = {
        "certificate_digest": game.certificate_digest,
        "mode": game.mode,
        "integer": bool(game.metadata.get("integer")),
        "players": count.to_json(),
        "player_names": game.names(),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(game_to_json(game))
        payload["game_path"] = args.out
    else:
        payload["game"] = json.loads(game_to_json(game))
    _emit(payload)
    _say(f"compiled {args.certificate}: N={count.exact} (closed-form bound {count.closed_form_bound}, refined {count.refined_bound})")
    return EXIT_OK


def _parse_point(text, n):
    try:
        pt = [parse_rational(t) for t in text.split(",")]
    except CertificateError as exc:
        raise InputError(f"malformed point: {exc}") from exc
    if len(pt) != n:
        raise InputError(f"point has {len(pt)} coordinates, certificate has n={n}")
    return pt


def _to_unit(cert, x):
    if cert.mode == PAYOFF:
        D = cert.box
        return [(v + D) / (2 * D) for v in x]
    return x


def cmd_check(args):
    cert = _load_cert(args.certificate, args.mode, args.box)
    x = _parse_point(args.point, cert.n)
    unit_x = _to_unit(cert, x)
    if any(not 0 <= v <= 1 for v in unit_x):
        raise InputError("point lies outside the box of the construction")
    game, index = _game_for(cert, args)
    res = check_point(cert, game, index, unit_x)
    payload = {"point": [_q(v) for v in x], "member": res.member}
    if res.member:
        sigma = canonical_profile(cert, game, index, unit_x)
        verdict = check_equilibrium(game, sigma)
        payload["verdict"] = "IN"
        payload["canonical"] = {
            "profile": {name: _q(sigma[i]) for i, name in enumerate(game.names())},
            **verdict.to_json(game),
        }
        if res.payoffs:
            payload["payoffs"] = [_q(v) for v in res.payoffs]
    else:
        payload["verdict"] = "OUT"
    payload["refutation"] = res.refutation.to_json(game)
    kind = disagreement(res)
    payload["agrees_with_membership"] = kind is None
    if kind:
        payload["disagreement"] = kind
    _emit(payload)
    _say(f"{args.point}: {payload['verdict']}" + (f" ({kind})" if kind else ""))
    return EXIT_FAIL if kind else EXIT_OK


def cmd_project(args):
    cert = _load_cert(args.certificate, args.mode, args.box)
    if args.grid < 1:
        raise InputError("--grid must be positive")
    game, index = _game_for(cert, args)
    report = project_grid(cert, game, index, args.grid)
    payload = report.to_json(game)
    _emit(payload)
    _say(f"{'x':>24}  member  canonical  refuted")
    for p in report.points:
        if p.member or report.disagreements:
            coords = ",".join(str(v) for v in p.x)
            _say(f"{coords:>24}  {str(p.member):6}  {p.canonical:9}  {p.refuted}")
    _say(f"{len(report.points)} points, {payload['n_members']} members, {len(report.disagreements)} disagreements")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bounds(args):
    cert = _load_cert(args.certificate, args.mode, args.box)
    game, index = _compile(cert, args)
    count = _count(cert, game, index)
    d = max(cert.degrees())
    report = bound_report(game.n_players, cert.n, d)
    payload = {"players": count.to_json(), "bounds": report.to_json(), "n": cert.n, "d": d}
    _emit(payload)
    _say(f"N={game.n_players}; equilibrium components <= 2N^(7N) = {report.eq_components}")
    return EXIT_OK


def cmd_gen_lb(args):
    try:
        alphas = [parse_rational(t) for t in args.alphas.split(",")]
        cert = gen_lower_bound_instance(args.n, args.d, alphas)
    except (CertificateError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    text = cert.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _say(f"wrote {args.out}: {args.d}^{args.n} = {args.d ** args.n} points")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export(args):
    try:
        with open(args.game, encoding="utf-8") as fh:
            game = game_from_json(fh.read())
        data = export_game(game, args.format)
    except (OSError, ValueError, KeyError, GameError, ExportError) as exc:
        raise InputError(str(exc)) from exc
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="semigame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def cert_args(p):
        p.add_argument("certificate")
        p.add_argument("--mode", choices=[EQUILIBRIUM, PAYOFF])
        p.add_argument("--box", type=Fraction, help="box radius D for --mode payoff")
        p.add_argument("--integer", action="store_true", help="integer-payoff construction")
        p.add_argument("--accept-undecided", action="store_true",
                       help="compile even if witness membership stays UNDECIDED")

    p = sub.add_parser("compile", help="compile a certificate into a game")
    cert_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check", help="canonical equilibrium or refutation at one point")
    cert_args(p)
    p.add_argument("--point", required=True)
    p.add_argument("--game", help="use an existing game JSON compiled from this certificate")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("project", help="compare the equilibrium projection with E on a grid")
    cert_args(p)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--game")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bounds", help="player count and component bounds")
    cert_args(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gen-lb", help="emit the d^n-point lower-bound certificate")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.add_argument("--alphas", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_lb)

    p = sub.add_parser("export", help="convert a game JSON to nfg/tensor/json")
    p.add_argument("game")
    p.add_argument("--format", choices=["json", "tensor", "nfg"], default="nfg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
