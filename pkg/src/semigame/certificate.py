"""Certificates of compact semi-algebraic sets: parsing, membership, selector, box transform.

A certificate names polynomials P_c, combines the closed sets {P_c <= 0} with
n-ary AND/OR nodes and carries a witness point proving nonemptiness.

Text format (one statement per line, ``#`` starts a comment)::

    vars: x1 x2
    mode: equilibrium            # or: mode: payoff D=2
    poly P1: x1^2 + x2^2 - 1
    formula: AND(P1, P2)         # or OR(...), nested freely
    witness: 0, 1/2              # or one line per coordinate:
    witness_alg 1: R=[-1,0,2] interval=[1/2,1]
"""

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .algebraic import DEFAULT_DEPTH, AlgebraicNumber, sign_at
from .polynomial import Polynomial

EQUILIBRIUM = "equilibrium"
PAYOFF = "payoff"


class CertificateError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


# --- formulas -------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    name: str
    index: int  # position among all leaves, left to right


@dataclass(frozen=True)
class Node:
    op: str  # "AND" or "OR"
    children: tuple


Formula = Union[Leaf, Node]


def leaves(formula):
    if isinstance(formula, Leaf):
        return [formula]
    out = []
    for child in formula.children:
        out.extend(leaves(child))
    return out


def formula_text(formula):
    if isinstance(formula, Leaf):
        return formula.name
    return f"{formula.op}(" + ",".join(formula_text(c) for c in formula.children) + ")"


def eval_formula(formula, leaf_value):
    """Boolean evaluation; ``leaf_value(leaf)`` says whether the leaf set contains the point."""
    if isinstance(formula, Leaf):
        return leaf_value(formula)
    vals = (eval_formula(c, leaf_value) for c in formula.children)
    return all(vals) if formula.op == "AND" else any(vals)


def eval_formula3(formula, leaf_value):
    """Kleene three-valued evaluation; leaf values may be None (unknown)."""
    if isinstance(formula, Leaf):
        return leaf_value(formula)
    vals = [eval_formula3(c, leaf_value) for c in formula.children]
    if formula.op == "AND":
        if any(v is False for v in vals):
            return False
        return True if all(v is True for v in vals) else None
    if any(v is True for v in vals):
        return True
    return False if all(v is False for v in vals) else None


# --- selector polynomial --------------------------------------------------


@dataclass(frozen=True)
class Selector:
    """Expression over sign variables p_1..p_C: AND becomes +, OR becomes *."""

    op: str  # "leaf", "+", "*"
    leaf: Optional[int] = None
    children: tuple = ()

    def evaluate(self, s):
        if self.op == "leaf":
            return s[self.leaf]
        vals = [c.evaluate(s) for c in self.children]
        if self.op == "+":
            return sum(vals, Fraction(0))
        out = Fraction(1)
        for v in vals:
            out *= v
        return out

    def expand(self):
        """Expanded form ``{frozenset of leaf indices: coefficient}``."""
        if self.op == "leaf":
            return {frozenset([self.leaf]): Fraction(1)}
        parts = [c.expand() for c in self.children]
        if self.op == "+":
            out = {}
            for part in parts:
                for k, v in part.items():
                    out[k] = out.get(k, 0) + v
            return out
        out = {frozenset(): Fraction(1)}
        for part in parts:
            nxt = {}
            for k1, v1 in out.items():
                for k2, v2 in part.items():
                    if k1 & k2:
                        raise ValueError("selector factors share a leaf")
                    k = k1 | k2
                    nxt[k] = nxt.get(k, 0) + v1 * v2
            out = nxt
        return out

    def text(self):
        if self.op == "leaf":
            return f"p{self.leaf + 1}"
        inner = self.op.join(c.text() for c in self.children)
        return f"({inner})"


def to_selector(formula):
    if isinstance(formula, Leaf):
        return Selector("leaf", leaf=formula.index)
    op = "+" if formula.op == "AND" else "*"
    return Selector(op, children=tuple(to_selector(c) for c in formula.children))


# --- certificates ---------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    var_names: tuple
    polys: tuple  # ((name, Polynomial), ...)
    formula: Formula
    witness: tuple  # Fractions, or AlgebraicNumbers for an algebraic witness
    mode: str = EQUILIBRIUM
    box: Optional[Fraction] = None
    _poly_map: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_poly_map", dict(self.polys))

    @property
    def n(self):
        return len(self.var_names)

    @property
    def leaves(self):
        return leaves(self.formula)

    @property
    def n_leaves(self):
        return len(self.leaves)

    @property
    def algebraic(self):
        return any(isinstance(z, AlgebraicNumber) for z in self.witness)

    def poly(self, name):
        return self._poly_map[name]

    def leaf_poly(self, leaf):
        return self._poly_map[leaf.name]

    def leaf_polys(self):
        return [self.leaf_poly(leaf) for leaf in self.leaves]

    def degrees(self):
        """Per-variable degree d(i): max exponent of x_i over all formula leaves."""
        degs = [0] * self.n
        for p in self.leaf_polys():
            for i, d in enumerate(p.degrees()):
                degs[i] = max(degs[i], d)
        return tuple(degs)

    def to_text(self):
        lines = ["vars: " + " ".join(self.var_names)]
        if self.mode == PAYOFF:
            lines.append(f"mode: payoff D={_q(self.box)}")
        else:
            lines.append("mode: equilibrium")
        for name, p in self.polys:
            lines.append(f"poly {name}: {p.to_text(self.var_names)}")
        lines.append("formula: " + formula_text(self.formula))
        if self.algebraic:
            for i, z in enumerate(self.witness, 1):
                if not isinstance(z, AlgebraicNumber):
                    z = AlgebraicNumber.rational(z)
                coeffs = ",".join(_q(c) for c in z.poly)
                lines.append(f"witness_alg {i}: R=[{coeffs}] interval=[{_q(z.lo)},{_q(z.hi)}]")
        else:
            lines.append("witness: " + ", ".join(_q(z) for z in self.witness))
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def _q(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def eval_poly(p, x):
    if len(x) != p.n_vars:
        raise ValueError(f"arity mismatch: polynomial has {p.n_vars} variables, point has {len(x)}")
    return p.evaluate([Fraction(v) for v in x])


def membership(cert, x):
    if len(x) != cert.n:
        raise ValueError(f"arity mismatch: certificate has n={cert.n}, point has {len(x)}")
    x = [Fraction(v) for v in x]
    values = {}

    def leaf_value(leaf):
        if leaf.name not in values:
            values[leaf.name] = cert.leaf_poly(leaf).evaluate(x)
        return values[leaf.name] <= 0

    return eval_formula(cert.formula, leaf_value)


def transform_to_unit_box(cert):
    """Equilibrium-mode certificate for {x : -D + 2D x in E}."""
    if cert.mode != PAYOFF:
        raise ValueError("certificate is not in payoff mode")
    D = Fraction(cert.box)
    if D <= 0:
        raise ValueError("box radius D must be positive")
    shifts = [-D] * cert.n
    scales = [2 * D] * cert.n
    polys = tuple((name, p.affine_substitute(shifts, scales)) for name, p in cert.polys)
    if cert.algebraic:
        witness = tuple(
            z.affine_image(Fraction(1, 2), 1 / (2 * D)) if isinstance(z, AlgebraicNumber) else (z + D) / (2 * D)
            for z in cert.witness
        )
    else:
        witness = tuple((z + D) / (2 * D) for z in cert.witness)
    return Certificate(cert.var_names, polys, cert.formula, witness, EQUILIBRIUM, None)


def unit_certificate(cert):
    return transform_to_unit_box(cert) if cert.mode == PAYOFF else cert


# --- witness validation ---------------------------------------------------

CONFIRMED = "CONFIRMED"
REJECTED = "REJECTED"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class WitnessReport:
    status: str
    leaf_signs: tuple  # per leaf: -1, 0, 1 or None
    depth: int
    witness: tuple  # the (validated) witness coordinates

    def to_json(self):
        return {
            "status": self.status,
            "leaf_signs": list(self.leaf_signs),
            "depth": self.depth,
        }


def validate_witness(cert, depth=DEFAULT_DEPTH):
    """Check that the witness lies in E.

    Algebraic coordinates are first re-isolated (squarefree, exactly one root in
    the interval; raises InvalidIsolation otherwise). Leaf signs then come from
    exact remaindering/gcd against the defining polynomial when a single
    irrational coordinate is involved, and from interval bisection otherwise.
    """
    if cert.algebraic:
        point = tuple(
            AlgebraicNumber.isolate(z.poly, z.lo, z.hi) if isinstance(z, AlgebraicNumber) else z
            for z in cert.witness
        )
    else:
        point = cert.witness
    signs = tuple(sign_at(p, point, depth) for p in cert.leaf_polys())

    def leaf_value(leaf):
        s = signs[leaf.index]
        return None if s is None else s <= 0

    verdict = eval_formula3(cert.formula, leaf_value)
    status = {True: CONFIRMED, False: REJECTED, None: UNDECIDED}[verdict]
    return WitnessReport(status, signs, depth, point)


# --- parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _ExprParser:
    def __init__(self, text, names, line, col0):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.n = len(names)
        self.line = line
        self.col0 = col0
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                self.error(f"unexpected character {text[pos:].lstrip()[0]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
            start = m.start(m.lastindex)
            kind = ("num", "name", "op")[m.lastindex - 1]
            tok = m.group(m.lastindex)
            if tok == "**":
                tok = "^"
            self.tokens.append((kind, tok, start))
            pos = m.end()
        self.i = 0

    def error(self, message, pos=None):
        col = None if pos is None else self.col0 + pos + 1
        raise CertificateError(message, self.line, col)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            self.error("empty polynomial expression", 0)
        p = self.expr()
        kind, tok, pos = self.peek()
        if kind is not None:
            self.error(f"unexpected {tok!r}", pos)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.error("division only by a nonzero constant", pos)
                p = p * (1 / q.constant_value())
        return p

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            p = self.unary()
            return -p if op == "-" else p
        return self.power()

    def power(self):
        p = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, tok, pos = self.take()
            if kind != "num":
                self.error("exponent must be a nonnegative integer", pos)
            p = p ** int(tok)
        return p

    def atom(self):
        kind, tok, pos = self.take()
        if kind == "num":
            return Polynomial.constant(self.n, int(tok))
        if kind == "name":
            if tok not in self.names:
                self.error(f"unknown variable {tok!r}", pos)
            return Polynomial.variable(self.n, self.names[tok])
        if tok == "(":
            p = self.expr()
            k2, t2, p2 = self.take()
            if t2 != ")":
                self.error("expected ')'", p2)
            return p
        if kind is None:
            self.error("unexpected end of expression", pos)
        self.error(f"unexpected {tok!r}", pos)


def parse_rational(text, line=None, col=None):
    s = text.strip()
    if not re.fullmatch(r"[-+]?\d+(/\d+)?", s):
        raise CertificateError(f"malformed rational {s!r}", line, col)
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise CertificateError(f"zero denominator in {s!r}", line, col)
    return Fraction(int(num), int(den) if den else 1)


def _parse_formula(text, known, line, col0):
    pos = 0
    counter = [0]

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def err(msg):
        raise CertificateError(msg, line, col0 + pos + 1)

    def node():
        nonlocal pos
        skip()
        m = re.compile(r"[A-Za-z_][A-Za-z_0-9]*").match(text, pos)
        if not m:
            err("expected a polynomial name, AND(...) or OR(...)")
        word = m.group()
        pos = m.end()
        skip()
        if word in ("AND", "OR") and pos < len(text) and text[pos] == "(":
            pos += 1
            kids = [node()]
            skip()
            while pos < len(text) and text[pos] == ",":
                pos += 1
                kids.append(node())
                skip()
            if pos >= len(text) or text[pos] != ")":
                err("expected ')' or ','")
            pos += 1
            if len(kids) < 2:
                err(f"{word} needs at least two operands")
            return Node(word, tuple(kids))
        if word not in known:
            pos = m.start()
            err(f"unknown polynomial {word!r} in formula")
        leaf = Leaf(word, counter[0])
        counter[0] += 1
        return leaf

    f = node()
    skip()
    if pos != len(text):
        err("trailing text after formula")
    return f


def _parse_list(text, line, col):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise CertificateError(f"expected a bracketed list, got {text!r}", line, col)
    inner = text[1:-1].strip()
    if not inner:
        return []
    return [parse_rational(t, line, col) for t in inner.split(",")]


def parse_certificate(text):
    var_names = None
    mode = EQUILIBRIUM
    box = None
    polys = []
    formula_src = None
    witness = None
    witness_line = None
    alg = {}
    alg_lines = {}

    raw_lines = text.splitlines()
    statements = []
    for lineno, raw in enumerate(raw_lines, 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            statements.append((lineno, body))

    # vars first: polynomial parsing needs the variable names
    for lineno, body in statements:
        key = body.split(":", 1)[0].strip()
        if key == "vars":
            if var_names is not None:
                raise CertificateError("duplicate vars line", lineno)
            names = body.split(":", 1)[1].split()
            if not names:
                raise CertificateError("vars line declares no variables", lineno)
            if len(set(names)) != len(names):
                raise CertificateError("duplicate variable name", lineno)
            for name in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                    raise CertificateError(f"bad variable name {name!r}", lineno)
            var_names = tuple(names)
    if var_names is None:
        raise CertificateError("missing 'vars:' line")
    n = len(var_names)

    for lineno, body in statements:
        if ":" not in body:
            raise CertificateError("expected '<keyword>: ...'", lineno, 1)
        head, rest = body.split(":", 1)
        col_rest = len(head) + 2
        head = head.strip()
        if head == "vars":
            continue
        if head == "mode":
            words = rest.split()
            if words == ["equilibrium"]:
                mode = EQUILIBRIUM
            elif len(words) == 2 and words[0] == "payoff" and words[1].startswith("D="):
                mode = PAYOFF
                box = parse_rational(words[1][2:], lineno)
                if box <= 0:
                    raise CertificateError("box radius D must be positive", lineno)
            else:
                raise CertificateError("mode must be 'equilibrium' or 'payoff D=<rational>'", lineno, col_rest)
        elif head.startswith("poly "):
            name = head[5:].strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name in ("AND", "OR"):
                raise CertificateError(f"bad polynomial name {name!r}", lineno)
            if any(name == other for other, _ in polys):
                raise CertificateError(f"duplicate polynomial {name!r}", lineno)
            expr = rest
            m = re.search(r"(<=|>=|<|>|=)", expr)
            if m:
                op = m.group(1)
                if op in ("<", ">"):
                    raise CertificateError("strict inequalities are not supported; use closed '<= 0' sets", lineno, col_rest + m.start())
                tail = expr[m.end():].strip()
                if op != "<=" or tail != "0":
                    raise CertificateError("a polynomial may only be followed by '<= 0'", lineno, col_rest + m.start())
                expr = expr[: m.start()]
            p = _ExprParser(expr, var_names, lineno, col_rest - 1).parse()
            polys.append((name, p))
        elif head == "formula":
            if formula_src is not None:
                raise CertificateError("duplicate formula line", lineno)
            formula_src = (lineno, rest, col_rest - 1)
        elif head == "witness":
            if witness is not None:
                raise CertificateError("duplicate witness line", lineno)
            parts = rest.split(",")
            witness = tuple(parse_rational(t, lineno) for t in parts)
            witness_line = lineno
            if len(witness) != n:
                raise CertificateError(f"witness has {len(witness)} coordinates, expected {n}", lineno)
        elif head.startswith("witness_alg"):
            idx_text = head[len("witness_alg"):].strip()
            if not idx_text.isdigit() or not 1 <= int(idx_text) <= n:
                raise CertificateError(f"witness_alg index must be in 1..{n}", lineno)
            i = int(idx_text)
            if i in alg:
                raise CertificateError(f"duplicate witness_alg for coordinate {i}", lineno)
            m = re.fullmatch(r"\s*R\s*=\s*(\[[^\]]*\])\s+interval\s*=\s*(\[[^\]]*\])\s*", rest)
            if not m:
                raise CertificateError("expected 'R=[c0,...,ck] interval=[lo,hi]'", lineno, col_rest)
            coeffs = _parse_list(m.group(1), lineno, col_rest)
            ends = _parse_list(m.group(2), lineno, col_rest)
            if any(c.denominator != 1 for c in coeffs):
                raise CertificateError("R must have integer coefficients", lineno)
            if len(ends) != 2:
                raise CertificateError("interval needs two endpoints", lineno)
            lo, hi = ends
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            if len(coeffs) < 2:
                raise CertificateError("R must have positive degree", lineno)
            alg[i] = AlgebraicNumber(tuple(coeffs), lo, hi)
            alg_lines[i] = lineno
        else:
            raise CertificateError(f"unknown statement {head!r}", lineno, 1)

    if not polys:
        raise CertificateError("no polynomials declared")
    if formula_src is None:
        raise CertificateError("missing 'formula:' line")
    if witness is not None and alg:
        raise CertificateError("give either 'witness:' or 'witness_alg' lines, not both")
    if witness is None and not alg:
        raise CertificateError("missing witness")
    lineno, src, col0 = formula_src
    formula = _parse_formula(src, {name for name, _ in polys}, lineno, col0)

    if alg:
        missing = [i for i in range(1, n + 1) if i not in alg]
        if missing:
            raise CertificateError(f"witness arity mismatch: no witness_alg for coordinates {missing}")
        for i, a in alg.items():
            if not 0 <= a.lo < a.hi <= 1 and mode == EQUILIBRIUM:
                raise CertificateError(f"isolating interval for coordinate {i} must satisfy 0 <= lo < hi <= 1", alg_lines[i])
            if not a.lo < a.hi:
                raise CertificateError(f"isolating interval for coordinate {i} is empty", alg_lines[i])
        witness = tuple(alg[i] for i in range(1, n + 1))
    else:
        if mode == EQUILIBRIUM and any(not 0 <= z <= 1 for z in witness):
            raise CertificateError("witness outside [0,1]^n", witness_line)
        if mode == PAYOFF and any(abs(z) > box for z in witness):
            raise CertificateError(f"witness outside [-D, D]^n with D={box}", witness_line)
    return Certificate(var_names, tuple(polys), formula, witness, mode, box)
