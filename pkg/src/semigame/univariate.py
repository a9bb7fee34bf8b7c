"""Dense univariate polynomials over Q and Sturm-sequence root counting.

A polynomial is a tuple of coefficients, constant term first, with trailing
zeros stripped; ``()`` is the zero polynomial.
"""

from fractions import Fraction
from math import gcd as _igcd


def trim(coeffs):
    c = [Fraction(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(p):
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def neg(p):
    return tuple(-a for a in p)


def sub(p, q):
    return add(p, neg(q))


def scale(p, c):
    return trim(a * c for a in p)


def mul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def evaluate(p, x):
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * x + a
    return acc


def sign_at(p, x):
    v = evaluate(p, x)
    return (v > 0) - (v < 0)


def derivative(p):
    return trim(i * p[i] for i in range(1, len(p)))


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        c = rem[-1] / lead
        quot[shift] = c
        for j, b in enumerate(q):
            rem[shift + j] -= c * b
        rem = list(trim(rem))
    return trim(quot), trim(rem)


def rem(p, q):
    return divmod_poly(p, q)[1]


def monic(p):
    return scale(p, 1 / p[-1]) if p else ()


def gcd(p, q):
    """Monic gcd (``()`` when both inputs are zero)."""
    p, q = trim(p), trim(q)
    while q:
        p, q = q, rem(p, q)
    return monic(p)


def is_squarefree(p):
    return degree(gcd(p, derivative(p))) <= 0


def compose_affine(p, a, b):
    """Return p(a + b*x)."""
    out = ()
    base = (Fraction(1),)
    lin = trim((a, b))
    for c in p:
        out = add(out, scale(base, c))
        base = mul(base, lin)
    return out


def primitive_integer(p):
    """Scale p to coprime integer coefficients with the same sign pattern."""
    if not p:
        return ()
    den = 1
    for a in p:
        den = den * a.denominator // _igcd(den, a.denominator)
    ints = [int(a * den) for a in p]
    g = 0
    for a in ints:
        g = _igcd(g, a)
    return tuple(Fraction(a // g) for a in ints)


def sturm_chain(p):
    chain = [trim(p), derivative(trim(p))]
    while chain[-1]:
        r = rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(neg(r))
    return [c for c in chain if c]


def _variations(chain, x):
    signs = [s for s in (sign_at(c, x) for c in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _deflate(p, x):
    # strip every factor (X - x) so that x is no longer a root
    lin = (Fraction(-x), Fraction(1))
    while p and evaluate(p, x) == 0:
        p, _ = divmod_poly(p, lin)
    return p


def count_roots_open(p, lo, hi):
    """Number of distinct real roots of p in the open interval (lo, hi)."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial has infinitely many roots")
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        return 0
    p = _deflate(_deflate(p, lo), hi)
    if degree(p) <= 0:
        return 0
    chain = sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def count_roots_closed(p, lo, hi):
    p = trim(p)
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        return 0
    if lo == hi:
        return int(evaluate(p, lo) == 0)
    return count_roots_open(p, lo, hi) + (evaluate(p, lo) == 0) + (evaluate(p, hi) == 0)


def refine_root(p, lo, hi):
    """One bisection step on an interval holding exactly one root of p."""
    lo, hi = Fraction(lo), Fraction(hi)
    mid = (lo + hi) / 2
    if evaluate(p, mid) == 0:
        return mid, mid
    if count_roots_closed(p, lo, mid) >= 1:
        return lo, mid
    return mid, hi


def format_poly(p, var="x"):
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out
