"""Real algebraic numbers as (polynomial, isolating interval) and exact sign decisions."""

from dataclasses import dataclass
from fractions import Fraction

from . import univariate as up

DEFAULT_DEPTH = 64


class InvalidIsolation(ValueError):
    """The interval does not isolate exactly one simple root of the polynomial."""


@dataclass(frozen=True)
class AlgebraicNumber:
    poly: tuple
    lo: Fraction
    hi: Fraction

    @classmethod
    def isolate(cls, coeffs, lo, hi):
        poly = up.trim(coeffs)
        lo, hi = Fraction(lo), Fraction(hi)
        if not poly or up.degree(poly) < 1:
            raise InvalidIsolation("defining polynomial must have positive degree")
        if lo > hi:
            raise InvalidIsolation(f"empty interval [{lo}, {hi}]")
        if not up.is_squarefree(poly):
            raise InvalidIsolation(f"{up.format_poly(poly, 'X')} is not squarefree")
        count = up.count_roots_closed(poly, lo, hi)
        if count != 1:
            raise InvalidIsolation(
                f"{up.format_poly(poly, 'X')} has {count} roots in [{lo}, {hi}], expected exactly 1"
            )
        return cls(poly, lo, hi)

    @classmethod
    def rational(cls, r):
        r = Fraction(r)
        return cls((-r, Fraction(1)), r, r)

    @property
    def width(self):
        return self.hi - self.lo

    def exact_value(self):
        """The rational value if the interval has collapsed or an endpoint is the root."""
        if self.lo == self.hi:
            return self.lo
        if up.degree(self.poly) == 1:
            return -self.poly[0] / self.poly[1]
        return None

    def bisect(self):
        lo, hi = up.refine_root(self.poly, self.lo, self.hi)
        return AlgebraicNumber(self.poly, lo, hi)

    def refine_to(self, width):
        a = self
        while a.hi - a.lo > width:
            a = a.bisect()
        return a

    def equals_rational(self, r):
        r = Fraction(r)
        return self.lo <= r <= self.hi and up.evaluate(self.poly, r) == 0

    def compare(self, r, max_steps=10_000):
        """Return -1, 0, 1 for self <, ==, > r (exact)."""
        r = Fraction(r)
        if self.equals_rational(r):
            return 0
        a = self
        for _ in range(max_steps):
            if a.hi < r:
                return -1
            if a.lo > r:
                return 1
            a = a.bisect()
        raise RuntimeError("comparison did not terminate")

    def separate_from(self, r):
        """Refine until the interval excludes the rational r (which must differ)."""
        r = Fraction(r)
        if self.equals_rational(r):
            raise ValueError("value equals the rational")
        a = self
        while a.lo <= r <= a.hi:
            a = a.bisect()
        return a

    def affine_image(self, shift, factor):
        """shift + factor*self, as an algebraic number."""
        shift, factor = Fraction(shift), Fraction(factor)
        if factor == 0:
            return AlgebraicNumber.rational(shift)
        # y = shift + factor*x  <=>  x = (y - shift)/factor
        poly = up.primitive_integer(up.compose_affine(self.poly, -shift / factor, 1 / factor))
        ends = sorted((shift + factor * self.lo, shift + factor * self.hi))
        return AlgebraicNumber(poly, ends[0], ends[1])

    def to_json(self):
        return {
            "poly": [_q(c) for c in self.poly],
            "interval": [_q(self.lo), _q(self.hi)],
        }

    def __str__(self):
        return f"root of {up.format_poly(self.poly, 'X')} in [{self.lo}, {self.hi}]"


def _q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __add__(self, other):
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other):
        prods = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(prods), max(prods))

    def scale(self, c):
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b))

    def power(self, k):
        if k == 0:
            return Interval(Fraction(1), Fraction(1))
        a, b = self.lo ** k, self.hi ** k
        if k % 2 == 0 and self.lo <= 0 <= self.hi:
            return Interval(Fraction(0), max(a, b))
        return Interval(min(a, b), max(a, b))

    def sign(self):
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    @property
    def width(self):
        return self.hi - self.lo


def interval_eval(poly, box):
    total = Interval(Fraction(0), Fraction(0))
    for exps, coef in poly.terms.items():
        term = Interval(Fraction(1), Fraction(1))
        for iv, e in zip(box, exps):
            if e:
                term = term * iv.power(e)
        total = total + term.scale(coef)
    return total


def _as_algebraic(v):
    return v if isinstance(v, AlgebraicNumber) else None


def sign_at(poly, point, depth=DEFAULT_DEPTH):
    """Exact sign of ``poly`` at a point whose coordinates are rationals or AlgebraicNumbers.

    Returns -1, 0 or 1, or None when interval refinement fails to decide within
    ``depth`` bisections (only possible with several irrational coordinates).
    """
    rational = {}
    algebraic = {}
    for i, v in enumerate(point):
        a = _as_algebraic(v)
        if a is None:
            rational[i] = Fraction(v)
        elif a.exact_value() is not None:
            rational[i] = a.exact_value()
        else:
            algebraic[i] = a
    p = poly.specialize(rational) if rational else poly
    for i, a in algebraic.items():
        if p.degree_in(i) >= up.degree(a.poly):
            p = p.reduce_mod(i, a.poly)
    live = p.variables()
    if not live:
        c = p.constant_value()
        return (c > 0) - (c < 0)
    if len(live) == 1:
        (i,) = live
        a = algebraic[i]
        f = p.univariate(i)
        g = up.gcd(f, a.poly)
        if up.degree(g) >= 1 and up.count_roots_closed(g, a.lo, a.hi) >= 1:
            return 0
        while up.count_roots_closed(f, a.lo, a.hi):
            a = a.bisect()
        return up.sign_at(f, (a.lo + a.hi) / 2)
    box = {i: a for i, a in algebraic.items()}
    for _ in range(depth + 1):
        ivs = [Interval(Fraction(0), Fraction(0))] * poly.n_vars
        for i, a in box.items():
            ivs[i] = Interval(a.lo, a.hi)
        s = interval_eval(p, ivs).sign()
        if s is not None and s != 0:
            return s
        box = {i: a.bisect() for i, a in box.items()}
    return None
