"""Component-count bounds and the d^n lower-bound instance family."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .certificate import EQUILIBRIUM, Certificate, Leaf
from .polynomial import Polynomial


def coste_bound(D, r, s):
    """(2D - 1) * D^(r + s - 1): components of a set cut out by s inequalities of degree D in r variables."""
    if D < 2:
        raise ValueError("degree D must be at least 2")
    if r < 1 or s < 1:
        raise ValueError("r and s must be positive")
    return (2 * D - 1) * D ** (r + s - 1)


@dataclass(frozen=True)
class ComponentsBound:
    N: int
    bound: int  # 2 N^(7N)
    sharper: Optional[int]  # (2N - 3)(N - 1)^(7N - 1), N >= 3

    def to_json(self):
        return {"N": self.N, "bound": str(self.bound), "sharper": None if self.sharper is None else str(self.sharper)}


def equilibrium_components_bound(N):
    if N < 1:
        raise ValueError("N must be positive")
    bound = 2 * N ** (7 * N)
    sharper = None
    if N >= 3:
        sharper = coste_bound(N - 1, N, 6 * N)
        assert sharper < bound
    return ComponentsBound(N, bound, sharper)


@dataclass(frozen=True)
class LowerBound:
    value: str  # decimal, rounded toward zero to ``digits`` places
    lower: float
    upper: float
    exact: bool = False

    def to_json(self):
        return {"value": self.value, "lower": self.lower, "upper": self.upper, "exact": self.exact}


def min_players_lower_bound(n, d, digits=12):
    """n ln d / (7 ln(n ln d)), enclosed by interval arithmetic and rounded down."""
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    iv = mpmath.iv
    with mpmath.workdps(digits + 20):
        iv.dps = digits + 20
        nl = iv.mpf(n) * iv.log(iv.mpf(d))
        if not nl.a > 1:
            raise ValueError("need n ln d > 1")
        q = nl / (7 * iv.log(nl))
        lo, hi = mpmath.mpf(q.a), mpmath.mpf(q.b)
        scale = mpmath.mpf(10) ** digits
        floor_lo = mpmath.floor(lo * scale)
    num = int(floor_lo)
    text = f"{num // 10**digits}.{num % 10**digits:0{digits}d}"
    return LowerBound(text, float(lo), float(hi))


def gen_lower_bound_instance(n, d, alphas):
    """Certificate for {x : sum_i prod_j (x_i - alpha_j)^2 <= 0}, a set of d^n points."""
    alphas = [Fraction(a) for a in alphas]
    if len(alphas) != d:
        raise ValueError(f"expected {d} alphas, got {len(alphas)}")
    if len(set(alphas)) != d:
        raise ValueError("alphas must be distinct")
    if any(not 0 <= a <= 1 for a in alphas):
        raise ValueError("alphas must lie in [0,1]")
    if n < 1:
        raise ValueError("n must be positive")
    P = Polynomial(n)
    for i in range(n):
        x = Polynomial.variable(n, i)
        f = Polynomial.constant(n, 1)
        for a in alphas:
            f = f * (x - a) ** 2
        P = P + f
    names = tuple(f"x{i + 1}" for i in range(n))
    return Certificate(names, (("P", P),), Leaf("P", 0), tuple([alphas[0]] * n), EQUILIBRIUM, None)


@dataclass(frozen=True)
class BoundReport:
    N: int
    coste: Optional[int]
    eq_components: int
    min_players: Optional[LowerBound]
    instance_cardinality: Optional[int]

    def to_json(self):
        return {
            "N": self.N,
            "coste": None if self.coste is None else str(self.coste),
            "eq_components": str(self.eq_components),
            "min_players": None if self.min_players is None else self.min_players.to_json(),
            "instance_cardinality": self.instance_cardinality,
            "note": "components are not counted; for finite sets the cardinality stands in for the component count",
        }


def bound_report(N, n, d, cardinality=None):
    """Bounds for a compiled game with N players whose set lives in n variables of degree d."""
    comps = equilibrium_components_bound(N)
    coste = comps.sharper
    try:
        lb = min_players_lower_bound(n, d)
    except ValueError:
        lb = None
    return BoundReport(N, coste, comps.bound, lb, cardinality)
