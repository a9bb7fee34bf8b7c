"""Sparse multivariate polynomials with exact rational coefficients."""

from fractions import Fraction

from . import univariate as up


class Polynomial:
    """Polynomial in ``n_vars`` variables stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("n_vars", "terms", "_hash")

    def __init__(self, n_vars, terms=None):
        if n_vars < 1:
            raise ValueError("a polynomial needs at least one variable")
        self.n_vars = n_vars
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {n_vars} variables")
            coef = Fraction(coef)
            if coef:
                clean[exps] = clean.get(exps, Fraction(0)) + coef
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def constant(cls, n_vars, c):
        return cls(n_vars, {(0,) * n_vars: c})

    @classmethod
    def variable(cls, n_vars, i):
        exps = [0] * n_vars
        exps[i] = 1
        return cls(n_vars, {tuple(exps): 1})

    @classmethod
    def from_univariate(cls, coeffs, n_vars=1, var=0):
        terms = {}
        for k, c in enumerate(coeffs):
            exps = [0] * n_vars
            exps[var] = k
            terms[tuple(exps)] = c
        return cls(n_vars, terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.n_vars, Fraction(0))

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=0)

    def degrees(self):
        return tuple(self.degree_in(i) for i in range(self.n_vars))

    def variables(self):
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def _check(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n_vars, other)
        if other.n_vars != self.n_vars:
            raise ValueError("polynomials over different variable counts")
        return other

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.n_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial(self.n_vars, {e: v * c for e, v in self.terms.items()})
        other = self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.n_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n_vars == other.n_vars and self.terms == other.terms
        try:
            return self == Polynomial.constant(self.n_vars, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, frozenset(self.terms.items())))
        return self._hash

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Exact value at the point ``x`` (any ring supporting +, *, ** with ints)."""
        if len(x) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} coordinates, got {len(x)}")
        total = Fraction(0)
        for exps, coef in self.terms.items():
            term = coef
            for xi, e in zip(x, exps):
                if e:
                    term = term * xi ** e
            total = total + term
        return total

    def substitute(self, i, poly):
        """Replace variable i by ``poly`` (a Polynomial over the same variables)."""
        out = Polynomial(self.n_vars)
        powers = {}
        for exps, coef in self.terms.items():
            k = exps[i]
            if k not in powers:
                powers[k] = poly ** k
            rest = list(exps)
            rest[i] = 0
            out = out + Polynomial(self.n_vars, {tuple(rest): coef}) * powers[k]
        return out

    def affine_substitute(self, shifts, scales):
        """Compose with x_i -> shifts[i] + scales[i]*x_i for every variable."""
        out = self
        for i in range(self.n_vars):
            lin = Polynomial.constant(self.n_vars, shifts[i]) + Polynomial.variable(self.n_vars, i) * scales[i]
            out = out.substitute(i, lin)
        return out

    def specialize(self, values):
        """Fix some variables. ``values`` maps index -> rational; degrees are kept in place."""
        terms = {}
        for exps, coef in self.terms.items():
            c = coef
            e = list(exps)
            for i, v in values.items():
                if e[i]:
                    c *= Fraction(v) ** e[i]
                    e[i] = 0
            key = tuple(e)
            terms[key] = terms.get(key, 0) + c
        return Polynomial(self.n_vars, terms)

    def univariate(self, i):
        """Coefficient list in variable i; all other variables must be absent."""
        if self.variables() - {i}:
            raise ValueError("polynomial depends on more than one variable")
        coeffs = [Fraction(0)] * (self.degree_in(i) + 1)
        for exps, coef in self.terms.items():
            coeffs[exps[i]] += coef
        return up.trim(coeffs)

    def reduce_mod(self, i, modulus):
        """Reduce powers of variable i modulo the univariate ``modulus``."""
        modulus = up.trim(modulus)
        deg = up.degree(modulus)
        if deg < 1:
            raise ValueError("modulus must have positive degree")
        table = {}

        def power(k):
            if k not in table:
                if k < deg:
                    table[k] = up.trim([0] * k + [1])
                else:
                    table[k] = up.rem(up.mul(power(k - 1), (Fraction(0), Fraction(1))), modulus)
            return table[k]

        terms = {}
        for exps, coef in self.terms.items():
            if exps[i] < deg:
                terms[exps] = terms.get(exps, 0) + coef
                continue
            for j, c in enumerate(power(exps[i])):
                e = list(exps)
                e[i] = j
                key = tuple(e)
                terms[key] = terms.get(key, 0) + coef * c
        return Polynomial(self.n_vars, terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def to_text(self, names=None):
        names = names or [f"x{i + 1}" for i in range(self.n_vars)]
        if not self.terms:
            return "0"
        pieces = []
        for exps, coef in self.sorted_terms():
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coef)
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            pieces.append(("-" if coef < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"
