"""Multivariate polynomial algebra in monomial form.

Coefficients are whatever number type is supplied (Fraction for the exact
paths, float for quadrature-driven paths); arithmetic never converts, so a
computation started in rationals stays exact.  Terms map a multi-index
tuple to its coefficient; zero coefficients are never stored.
"""

from fractions import Fraction
from math import factorial

import numpy as np


def grlex_key(alpha):
    return (sum(alpha), alpha)


def monomial_indices(dim, degree):
    """All multi-indices |alpha| <= degree in graded lexicographic order."""
    out = []

    def rec(prefix, remaining_slots, budget):
        if remaining_slots == 1:
            for a in range(budget + 1):
                out.append(prefix + (a,))
            return
        for a in range(budget + 1):
            rec(prefix + (a,), remaining_slots - 1, budget - a)

    rec((), dim, degree)
    out.sort(key=grlex_key)
    return out


class Polynomial:
    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        self.terms = {}
        if terms:
            for alpha, c in terms.items():
                if c != 0:
                    self.terms[tuple(alpha)] = c

    @staticmethod
    def zero(dim):
        return Polynomial(dim)

    @staticmethod
    def constant(dim, c):
        return Polynomial(dim, {(0,) * dim: c})

    @staticmethod
    def variable(dim, i):
        alpha = [0] * dim
        alpha[i] = 1
        return Polynomial(dim, {tuple(alpha): Fraction(1)})

    @staticmethod
    def monomial(dim, alpha, c=Fraction(1)):
        return Polynomial(dim, {tuple(alpha): c})

    @property
    def degree(self):
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            s = terms.get(a, 0) + c
            if s == 0:
                terms.pop(a, None)
            else:
                terms[a] = s
        return Polynomial(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return Polynomial(self.dim)
            return Polynomial(self.dim, {a: c * other for a, c in self.terms.items()})
        terms = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                s = terms.get(key, 0) + ca * cb
                if s == 0:
                    terms.pop(key, None)
                else:
                    terms[key] = s
        return Polynomial(self.dim, terms)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(self.dim, {a: c / scalar for a, c in self.terms.items()})

    def __pow__(self, n):
        result = Polynomial.constant(self.dim, Fraction(1))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return self.terms == {} and other == 0 or \
                self.terms == {(0,) * self.dim: other}
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def diff(self, axis):
        terms = {}
        for a, c in self.terms.items():
            if a[axis] == 0:
                continue
            b = list(a)
            b[axis] -= 1
            terms[tuple(b)] = c * a[axis]
        return Polynomial(self.dim, terms)

    def directional_diff(self, direction):
        """Derivative along an arbitrary (not necessarily unit) vector."""
        out = Polynomial(self.dim)
        for i, li in enumerate(direction):
            if li != 0:
                out = out + self.diff(i) * li
        return out

    def eval(self, point):
        """Evaluate at a point, or vectorized at an (m, dim) float array."""
        if isinstance(point, np.ndarray) and point.ndim == 2:
            vals = np.zeros(point.shape[0])
            for a, c in self.terms.items():
                term = np.full(point.shape[0], float(c))
                for i, ai in enumerate(a):
                    if ai:
                        term *= point[:, i] ** ai
                vals += term
            return vals
        acc = 0
        for a, c in self.terms.items():
            t = c
            for i, ai in enumerate(a):
                if ai:
                    t = t * point[i] ** ai
            acc = acc + t
        return acc

    __call__ = eval

    def compose_affine(self, matrix, offset):
        """p(A t + b) as a polynomial in t.

        `matrix` has self.dim rows; the number of columns sets the dimension
        of the result, so a 3-variable polynomial restricted to a 2-parameter
        facet chart comes out as a 2-variable polynomial.
        """
        nvars = len(matrix[0]) if matrix else 0
        subs = []
        for i in range(self.dim):
            terms = {}
            if offset[i] != 0:
                terms[(0,) * nvars] = offset[i]
            for j in range(nvars):
                if matrix[i][j] != 0:
                    alpha = [0] * nvars
                    alpha[j] = 1
                    terms[tuple(alpha)] = matrix[i][j]
            subs.append(Polynomial(nvars, terms))
        # cache powers of each substitution polynomial
        max_pow = [0] * self.dim
        for a in self.terms:
            for i, ai in enumerate(a):
                max_pow[i] = max(max_pow[i], ai)
        pows = []
        for i in range(self.dim):
            plist = [Polynomial.constant(nvars, Fraction(1))]
            for _ in range(max_pow[i]):
                plist.append(plist[-1] * subs[i])
            pows.append(plist)
        out = Polynomial(nvars)
        for a, c in self.terms.items():
            term = Polynomial.constant(nvars, c)
            for i, ai in enumerate(a):
                if ai:
                    term = term * pows[i][ai]
            out = out + term
        return out

    def map_coeffs(self, fn):
        return Polynomial(self.dim, {a: fn(c) for a, c in self.terms.items()})

    def coeff(self, alpha):
        return self.terms.get(tuple(alpha), Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        names = ["x1", "x2", "x3", "x4"][: self.dim]
        parts = []
        for a, c in self.sorted_terms():
            mono = "*".join(
                f"{names[i]}^{ai}" if ai > 1 else names[i]
                for i, ai in enumerate(a) if ai
            )
            parts.append(f"{c}" if not mono else f"{c}*{mono}")
        return " + ".join(parts)


class VectorPoly:
    """A d-component polynomial field; components share the variable count."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        comps = tuple(comps)
        if len({p.dim for p in comps}) > 1:
            raise ValueError("components must share dimension")
        self.comps = comps

    @staticmethod
    def zero(ncomp, dim):
        return VectorPoly([Polynomial.zero(dim) for _ in range(ncomp)])

    @property
    def ncomp(self):
        return len(self.comps)

    @property
    def dim(self):
        return self.comps[0].dim

    def __getitem__(self, i):
        return self.comps[i]

    def __add__(self, other):
        return VectorPoly([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return VectorPoly([a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, scalar):
        return VectorPoly([p * scalar for p in self.comps])

    __rmul__ = __mul__

    def __neg__(self):
        return VectorPoly([-p for p in self.comps])

    def __eq__(self, other):
        return isinstance(other, VectorPoly) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def dot(self, other):
        """Dot with a constant vector or another VectorPoly -> Polynomial."""
        out = Polynomial(self.dim)
        for i, p in enumerate(self.comps):
            w = other[i] if not isinstance(other, VectorPoly) else other.comps[i]
            out = out + p * w
        return out

    def divergence(self):
        out = Polynomial(self.dim)
        for i, p in enumerate(self.comps):
            out = out + p.diff(i)
        return out

    def diff(self, axis):
        return VectorPoly([p.diff(axis) for p in self.comps])

    def directional_diff(self, direction):
        return VectorPoly([p.directional_diff(direction) for p in self.comps])

    def compose_affine(self, matrix, offset):
        return VectorPoly([p.compose_affine(matrix, offset) for p in self.comps])

    def eval(self, point):
        return tuple(p.eval(point) for p in self.comps)

    def map_coeffs(self, fn):
        return VectorPoly([p.map_coeffs(fn) for p in self.comps])

    def __repr__(self):
        return "(" + ", ".join(repr(p) for p in self.comps) + ")"


def integrate_reference(p):
    """Exact integral over the unit simplex {t_i >= 0, sum t_i <= 1}.

    Uses the monomial formula  int t^alpha = (prod alpha_i!) / (|alpha|+d)!.
    """
    total = Fraction(0)
    d = p.dim
    for a, c in p.terms.items():
        num = 1
        for ai in a:
            num *= factorial(ai)
        total += Fraction(num, factorial(sum(a) + d)) * c
    return total
