"""Bases for the polynomial spaces behind the interpolation operator, and
exact integration of polynomials over simplices.

The constrained spaces (divergence-free with vanishing normal trace, and
the p . x == 0 space) are computed literally as nullspaces of their
defining linear constraints over exact rationals.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .polynomials import (Polynomial, VectorPoly, integrate_reference,
                          monomial_indices)


@dataclass(frozen=True)
class SpaceBasis:
    kind: str
    order: int
    members: tuple

    @property
    def dim(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def integrate_poly(p: Polynomial, simplex):
    """Exact integral of a polynomial over a simplex (affine pullback to the
    reference simplex and the monomial factorial formula)."""
    A, b = simplex.chart()
    composed = p.compose_affine(A, b)
    det = simplex.edge_det()
    return integrate_reference(composed) * abs(det)


def integrate_dot(v: VectorPoly, w: VectorPoly, simplex):
    """Exact integral of v . w over a simplex."""
    return integrate_poly(v.dot(w), simplex)


def basis_pk(dim, k):
    """Monomial basis of scalar P_k in graded lexicographic order."""
    if k < 0:
        return SpaceBasis("Pk", k, ())
    members = tuple(Polynomial.monomial(dim, a) for a in monomial_indices(dim, k))
    return SpaceBasis("Pk", k, members)


def basis_pk_vector(dim, k):
    """Component-major vector monomial basis of P_k^d."""
    if k < 0:
        return SpaceBasis("Pk_vec", k, ())
    members = []
    scalars = monomial_indices(dim, k)
    for comp in range(dim):
        for a in scalars:
            comps = [Polynomial.zero(dim) for _ in range(dim)]
            comps[comp] = Polynomial.monomial(dim, a)
            members.append(VectorPoly(comps))
    return SpaceBasis("Pk_vec", k, tuple(members))


def _vector_unknowns(dim, k):
    return [(comp, a) for comp in range(dim) for a in monomial_indices(dim, k)]


def _vectors_to_fields(vectors, unknowns, dim):
    fields = []
    for vec in vectors:
        comps = [Polynomial.zero(dim) for _ in range(dim)]
        for x, (comp, a) in zip(vec, unknowns):
            if x != 0:
                comps[comp] = comps[comp] + Polynomial.monomial(dim, a, x)
        fields.append(VectorPoly(comps))
    return fields


def basis_sk(dim, k):
    """Basis of {p in P_k^d : p . x == 0}, via an exact nullspace."""
    if k < 0:
        return SpaceBasis("Sk", k, ())
    unknowns = _vector_unknowns(dim, k)
    rows_index = {a: r for r, a in enumerate(monomial_indices(dim, k + 1))}
    matrix = [[Fraction(0)] * len(unknowns) for _ in rows_index]
    for col, (comp, a) in enumerate(unknowns):
        target = list(a)
        target[comp] += 1
        matrix[rows_index[tuple(target)]][col] = Fraction(1)
    null = linalg.nullspace(matrix, ncols=len(unknowns))
    return SpaceBasis("Sk", k, tuple(_vectors_to_fields(null, unknowns, dim)))


def basis_nk(dim, k):
    """Basis of P_{k-1}^d + S_k: concatenation reduced to a maximal
    independent subset (the two spans overlap below the top degree)."""
    if k <= 0:
        return SpaceBasis("Nk", k, ())
    candidates = list(basis_pk_vector(dim, k - 1)) + list(basis_sk(dim, k))
    unknowns = _vector_unknowns(dim, k)
    col_of = {ua: i for i, ua in enumerate(unknowns)}
    kept = []
    echelon = {}  # pivot column -> normalized row
    for cand in candidates:
        vec = [Fraction(0)] * len(unknowns)
        for comp, poly in enumerate(cand.comps):
            for a, c in poly.terms.items():
                vec[col_of[(comp, a)]] = Fraction(c)
        for piv, row in echelon.items():
            if vec[piv] != 0:
                f = vec[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
        piv = next((i for i, x in enumerate(vec) if x != 0), None)
        if piv is None:
            continue
        f = vec[piv]
        echelon[piv] = [x / f for x in vec]
        kept.append(cand)
    return SpaceBasis("Nk", k, tuple(kept))


def basis_qk(simplex, k):
    """Basis of {z in P_k^d : div z = 0, z . n = 0 on every facet}."""
    if k < 1:
        return SpaceBasis("Qk", k, ())
    dim = simplex.dim
    unknowns = _vector_unknowns(dim, k)
    rows = []
    # divergence coefficients vanish
    div_index = {a: r for r, a in enumerate(monomial_indices(dim, k - 1))}
    div_rows = [[Fraction(0)] * len(unknowns) for _ in div_index]
    for col, (comp, a) in enumerate(unknowns):
        if a[comp] > 0:
            b = list(a)
            b[comp] -= 1
            div_rows[div_index[tuple(b)]][col] = Fraction(a[comp])
    rows.extend(div_rows)
    # normal trace vanishes identically on each facet (in the facet chart)
    for i in range(dim + 1):
        matrix, origin = simplex.facet_chart(i)
        m = simplex.scaled_facet_normal(i)
        facet_index = {a: r for r, a in enumerate(monomial_indices(dim - 1, k))}
        facet_rows = [[Fraction(0)] * len(unknowns) for _ in facet_index]
        composed_cache = {}
        for col, (comp, a) in enumerate(unknowns):
            if m[comp] == 0:
                continue
            if a not in composed_cache:
                composed_cache[a] = Polynomial.monomial(dim, a).compose_affine(
                    matrix, origin)
            for ta, tc in composed_cache[a].terms.items():
                facet_rows[facet_index[ta]][col] += tc * m[comp]
        rows.extend(facet_rows)
    null = linalg.nullspace(rows, ncols=len(unknowns))
    return SpaceBasis("Qk", k, tuple(_vectors_to_fields(null, unknowns, dim)))


def facet_polynomial_count(dim, k):
    """dim P_k on a (d-1)-simplex facet."""
    return len(monomial_indices(dim - 1, k))
