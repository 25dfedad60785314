import random
from fractions import Fraction

import numpy as np
import pytest

from bdmlab.bdm import (build_element, commutes_with_piola,
                        structural_lemma_check)
from bdmlab.estimates import random_field, random_mac_simplex
from bdmlab.geometry import (AffineMap, Simplex, reference_simplex,
                             t_bar_simplex)
from bdmlab.polynomials import Polynomial, VectorPoly, integrate_reference
from bdmlab.spaces import basis_pk

F = Fraction


def x(dim, i):
    return Polynomial.variable(dim, i)


# -- DOF counts ---------------------------------------------------------------

def test_dof_counts_triangle_k1():
    for variant in ("nedelec", "bdm_original"):
        el = build_element(reference_simplex(2), 1, variant)
        assert el.ndofs == 6
        assert all(d.__class__.__name__ == "FacetMoment" for d in el.dofs)


def test_dof_counts_tet_k2_nedelec():
    el = build_element(reference_simplex(3), 2, "nedelec")
    facet = sum(d.__class__.__name__ == "FacetMoment" for d in el.dofs)
    assert (facet, el.ndofs - facet) == (24, 6)
    assert el.ndofs == 30


def test_dof_counts_triangle_k2_original():
    el = build_element(reference_simplex(2), 2, "bdm_original")
    labels = [getattr(d, "label", "facet") for d in el.dofs]
    assert labels.count("facet") == 9
    assert labels.count("grad") == 2
    assert labels.count("qk") == 1


def test_order_zero_rejected():
    with pytest.raises(ValueError):
        build_element(reference_simplex(2), 0)


# -- golden interpolants (published values) -----------------------------------

def test_golden_k2_nedelec():
    tri = reference_simplex(2)
    v = VectorPoly([Polynomial.zero(2), x(2, 0) ** 3])
    iv = build_element(tri, 2, "nedelec").interpolate(v)
    assert iv == VectorPoly([
        Polynomial.zero(2),
        F(1, 20) - F(3, 5) * x(2, 0) + F(3, 2) * x(2, 0) ** 2])


def test_golden_k2_original():
    tri = reference_simplex(2)
    x1, x2 = x(2, 0), x(2, 1)
    v = VectorPoly([Polynomial.zero(2), x1 ** 3])
    iv = build_element(tri, 2, "bdm_original").interpolate(v)
    assert iv == VectorPoly([
        F(3, 140) * x1 * (1 - x1 - 2 * x2),
        F(1, 20) - F(3, 5) * x1 + F(3, 2) * x1 ** 2
        - F(3, 140) * x2 * (1 - 2 * x1 - x2)])


@pytest.mark.parametrize("hs", [(1, 1, 1), (2, 3, 5), (F(1, 2), 1, F(7, 3))])
def test_golden_k1_weaker_example_tet(hs):
    h1, h2, h3 = (F(h) for h in hs)
    tet = Simplex(((0, 0, 0), (h1, 0, 0), (0, 0, h3), (0, h2, h3)))
    u = VectorPoly([x(3, 0) * x(3, 2), -x(3, 1) * x(3, 2), Polynomial.zero(3)])
    iu = build_element(tet, 1).interpolate(u)
    assert iu == VectorPoly([
        F(2, 5) * h3 * x(3, 0),
        -F(3, 5) * h3 * x(3, 1),
        h3 * (Polynomial.constant(3, -h3 / 10) + F(1, 5) * x(3, 2))])


@pytest.mark.parametrize("h", [F(1), F(1, 2), F(1, 8)])
def test_golden_k1_tstar(h):
    ts = Simplex(((-1, 0), (1, 0), (0, h)))
    v = VectorPoly([Polynomial.zero(2), x(2, 0) ** 2])
    iv = build_element(ts, 1).interpolate(v)
    assert iv == VectorPoly([x(2, 0) / (2 * h),
                             -x(2, 1) / (2 * h) + F(1, 3)])


# -- structural properties -----------------------------------------------------

def test_projection_property_small():
    rng = random.Random(11)
    for dim, k in [(2, 1), (2, 2), (3, 1)]:
        s = random_mac_simplex(dim, rng)
        el = build_element(s, k)
        for _ in range(3):
            w = random_field(dim, k, rng)
            assert el.interpolate(w) == w


def test_interpolant_reproduces_dof_values():
    rng = random.Random(14)
    s = random_mac_simplex(3, rng)
    el = build_element(s, 2)
    v = random_field(3, 4, rng)
    iv = el.interpolate(v)
    assert el.dof_values(iv) == el.dof_values(v)


def test_variant_agreement_k1():
    rng = random.Random(3)
    s = random_mac_simplex(2, rng)
    v = random_field(2, 3, rng)
    a = build_element(s, 1, "nedelec").interpolate(v)
    b = build_element(s, 1, "bdm_original").interpolate(v)
    assert a == b


def test_facet_flux_preservation_exact():
    rng = random.Random(9)
    s = random_mac_simplex(2, rng)
    el = build_element(s, 2)
    v = random_field(2, 4, rng)
    err = v - el.interpolate(v)
    for i in range(3):
        chart = s.facet_chart(i)
        m = s.scaled_facet_normal(i)
        restricted = err.compose_affine(*chart).dot(m)
        for z in basis_pk(1, 2):
            assert integrate_reference(restricted * z) == 0


def test_divergence_compatibility():
    # div(I v) equals the L2 projection of div v onto P_{k-1}
    from bdmlab.estimates import poly_project
    rng = random.Random(21)
    for dim, k in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        s = random_mac_simplex(dim, rng)
        el = build_element(s, k)
        v = random_field(dim, k + 1, rng)
        lhs = el.interpolate(v).divergence()
        rhs = poly_project(v.divergence(), s, k - 1)
        assert lhs == rhs


def test_interpolant_independent_of_vertex_ordering():
    # relabeling vertices changes the facet charts (hence the DOF values)
    # but only mixes each facet block invertibly
    rng = random.Random(4)
    verts = ((0, 0), (3, 1), (1, 2))
    v = random_field(2, 2, rng)
    base = build_element(Simplex(verts), 2).interpolate(v)
    for perm in [(1, 2, 0), (2, 0, 1), (0, 2, 1)]:
        el = build_element(Simplex(tuple(verts[i] for i in perm)), 2)
        assert el.interpolate(v) == base


def test_quadrature_path_matches_exact_path():
    s = Simplex(((0, 0), (2, 0), (0, 1)))
    el = build_element(s, 2)
    v = random_field(2, 2, random.Random(8))
    exact = el.interpolate(v)
    vf = lambda pts: np.column_stack([p.eval(pts) for p in v.comps])
    approx = el.interpolate(vf, quad_degree=8)
    worst = 0.0
    for pe, pa in zip(exact.comps, approx.comps):
        for alpha in set(pe.terms) | set(pa.terms):
            worst = max(worst, abs(float(pe.coeff(alpha)) - pa.coeff(alpha)))
    assert worst < 1e-11


def test_quadrature_default_degree_for_callables():
    # callables default to a 2k + 4 rule, exact for this quadratic field
    el = build_element(reference_simplex(2), 1)
    v = VectorPoly([x(2, 0) ** 2, x(2, 1)])
    vf = lambda pts: np.column_stack([p.eval(pts) for p in v.comps])
    approx = el.interpolate(vf)
    exact = el.interpolate(v)
    for pe, pa in zip(exact.comps, approx.comps):
        for alpha in set(pe.terms) | set(pa.terms):
            assert abs(float(pe.coeff(alpha)) - pa.coeff(alpha)) < 1e-13


# -- Piola commuting ------------------------------------------------------------

def test_commutes_identity():
    ref = reference_simplex(2)
    amap = AffineMap(((1, 0), (0, 1)), (0, 0))
    el = build_element(ref, 2)
    v = random_field(2, 3, random.Random(2))
    rep = commutes_with_piola(el, el, amap, v)
    assert rep.commutes


@pytest.mark.parametrize("k", [1, 2])
def test_commutes_diagonal_3d(k):
    ref = reference_simplex(3)
    amap = AffineMap(((2, 0, 0), (0, 3, 0), (0, 0, 5)), (0, 0, 0))
    phys = amap.map_simplex(ref)
    el_ref = build_element(ref, k)
    el_phys = build_element(phys, k)
    v = random_field(3, 3, random.Random(6))
    assert commutes_with_piola(el_ref, el_phys, amap, v).commutes


def test_commutes_general_affine_nedelec():
    ref = reference_simplex(2)
    amap = AffineMap(((2, 1), (1, 3)), (1, -2))
    phys = amap.map_simplex(ref)
    v = random_field(2, 3, random.Random(7))
    rep = commutes_with_piola(build_element(ref, 2),
                              build_element(phys, 2), amap, v)
    assert rep.commutes


def test_commutes_original_variant_recorded():
    # the original-DOF variant is recorded, not asserted, under
    # non-axis-aligned maps; the report must carry a finite discrepancy
    ref = reference_simplex(2)
    amap = AffineMap(((2, 1), (1, 3)), (0, 0))
    phys = amap.map_simplex(ref)
    v = random_field(2, 3, random.Random(12))
    rep = commutes_with_piola(build_element(ref, 2, "bdm_original"),
                              build_element(phys, 2, "bdm_original"), amap, v)
    assert rep.max_abs_diff >= 0.0
    assert isinstance(rep.commutes, bool)


def test_commutes_rejects_mismatched_order():
    ref = reference_simplex(2)
    amap = AffineMap(((1, 0), (0, 1)), (0, 0))
    with pytest.raises(ValueError):
        commutes_with_piola(build_element(ref, 1), build_element(ref, 2),
                            amap, random_field(2, 1, random.Random(0)))


# -- structural lemma ------------------------------------------------------------

def test_structural_lemma_published_cases():
    tri = reference_simplex(2)
    el = build_element(tri, 2)
    assert structural_lemma_check(el, 1, Polynomial.monomial(2, (3, 0)))

    tet = reference_simplex(3)
    el3 = build_element(tet, 1)
    assert structural_lemma_check(el3, 0, Polynomial.monomial(3, (0, 1, 1)))

    tbar = t_bar_simplex()
    elb = build_element(tbar, 1)
    assert structural_lemma_check(elb, 2, Polynomial.monomial(3, (1, 1, 0)))


def test_structural_lemma_rejects_wrong_element():
    el = build_element(Simplex(((0, 0), (2, 0), (0, 2))), 1)
    with pytest.raises(ValueError):
        structural_lemma_check(el, 0, Polynomial.monomial(2, (0, 1)))


def test_structural_lemma_rejects_axis_dependence():
    el = build_element(reference_simplex(2), 1)
    with pytest.raises(ValueError):
        structural_lemma_check(el, 0, Polynomial.monomial(2, (1, 0)))


def test_structural_lemma_fails_for_original_variant_k2():
    # the published example: the original DOFs break the structure
    el = build_element(reference_simplex(2), 2, "bdm_original")
    with pytest.raises(ValueError):
        structural_lemma_check(el, 1, Polynomial.monomial(2, (3, 0)))
