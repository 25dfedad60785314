from fractions import Fraction

import numpy as np
import pytest

from bdmlab.polynomials import (Polynomial, VectorPoly, integrate_reference,
                                monomial_indices)

F = Fraction
x1 = Polynomial.variable(2, 0)
x2 = Polynomial.variable(2, 1)


def test_monomial_indices_counts():
    assert len(monomial_indices(2, 1)) == 3
    assert len(monomial_indices(3, 2)) == 10
    assert len(monomial_indices(3, 4)) == 35


def test_arithmetic_stays_rational():
    p = (x1 + 2 * x2) * (x1 - F(1, 3))
    assert all(isinstance(c, Fraction) for c in p.terms.values())
    assert p.coeff((1, 0)) == -F(1, 3)
    assert p.coeff((2, 0)) == 1
    assert p.coeff((1, 1)) == 2


def test_zero_terms_dropped():
    p = x1 - x1
    assert p.is_zero()
    assert (x1 * 0).terms == {}


def test_diff():
    p = x1 ** 2
    assert p.diff(0) == 2 * x1
    assert p.diff(1).is_zero()


def test_directional_derivative():
    # along (1,1)/sqrt(2): d(x1 x2) = (x1 + x2)/sqrt(2); keep it rational by
    # checking sqrt(2) * result
    p = x1 * x2
    d = p.directional_diff((F(1), F(1)))
    assert d == x1 + x2


def test_divergence_of_paper_field():
    X = [Polynomial.variable(3, i) for i in range(3)]
    u = VectorPoly([X[0] * X[2], -X[1] * X[2], Polynomial.zero(3)])
    assert u.divergence().is_zero()


def test_pow():
    assert (x1 + x2) ** 2 == x1 ** 2 + 2 * x1 * x2 + x2 ** 2


def test_compose_affine_square():
    p = x1 ** 2 + x2
    # substitute x = (t2, t1 + 1)
    q = p.compose_affine([[0, 1], [1, 0]], [0, 1])
    t1 = Polynomial.variable(2, 0)
    t2 = Polynomial.variable(2, 1)
    assert q == t2 ** 2 + t1 + 1


def test_compose_affine_changes_dimension():
    p3 = Polynomial.monomial(3, (1, 1, 0))
    # restrict to the line x = (t, 1 - t, 0)
    q = p3.compose_affine([[1], [-1], [0]], [0, 1, 0])
    assert q.dim == 1
    t = Polynomial.variable(1, 0)
    assert q == t * (1 - t)


def test_eval_scalar_and_vectorized():
    p = 2 * x1 ** 2 + x2
    assert p.eval((F(1, 2), F(3))) == F(7, 2)
    pts = np.array([[0.5, 3.0], [1.0, 0.0]])
    np.testing.assert_allclose(p.eval(pts), [3.5, 2.0])


def test_integrate_reference_monomials():
    assert integrate_reference(Polynomial.constant(2, F(1))) == F(1, 2)
    assert integrate_reference(x1) == F(1, 6)
    assert integrate_reference(x1 * x2) == F(1, 24)
    p3 = Polynomial.monomial(3, (1, 1, 1))
    assert integrate_reference(p3) == F(1, 720)


def test_vectorpoly_dot_and_eval():
    v = VectorPoly([x1, x2])
    assert v.dot((F(2), F(3))) == 2 * x1 + 3 * x2
    assert v.dot(v) == x1 ** 2 + x2 ** 2
    assert v.eval((F(1), F(2))) == (1, 2)


def test_vectorpoly_dim_mismatch():
    with pytest.raises(ValueError):
        VectorPoly([x1, Polynomial.variable(3, 0)])
