import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lojex.algebra import (
    AffineMap,
    Jet,
    Poly,
    compose_affine,
    derivative,
    evaluate,
    homogeneous_part,
    leading_form,
    parse_poly,
    partial_derivative,
    taylor_jet,
)
from lojex.algebra.poly import truncate


def P(text, n=2):
    return parse_poly(text, num_vars=n)


# -- strategies ---------------------------------------------------------------

coeff = st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False).map(
    lambda z: complex(round(z.real, 3), round(z.imag, 3)))


@st.composite
def polys(draw, n=2, max_deg=4, max_terms=5):
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        alpha = tuple(draw(st.lists(st.integers(0, max_deg), min_size=n, max_size=n)))
        if sum(alpha) <= max_deg:
            terms[alpha] = draw(coeff)
    return Poly.from_dict(n, terms)


points = st.lists(st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
                  min_size=2, max_size=2).map(np.array)


# -- construction and arithmetic ---------------------------------------------


def test_square_of_sum_has_three_terms():
    p = P("x1 + x2") ** 2
    assert p.as_dict() == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_parabola_vanishes_on_itself():
    assert evaluate(P("x2 - x1^2"), [2, 4]) == 0


def test_zero_polynomial():
    z = Poly.zero(3)
    assert z.is_zero() and z.degree == -1 and z.order == -1
    assert str(z) == "0"


def test_terms_are_merged_and_cancelled():
    assert (P("x1 + x2") - P("x2 + x1")).is_zero()


def test_degree_and_order():
    p = P("x1*x2 + x1^3 + 2")
    assert p.degree == 3 and p.order == 0


def test_partial_derivative_index_error():
    with pytest.raises(IndexError):
        partial_derivative(P("x1"), 2)


def test_mixed_derivative():
    p = P("x1^2*x2^3")
    assert derivative(p, (1, 2)).as_dict() == {(1, 1): 12}


def test_leading_form_and_homogeneous_part():
    p = P("x1*x2 + x1^3")
    r, F = leading_form(p)
    assert r == 2 and F.as_dict() == {(1, 1): 1}
    assert homogeneous_part(p, 3).as_dict() == {(3, 0): 1}
    assert truncate(p, 2) == F
    with pytest.raises(ValueError):
        leading_form(Poly.zero(2))


def test_eval_many_matches_pointwise():
    rng = np.random.default_rng(0)
    p = P("(1+2i)*x1^3*x2 - x2^2 + 0.5")
    X = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
    assert np.allclose(p.eval_many(X), [p(x) for x in X], rtol=1e-13)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), points)
def test_ring_homomorphism(p, q, x):
    assert np.isclose((p * q)(x), p(x) * q(x), rtol=1e-9, atol=1e-9)
    assert np.isclose((p + q)(x), p(x) + q(x), rtol=1e-9, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_product_rule(p, q):
    lhs = partial_derivative(p * q, 0)
    rhs = partial_derivative(p, 0) * q + p * partial_derivative(q, 0)
    assert (lhs - rhs).is_zero() or max(abs(c) for _, c in (lhs - rhs).terms) < 1e-9


@settings(max_examples=60, deadline=None)
@given(polys())
def test_derivatives_commute(p):
    a = partial_derivative(partial_derivative(p, 0), 1)
    b = partial_derivative(partial_derivative(p, 1), 0)
    assert a == b


# -- composition and jets --------------------------------------------------------


def test_compose_with_affine_map():
    p = P("x1 + x2 - x1^2")
    a = AffineMap(np.eye(2), np.zeros(2))
    assert compose_affine(p, a) == p
    shifted = compose_affine(P("x1", 1), AffineMap(np.array([[1.0, 1.0]]), np.array([0.0])))
    assert shifted == P("x1 + x2")


@settings(max_examples=50, deadline=None)
@given(polys(), points, points)
def test_composition_evaluates_pointwise(p, t, shift):
    L = np.array([[1.0, 0.5j], [-0.25, 2.0]])
    a = AffineMap(L, shift)
    assert np.isclose(compose_affine(p, a)(t), p(a(t)), rtol=1e-8, atol=1e-8)


def test_affine_then():
    a = AffineMap(np.array([[2.0]]), np.array([1.0]))
    b = AffineMap(np.array([[3.0]]), np.array([-1.0]))
    assert np.allclose(a.then(b)(np.array([1.0])), b(a(np.array([1.0]))))


def test_jet_at_center_one():
    j = taylor_jet(P("x1^3", 1), [1.0], 2)
    assert j.coefficient((0,)) == 1 and j.coefficient((1,)) == 3 and j.coefficient((2,)) == 3
    assert j.derivative_at_center((2,)) == 6


def test_jet_truncated_product():
    a = Jet.of(P("1 + x1", 1), 2)
    sq = a * a * a
    assert sq.order == 2
    assert sq.to_poly() == P("1 + 3*x1 + 3*x1^2", 1)


def test_first_nonvanishing_respects_tolerance():
    j = Jet.of(P("1e-12*x1 + x1*x2"), 4)
    deg, alpha, c = j.first_nonvanishing(1e-10)
    assert deg == 2 and alpha == (1, 1) and c == 1
    assert Jet.of(Poly.zero(2), 3).first_nonvanishing() is None


def test_jet_rejects_bad_center():
    with pytest.raises(ValueError):
        taylor_jet(P("x1"), [0.0], 2)
