import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lojex.algebra import AffineMap, Poly, compose_affine, leading_form, parse_poly
from lojex.tangency import (
    exponent_lower_bound,
    generic_line_order,
    line_vanishing_order,
    order_of_tangency,
)


def P(text, n=1):
    return parse_poly(text, num_vars=n)


def test_parabola_against_line():
    r = order_of_tangency([P("x1^2")], [P("0")], K=12)
    assert (r.s_prime, r.s, r.witness_alpha) == (2, 1, (2,))
    assert r.witness_modulus == 1.0


def test_identical_graphs_exceed_truncation():
    r = order_of_tangency([P("x1^2")], [P("x1^2")], K=12)
    assert r.s_prime is None and r.s is None and r.exceeds_K


def test_two_parameter_witness():
    r = order_of_tangency([P("x1*x2 + x1^3", 2)], [P("x1^3", 2)], K=12)
    assert (r.s_prime, r.s, r.witness_alpha) == (2, 1, (1, 1))


def test_several_components_take_the_minimum():
    r = order_of_tangency([P("x1^4"), P("x1^3")], [P("0"), P("0")])
    assert r.s_prime == 3 and r.witness_component == 1


def test_recentred_jets():
    # (u - 1)^3 vanishes to order 3 at u = 1
    r = order_of_tangency([P("x1^3 - 3*x1^2 + 3*x1")], [P("1")], center=[1.0])
    assert r.s_prime == 3


def test_tolerance_hides_tiny_coefficients():
    r = order_of_tangency([P("1e-12*x1 + x1^2")], [P("0")])
    assert r.s_prime == 2
    assert r.witness_modulus > 1e-10


def test_shape_errors():
    with pytest.raises(ValueError):
        order_of_tangency([P("x1")], [P("x1"), P("0")])
    with pytest.raises(ValueError):
        order_of_tangency([P("x1")], [P("x1", 2)])
    with pytest.raises(ValueError):
        order_of_tangency([P("x1")], [P("0")], K=0)


def test_report_json():
    rec = json.loads(json.dumps(order_of_tangency([P("x1^2")], [P("0")]).to_json()))
    assert rec == {"K": 12, "s_prime": 2, "s": 1, "witness_alpha": [2], "witness_modulus": 1.0}
    rec = order_of_tangency([P("x1")], [P("x1")], K=5).to_json()
    assert rec["s_prime"] is None and rec["s"] is None


def test_exponent_lower_bounds():
    assert exponent_lower_bound(order_of_tangency([P("x1^2")], [P("0")])).value == 2
    assert exponent_lower_bound(order_of_tangency([P("x1")], [P("0")])).value == 1
    b = exponent_lower_bound(order_of_tangency([P("x1")], [P("x1")], K=12))
    assert b.unbounded and b.floor == 13 and b.to_json()["value"] == "unbounded"


def test_line_orders():
    assert line_vanishing_order(P("x2 - x1^2", 2), [1, 1]) == 1
    assert line_vanishing_order(P("x1^2", 2), [0, 1]) is None
    assert line_vanishing_order(P("x1^2", 2), [1, 0]) == 2
    with pytest.raises(ValueError):
        line_vanishing_order(P("x1", 2), [0, 0])


def test_generic_line_orders():
    assert generic_line_order(P("x1*x2 + x1^3", 2), trials=5) == 2
    assert generic_line_order(P("x1^2"), trials=5) == 2
    assert generic_line_order(P("3", 2), trials=5) == 0
    with pytest.raises(ValueError):
        generic_line_order(Poly.zero(2))
    with pytest.raises(ValueError):
        generic_line_order(P("x1"), trials=2)


# -- properties -----------------------------------------------------------------

coeff = st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False, allow_infinity=False)


@st.composite
def polys(draw, n=None, max_deg=6):
    n = draw(st.integers(1, 3)) if n is None else n
    terms = draw(st.dictionaries(
        st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple).filter(lambda a: sum(a) <= max_deg),
        coeff, min_size=1, max_size=5))
    return Poly.from_dict(n, terms)


@settings(max_examples=50, deadline=None)
@given(polys(n=2), polys(n=2))
def test_symmetry(f, g):
    assert order_of_tangency([f], [g]).s_prime == order_of_tangency([g], [f]).s_prime


@settings(max_examples=50, deadline=None)
@given(polys(n=2), polys(n=2), st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_translation_covariance(f, g, shift):
    shift = np.array(shift)
    move = AffineMap(np.eye(2), shift)
    a = order_of_tangency([f], [g], center=shift)
    b = order_of_tangency([compose_affine(f, move)], [compose_affine(g, move)], center=np.zeros(2))
    assert a.s_prime == b.s_prime


@settings(max_examples=50, deadline=None)
@given(polys(n=2), polys(n=2))
def test_agrees_with_leading_form(f, g):
    h = f - g
    r = order_of_tangency([f], [g])
    if h.is_zero():
        assert r.s_prime is None
    else:
        assert r.s_prime == leading_form(h)[0]


@settings(max_examples=50, deadline=None)
@given(polys(), st.integers(0, 2**31))
def test_generic_line_order_is_leading_degree(p, seed):
    assert generic_line_order(p, trials=5, seed=seed) == leading_form(p)[0]
