import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lojex.algebra import parse_poly
from lojex.geometry import Hyperplane, complex_gaussian, orthonormal_frame, sample_generic_hyperplane
from lojex.variety import (
    Finite,
    Implicit,
    Intersection,
    OracleOptions,
    Parametric,
    SamplingError,
    UnsupportedIntersection,
    VarietySpec,
    distance,
    distance_bruteforce,
    distances,
    distances_bruteforce,
    hyperplane_variety,
    intersect,
    membership,
    sample_on_variety,
    section,
    squarefree_part,
)

PARABOLA = VarietySpec.graph(["x1^2"], 2)
LINE = VarietySpec.graph(["0"], 2)
AXIS1 = VarietySpec.implicit(["x2"], 2)
AXIS2 = VarietySpec.implicit(["x1"], 2)
CROSS = VarietySpec.implicit(["x1*x2"], 2)
ORIGIN = VarietySpec.finite([[0, 0]])


def gauss(seed, shape, scale=1.0):
    return scale * complex_gaussian(np.random.default_rng(seed), shape)


# -- specs -------------------------------------------------------------------


def test_base_point_must_lie_on_the_set():
    with pytest.raises(ValueError):
        VarietySpec.implicit(["x1 - 1"], 2)
    VarietySpec.implicit(["x1 - 1"], 2, base_point=np.array([1, 0], dtype=complex))


def test_graph_needs_a_parameter():
    with pytest.raises(ValueError):
        VarietySpec.graph(["x1", "x1"], 2)


@pytest.mark.parametrize("spec", [
    PARABOLA, CROSS, ORIGIN,
    VarietySpec.parametric(["x1", "x1^2", "x1^3"], 1),
    VarietySpec.graph(["(1+2i)*x1*x2"], 3, base_point=np.array([1, 1j, 2 * 1j * (1 + 2j)])),
])
def test_json_round_trip(spec):
    back = VarietySpec.from_json(spec.to_json())
    assert back.kind == spec.kind
    assert np.array_equal(back.base_point, spec.base_point)
    q = gauss(0, (5, spec.ambient_dim))
    assert np.allclose(distances(back, q).distances, distances(spec, q).distances)


# -- membership and distance examples -------------------------------------------


def test_membership_examples():
    assert membership(PARABOLA, [2, 4], 1e-9)
    assert not membership(ORIGIN, [1, 0], 1e-9)
    assert membership(CROSS, [0, 5], 1e-9)


def test_distance_to_line_and_point():
    w = 0.3 - 1.2j
    r = distance(AXIS1, [0, w])
    assert abs(r.distance - abs(w)) < 1e-15 and r.certified
    x = np.array([1 + 1j, -2])
    assert abs(distance(ORIGIN, x).distance - np.linalg.norm(x)) < 1e-15


def test_parabola_distance_matches_reference():
    d = distance(PARABOLA, [1, 0])
    ref = distance_bruteforce(PARABOLA, [1, 0], radius=2.0, samples=10_000)
    assert abs(d.distance - ref.distance) / ref.distance < 1e-2
    assert d.converged and d.stationarity < 1e-8


def test_bruteforce_examples():
    par = VarietySpec.parametric(["x1", "0"], 1)
    assert abs(distance_bruteforce(par, [3, 4], samples=1000).distance - 4) < 1e-6
    x = np.array([0.5, 2j])
    assert distance_bruteforce(ORIGIN, x).distance == distance(ORIGIN, x).distance
    with pytest.raises(TypeError):
        distance_bruteforce(CROSS, [1, 1])
    with pytest.raises(ValueError):
        distance_bruteforce(PARABOLA, [1, 1], samples=999)


def test_distance_equals_foot_offset():
    q = gauss(1, (40, 2), 0.7)
    for spec in (PARABOLA, CROSS, AXIS1, ORIGIN):
        b = distances(spec, q)
        assert np.allclose(b.distances, np.linalg.norm(q - b.feet, axis=1), rtol=1e-9, atol=1e-15)
        for foot in b.feet:
            assert membership(spec, foot, 1e-8)


def test_implicit_distance_to_cross_is_distance_to_nearest_axis():
    q = gauss(2, (50, 2))
    expected = np.minimum(abs(q[:, 0]), abs(q[:, 1]))
    assert np.allclose(distances(CROSS, q).distances, expected, rtol=1e-8)


def test_curved_implicit_matches_graph_form():
    implicit = VarietySpec.implicit(["x2 - x1^2"], 2)
    q = gauss(3, (60, 2), 0.5)
    assert np.allclose(distances(implicit, q).distances, distances(PARABOLA, q).distances, rtol=1e-6, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_distance_zero_iff_member(seed):
    on = sample_on_variety(PARABOLA, 1.0, 5, seed=seed)
    assert np.all(distances(PARABOLA, on).distances < 1e-8)
    off = on + gauss(seed, on.shape, 1e-3)
    d = distances(PARABOLA, off).distances
    for p, dist in zip(off, d):
        assert (dist < 1e-8) == membership(PARABOLA, p, 1e-8)


def test_distance_never_exceeds_distance_to_samples():
    pts = sample_on_variety(PARABOLA, 1.0, 1000, seed=4, depth=6)
    q = gauss(5, (20, 2), 0.5)
    d = distances(PARABOLA, q).distances
    gaps = np.linalg.norm(q[:, None, :] - pts[None, :, :], axis=2)
    assert np.all(d[:, None] <= gaps + 1e-12)


def test_oracle_options_are_validated_by_use():
    opts = OracleOptions(starts=4)
    q = gauss(6, (10, 2))
    assert np.allclose(distances(PARABOLA, q, opts).distances, distances(PARABOLA, q).distances, rtol=1e-6)


# -- sampling --------------------------------------------------------------------


def test_graph_samples_lie_on_the_graph_with_log_uniform_radii():
    pts = sample_on_variety(PARABOLA, 1.0, 2000, seed=0, depth=10)
    assert np.allclose(pts[:, 1], pts[:, 0] ** 2, atol=1e-15)
    r = np.linalg.norm(pts, axis=1)
    assert r.max() <= 1.0 + 1e-12 and r.min() >= 2.0**-10 * (1 - 1e-12)
    counts, _ = np.histogram(np.log2(r), bins=10, range=(-10, 0))
    assert counts.min() > 120


def test_samples_are_deterministic_per_seed():
    a = sample_on_variety(CROSS, 1.0, 20, seed=9)
    b = sample_on_variety(CROSS, 1.0, 20, seed=9)
    assert np.array_equal(a, b)


def test_finite_samples_are_the_points():
    assert np.array_equal(sample_on_variety(ORIGIN, 1.0, 10), np.zeros((1, 2)))


def test_implicit_samples_lie_on_an_axis():
    pts = sample_on_variety(CROSS, 1.0, 50, seed=1)
    assert np.all(np.minimum(abs(pts[:, 0]), abs(pts[:, 1])) < 1e-9)


def test_sampling_a_point_set_given_by_linear_equations_fails():
    with pytest.raises(SamplingError):
        sample_on_variety(VarietySpec.implicit(["x1", "x2"], 2), 1.0, 5)


# -- intersections -----------------------------------------------------------


def test_transversal_axes_meet_in_a_point():
    xy = intersect(AXIS1, AXIS2)
    assert isinstance(xy.form, Finite)
    t = np.array([0.4 - 0.1j, -2])
    assert np.allclose(distances(xy, np.c_[t, 0 * t]).distances, abs(t))


def test_parabola_meets_line_only_at_origin():
    xy = intersect(PARABOLA, LINE)
    assert isinstance(xy.form, Finite) and np.allclose(xy.form.points, 0)


def test_intersection_is_idempotent():
    assert intersect(PARABOLA, PARABOLA) is PARABOLA
    q = gauss(7, (10, 2))
    assert np.allclose(distances(intersect(CROSS, CROSS), q).distances, distances(CROSS, q).distances)


def test_graphs_in_c3_meet_along_a_line():
    X = VarietySpec.graph(["x1^2"], 3)
    Y = VarietySpec.graph(["0"], 3)
    xy = intersect(X, Y)
    assert isinstance(xy.form, Parametric)
    q = gauss(8, (30, 3))
    assert np.allclose(distances(xy, q).distances, np.linalg.norm(q[:, [0, 2]], axis=1), rtol=1e-12)


def test_intersection_dominates_each_part():
    pairs = [(PARABOLA, LINE), (CROSS, AXIS1), (CROSS, PARABOLA), (VarietySpec.graph(["x1^2"], 3),
                                                                   VarietySpec.implicit(["x2 - x3"], 3))]
    for a, b in pairs:
        q = gauss(9, (30, a.ambient_dim), 0.5)
        xy = distances(intersect(a, b), q).distances
        assert np.all(xy >= np.maximum(distances(a, q).distances, distances(b, q).distances) - 1e-9)


def test_intersection_membership_is_conjunction():
    xy = intersect(CROSS, PARABOLA)
    for p in ([0, 0], [0, 1], [1, 1], [1, 0]):
        assert membership(xy, p, 1e-9) == (membership(CROSS, p, 1e-9) and membership(PARABOLA, p, 1e-9))


def test_mismatched_intersections_are_refused():
    with pytest.raises(ValueError):
        intersect(PARABOLA, VarietySpec.graph(["x1^2"], 3))
    shifted = VarietySpec.implicit(["x2 - 1"], 2, base_point=np.array([0, 1], dtype=complex))
    with pytest.raises(ValueError):
        intersect(AXIS1, shifted)


def test_unsupported_intersection_is_reported():
    curve = VarietySpec.parametric(["x1^2", "x1^3"], 1)
    node = VarietySpec(2, np.zeros(2, dtype=complex), Intersection((curve, PARABOLA)))
    with pytest.raises(UnsupportedIntersection):
        distances(node, gauss(0, (2, 2)))


def test_squarefree_part_removes_repeated_factors():
    p = parse_poly("x1^2*x2 + 2*x1*x2^2 + x2^3", num_vars=2)  # x2 (x1 + x2)^2
    q = squarefree_part(p)
    assert q.degree == 2
    assert abs(q(np.array([1, -1]))) < 1e-12 and abs(q(np.array([5, 0]))) < 1e-12


# -- sections ------------------------------------------------------------------


def test_coordinate_section():
    Y3 = VarietySpec.implicit(["x3"], 3)
    s = section(Y3, Hyperplane.coordinate(3, 1))
    assert s.ambient_dim == 2 and isinstance(s.form, Implicit)
    assert s.form.equations[0] == parse_poly("x2", num_vars=2)


def test_generic_section_of_a_curved_graph():
    X = VarietySpec.graph(["x1^2"], 3)
    h = sample_generic_hyperplane(3, seed=4)
    s = section(X, h)
    assert membership(s, np.zeros(2), 1e-12)
    for p in sample_on_variety(s, 1.0, 20, seed=2):
        assert membership(X, orthonormal_frame(h).basis.T @ p, 1e-9)


def test_section_of_a_contained_line_is_isometric():
    L = VarietySpec.implicit(["x2", "x3"], 3)
    h = Hyperplane.coordinate(3, 2)
    s = section(L, h)
    frame = orthonormal_frame(h)
    t = gauss(3, (10, 2))
    assert np.allclose(distances(s, t).distances, distances(L, t @ frame.basis).distances, atol=1e-12)


def test_section_needs_matching_base_point():
    with pytest.raises(ValueError):
        section(PARABOLA, Hyperplane([1, 0], [0, 1]))


def test_hyperplane_coordinates_are_isometric():
    h = sample_generic_hyperplane(4, seed=1)
    f = orthonormal_frame(h, seed=2)
    t = gauss(4, (2, 3))
    x = t @ f.basis
    assert abs(np.linalg.norm(t[0] - t[1]) - np.linalg.norm(x[0] - x[1])) < 1e-12


def test_hyperplane_as_variety():
    h = sample_generic_hyperplane(3, seed=5)
    q = gauss(5, (5, 3))
    assert np.allclose(distances(hyperplane_variety(h), q).distances, [abs(h.residual(p)) for p in q])


# -- reference oracle agreement ------------------------------------------------------


def test_bruteforce_agrees_with_projection_on_a_cusp():
    cusp = VarietySpec.parametric(["x1^2", "x1^3"], 1)
    q = gauss(6, (25, 2), 0.4)
    d = distances(cusp, q).distances
    ref = distances_bruteforce(cusp, q, radius=2.0, samples=10_000).distances
    assert np.all(np.abs(d - ref) <= 1e-2 * ref + 1e-12)
