import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lojex.geometry import (
    Hyperplane,
    angle,
    complex_gaussian,
    lemma1_bound_check,
    lemma1_constant,
    min_angle_hyperplane_through,
    orthonormal_frame,
    parametrization,
    random_lemma1_configuration,
    sample_generic_hyperplane,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 5)


def _pair(seed, m):
    rng = np.random.default_rng(seed)
    return Hyperplane(np.zeros(m), complex_gaussian(rng, m)), Hyperplane(np.zeros(m), complex_gaussian(rng, m))


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_angle_is_symmetric_and_bounded(seed, m):
    h, k = _pair(seed, m)
    a = angle(h, k)
    assert 0 <= a <= math.pi / 2
    assert abs(a - angle(k, h)) <= 1e-12
    assert angle(h, h) <= 1e-7


@settings(max_examples=100, deadline=None)
@given(seeds, dims, st.floats(0, 2 * math.pi))
def test_angle_ignores_unit_scalars(seed, m, phase):
    h, k = _pair(seed, m)
    k2 = Hyperplane(k.base_point, np.exp(1j * phase) * k.normal)
    assert abs(angle(h, k) - angle(h, k2)) <= 1e-10


def test_orthogonal_coordinate_hyperplanes():
    assert abs(angle(Hyperplane.coordinate(3, 0), Hyperplane.coordinate(3, 1)) - math.pi / 2) < 1e-15


def test_angle_rejects_mismatched_hyperplanes():
    with pytest.raises(ValueError):
        angle(Hyperplane.coordinate(2, 0), Hyperplane.coordinate(3, 0))
    with pytest.raises(ValueError):
        angle(Hyperplane.coordinate(2, 0), Hyperplane([1, 0], [0, 1]))


def test_hyperplane_validation():
    with pytest.raises(ValueError):
        Hyperplane([0, 0], [0, 0])
    with pytest.raises(ValueError):
        Hyperplane([0], [1])
    h = Hyperplane([0, 0], [3, 4j])
    assert abs(np.linalg.norm(h.normal) - 1) < 1e-15


def test_hyperplane_json_round_trip():
    h = sample_generic_hyperplane(4, base_point=np.array([1, 2j, 0, -1]), seed=3)
    g = Hyperplane.from_json(h.to_json())
    assert np.array_equal(g.normal, h.normal) and np.array_equal(g.base_point, h.base_point)


def test_min_angle_for_unit_slope_is_quarter_turn():
    h0 = Hyperplane.coordinate(3, 2)
    h1 = min_angle_hyperplane_through([1, 0, 1], h0)
    assert abs(angle(h0, h1) - math.pi / 4) <= 1e-12


def test_min_angle_closed_form():
    h0 = Hyperplane.coordinate(2, 1)
    h1 = min_angle_hyperplane_through([1, 0.5], h0)
    assert abs(angle(h0, h1) - math.acos(1 / math.sqrt(1.25))) <= 1e-15


def test_min_angle_degenerate_cases():
    h0 = Hyperplane.coordinate(3, 2)
    assert min_angle_hyperplane_through([1, 2, 0], h0) is h0
    h1 = min_angle_hyperplane_through([0, 0, 2], h0)
    assert h1.contains([0, 0, 2]) and abs(angle(h0, h1) - math.pi / 2) < 1e-12
    with pytest.raises(ValueError):
        min_angle_hyperplane_through([0, 0, 0], h0)


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_min_angle_matches_projection_route(seed, m):
    # independent route: the best normal is the normal of h0 with its component along y removed
    rng = np.random.default_rng(seed)
    h0 = Hyperplane(np.zeros(m), complex_gaussian(rng, m))
    y = complex_gaussian(rng, m)
    h1 = min_angle_hyperplane_through(y, h0)
    assert h1.contains(y, 1e-10)
    d = y / np.linalg.norm(y)
    w = h0.normal - np.vdot(d, h0.normal) * d
    expected = math.acos(min(1.0, np.linalg.norm(w)))
    assert abs(angle(h0, h1) - expected) <= 1e-9
    # no other hyperplane through y is closer
    for _ in range(5):
        u = complex_gaussian(rng, m)
        u -= np.vdot(d, u) * d
        assert angle(h0, Hyperplane(np.zeros(m), u)) >= angle(h0, h1) - 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, dims, st.one_of(st.none(), seeds))
def test_frame_is_orthonormal_and_isometric(seed, m, frame_seed):
    h = sample_generic_hyperplane(m, seed=seed)
    f = orthonormal_frame(h, frame_seed)
    B = f.basis
    assert B.shape == (m - 1, m)
    assert np.allclose(B @ B.conj().T, np.eye(m - 1), atol=1e-12)
    assert np.allclose(B @ h.normal.conj(), 0, atol=1e-12)
    rng = np.random.default_rng(seed)
    t = complex_gaussian(rng, (4, m - 1))
    x = parametrization(f)(t)
    assert all(h.contains(p, 1e-10) for p in x)
    assert np.allclose(np.linalg.norm(x[0] - x[1]), np.linalg.norm(t[0] - t[1]))
    assert np.allclose(f.coordinates(x), t)


def test_standard_frame_of_coordinate_hyperplane():
    f = orthonormal_frame(Hyperplane.coordinate(3, 2))
    assert np.allclose(f.basis, np.eye(3)[:2])


def test_generic_hyperplane_is_seeded():
    a = sample_generic_hyperplane(3, seed=5)
    b = sample_generic_hyperplane(3, seed=5)
    assert np.array_equal(a.normal, b.normal)
    with pytest.raises(ValueError):
        sample_generic_hyperplane(1)


# -- the lower bound on |y1 - y0| ------------------------------------------------


def test_lemma_skips_outside_hypotheses():
    h0 = Hyperplane.coordinate(2, 1)
    assert lemma1_bound_check([1, 0], [0, 0], h0, 0.1).status == "skip"
    assert lemma1_bound_check([1, 1], [1, 1.01], h0, 0.1).status == "skip"
    assert lemma1_bound_check([1, 0], [1, 0.5], h0, 0.1).reason.startswith("closeness")
    assert lemma1_bound_check([1, 0], [1, 0.001], h0, 0.1).reason.startswith("minimal angle")


def test_lemma_bound_on_a_concrete_configuration():
    h0 = Hyperplane.coordinate(2, 1)
    out = lemma1_bound_check([1, 0], [1, 0.09], h0, 0.05)
    assert out.status == "pass"
    assert out.lhs >= lemma1_constant(0.05) * 1.0


def test_closeness_caps_the_minimal_angle():
    # |y1 - y0| < |y0|/10 with y0 in H0 forces sin(angle) < 1/9
    rng = np.random.default_rng(0)
    cap = math.asin(1 / 9)
    for _ in range(2000):
        h0, y0, y1 = random_lemma1_configuration(rng, 3)
        theta = angle(h0, min_angle_hyperplane_through(y1, h0))
        assert theta < cap + 1e-12


@pytest.mark.parametrize("a", [0.02, 0.05, 0.08])
def test_lemma_bound_holds_where_hypotheses_are_satisfiable(a):
    rng = np.random.default_rng(1)
    eligible = 0
    for _ in range(4000):
        h0, y0, y1 = random_lemma1_configuration(rng, 3)
        out = lemma1_bound_check(y0, y1, h0, a)
        assert out.status != "fail"
        eligible += out.status == "pass"
    assert eligible > 0


def test_unconditional_bound_without_closeness():
    rng = np.random.default_rng(2)
    a = math.pi / 4
    eligible = 0
    worst = math.inf
    for _ in range(3000):
        h0, y0, y1 = random_lemma1_configuration(rng, 3, gap_scale=2.0)
        out = lemma1_bound_check(y0, y1, h0, a, full=True)
        assert out.status != "fail"
        if out.status == "pass":
            eligible += 1
            worst = min(worst, out.lhs / (np.linalg.norm(y0)))
    assert eligible > 100
    # the unconditional ratio never drops below sin(a) > min(0.1, 0.9 tan a)
    assert worst >= math.sin(a) - 1e-9
