"""Intersections and hyperplane sections of local sets."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

from ..algebra import AffineMap, Poly, compose_affine
from ..geometry import Hyperplane, orthonormal_frame, parametrization
from .spec import (
    BASE_POINT_TOL,
    Finite,
    Graph,
    Implicit,
    Intersection,
    Parametric,
    VarietySpec,
    graph_equations,
    is_linear,
    linear_system,
    parametric_polys,
)

ROOT_CLUSTER_TOL = 1e-5


# -- squarefree reduction ---------------------------------------------------


def _rational(x: float) -> sympy.Rational | None:
    fr = Fraction(x).limit_denominator(10**9)
    if abs(float(fr) - x) > 1e-15 * max(1.0, abs(x)):
        return None
    return sympy.Rational(fr.numerator, fr.denominator)


def squarefree_part(p: Poly) -> Poly:
    """Generator of the radical of ``(p)``: same zero set, no repeated factors.

    Needs coefficients that are (Gaussian) rationals with small denominators;
    otherwise ``p`` is returned unchanged.
    """
    if p.is_zero() or p.degree <= 1:
        return p
    gens = sympy.symbols(f"z0:{p.num_vars}")
    expr = 0
    for alpha, c in p.terms:
        re, im = _rational(c.real), _rational(c.imag)
        if re is None or im is None:
            return p
        mono = sympy.Mul(*[g**k for g, k in zip(gens, alpha)])
        expr += (re + sympy.I * im) * mono
    red = sympy.sqf_part(sympy.Poly(expr, *gens, domain="QQ_I"))
    terms = {}
    for alpha, c in red.terms():
        z = complex(sympy.N(c))
        terms[tuple(alpha)] = z
    q = Poly.from_dict(p.num_vars, terms)
    scale = max(abs(c) for _, c in q.terms)
    return Poly(q.num_vars, tuple((a, c / scale) for a, c in q.terms))


# -- helpers ------------------------------------------------------------------


def implicit_equations(spec: VarietySpec) -> tuple[Poly, ...] | None:
    """Ambient defining equations when the form has them (implicit, graph, linear parametric)."""
    form = spec.form
    if isinstance(form, Implicit):
        return tuple(q for q in form.equations if not q.is_zero())
    if isinstance(form, Graph):
        return graph_equations(spec)
    if isinstance(form, Parametric) and is_linear(form.map):
        return _linear_parametric_equations(spec)
    if isinstance(form, Intersection):
        eqs = []
        for part in form.parts:
            sub = implicit_equations(part)
            if sub is None:
                return None
            eqs.extend(sub)
        return tuple(eqs)
    return None


def _linear_parametric_equations(spec: VarietySpec) -> tuple[Poly, ...]:
    polys = parametric_polys(spec)
    L, minus_c = linear_system(polys, polys[0].num_vars)
    c = -minus_c
    # rows of the complement basis W satisfy W^H (x - c) = 0 on the image
    u, s, vh = np.linalg.svd(L, full_matrices=True)
    rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
    W = u[:, rank:]
    m = spec.ambient_dim
    return tuple(Poly.linear(list(w.conj()), -np.vdot(w, c)) for w in W.T)


def _finite_spec(spec: VarietySpec, points) -> VarietySpec:
    pts = [spec.base_point] + [np.asarray(p, dtype=complex) for p in points]
    uniq: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > 1e-12 for q in uniq):
            uniq.append(p)
    return VarietySpec(spec.ambient_dim, spec.base_point, Finite(np.array(uniq)))


def _same(a: VarietySpec, b: VarietySpec) -> bool:
    return a is b or (a.kind == b.kind and a.kind != "finite" and a.form == b.form
                      and np.array_equal(a.base_point, b.base_point))


def _univariate_common_roots(hs: list[Poly]) -> np.ndarray:
    nz = [h for h in hs if not h.is_zero()]
    lead = min(nz, key=lambda h: h.degree)
    coeffs = np.zeros(lead.degree + 1, dtype=complex)
    for (k,), c in lead.terms:
        coeffs[lead.degree - k] = c
    roots = np.roots(coeffs)
    clusters: list[list[complex]] = []
    for r in roots:
        for cl in clusters:
            if abs(cl[0] - r) <= ROOT_CLUSTER_TOL * (1 + abs(r)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = []
    for cl in clusters:
        r = complex(np.mean(cl))
        scale = 1 + abs(r) ** max(h.degree for h in nz)
        if all(abs(h(np.array([r]))) <= 1e-6 * scale * max(abs(c) for _, c in h.terms) for h in nz):
            out.append(r)
    return np.array(out, dtype=complex)


def _intersect_graphs(a: VarietySpec, b: VarietySpec) -> VarietySpec:
    fa, fb = a.form, b.form
    p = fa.param_dim
    hs = [f - g for f, g in zip(fa.components, fb.components)]
    if all(h.is_zero() for h in hs):
        return a
    x0 = a.base_point
    if p == 1:
        us = _univariate_common_roots(hs)
        pts = []
        for u in us:
            tail = [f(np.array([u])) for f in fa.components]
            pts.append(x0 + np.array([u] + tail))
        return _finite_spec(a, pts)
    hs = [squarefree_part(h) for h in hs if not h.is_zero()]
    if is_linear(hs):
        A, _ = linear_system(hs, p)
        _, s, vh = np.linalg.svd(A, full_matrices=True)
        rank = int(np.sum(s > 1e-12))
        N = vh[rank:].conj().T  # parameter subspace where f == g
        if N.shape[1] == 0:
            return _finite_spec(a, [])
        to_u = AffineMap(N, np.zeros(p))
        k = N.shape[1]
        head = [Poly.linear(list(N[i])) + x0[i] for i in range(p)]
        tail = [compose_affine(f, to_u) + x0[p + i] for i, f in enumerate(fa.components)]
        return VarietySpec(a.ambient_dim, x0, Parametric(tuple(head + tail)))
    to_u_amb = AffineMap(np.hstack([np.eye(p), np.zeros((p, a.ambient_dim - p))]), -x0[:p])
    eqs = graph_equations(a) + tuple(compose_affine(h, to_u_amb) for h in hs)
    return VarietySpec(a.ambient_dim, x0, Implicit(eqs))


def _linear_solution_is_point(eqs, m: int, x0) -> bool:
    A, _ = linear_system(eqs, m)
    return np.linalg.matrix_rank(A, tol=1e-12) == m


def intersect(a: VarietySpec, b: VarietySpec) -> VarietySpec:
    """The set ``a ∩ b``, in the most concrete form available."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("sets live in different ambient spaces")
    if not np.allclose(a.base_point, b.base_point, rtol=0, atol=BASE_POINT_TOL):
        raise ValueError("sets have different base points")
    if _same(a, b):
        return a
    from .oracles import membership

    if isinstance(a.form, Finite) or isinstance(b.form, Finite):
        fin, other = (a, b) if isinstance(a.form, Finite) else (b, a)
        keep = [p for p in fin.form.points if membership(other, p, 1e-9)]
        return _finite_spec(fin, keep)
    if isinstance(a.form, Graph) and isinstance(b.form, Graph) and a.form.param_dim == b.form.param_dim:
        return _intersect_graphs(a, b)
    ea, eb = implicit_equations(a), implicit_equations(b)
    if ea is not None and eb is not None:
        eqs = tuple(squarefree_part(q) for q in ea + eb)
        if is_linear(eqs) and _linear_solution_is_point(eqs, a.ambient_dim, a.base_point):
            return _finite_spec(a, [])
        return VarietySpec(a.ambient_dim, a.base_point, Implicit(eqs))
    return VarietySpec(a.ambient_dim, a.base_point, Intersection((a, b)))


def resolve_intersection(spec: VarietySpec) -> VarietySpec:
    """Fold an :class:`Intersection` node into a concrete form when possible."""
    if not isinstance(spec.form, Intersection):
        return spec
    parts = [resolve_intersection(p) for p in spec.form.parts]
    acc = parts[0]
    for nxt in parts[1:]:
        acc = intersect(acc, nxt)
    return acc


# -- hyperplane sections ----------------------------------------------------


def hyperplane_variety(h: Hyperplane) -> VarietySpec:
    """``h`` as a linear implicit set, based at the hyperplane's base point."""
    nc = np.conj(h.normal)
    eq = Poly.linear(list(nc), -complex(np.dot(nc, h.base_point)))
    return VarietySpec(h.ambient_dim, h.base_point.astype(complex), Implicit((eq,)))


def section(spec: VarietySpec, h: Hyperplane, frame_seed: int | None = None) -> VarietySpec:
    """``spec ∩ h`` written in isometric coordinates of ``h`` (base point at the origin)."""
    if h.ambient_dim != spec.ambient_dim:
        raise ValueError("hyperplane and set live in different ambient spaces")
    if not np.allclose(h.base_point, spec.base_point, rtol=0, atol=BASE_POINT_TOL):
        raise ValueError("hyperplane does not pass through the base point")
    frame = orthonormal_frame(h, frame_seed)
    return section_in_frame(spec, frame)


def section_in_frame(spec: VarietySpec, frame) -> VarietySpec:
    param = parametrization(frame)
    h = frame.hyperplane
    k = spec.ambient_dim - 1
    origin = np.zeros(k, dtype=complex)
    form = spec.form
    if isinstance(form, Finite):
        keep = [frame.coordinates(p) for p in form.points if h.contains(p, 1e-10)]
        return VarietySpec(k, origin, Finite(np.array(keep, dtype=complex).reshape(-1, k)))
    if isinstance(form, Intersection):
        return VarietySpec(k, origin, Intersection(tuple(section_in_frame(p, frame) for p in form.parts)))
    eqs = implicit_equations(spec)
    if eqs is None:
        raise ValueError("sections of non-linear parametric sets are not supported; use implicit or graph form")
    pulled = tuple(q for q in (compose_affine(e, param) for e in eqs) if not q.is_zero())
    return VarietySpec(k, origin, Implicit(pulled))
