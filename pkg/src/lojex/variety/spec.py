"""Local algebraic sets at a base point and their JSON form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..algebra import AffineMap, Poly, compose_affine, default_names, parse_poly, to_string

BASE_POINT_TOL = 1e-10


@dataclass(frozen=True)
class Implicit:
    equations: tuple[Poly, ...]
    kind = "implicit"


@dataclass(frozen=True)
class Graph:
    """``{x0 + (u, f(u))}`` with ``u`` in C^p and f given by ``components``."""

    param_dim: int
    components: tuple[Poly, ...]
    kind = "graph"


@dataclass(frozen=True)
class Parametric:
    """Image of a polynomial map C^p -> C^m with ``map(0) = x0``."""

    map: tuple[Poly, ...]
    kind = "parametric"

    @property
    def param_dim(self) -> int:
        return self.map[0].num_vars


@dataclass(frozen=True, eq=False)
class Finite:
    points: np.ndarray
    kind = "finite"

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex, ndmin=2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class Intersection:
    parts: tuple["VarietySpec", ...]
    kind = "intersection"


Form = Union[Implicit, Graph, Parametric, Finite, Intersection]


@dataclass(frozen=True, eq=False)
class VarietySpec:
    ambient_dim: int
    base_point: np.ndarray
    form: Form

    def __post_init__(self):
        x0 = np.array(self.base_point, dtype=complex).reshape(-1)
        if x0.shape[0] != self.ambient_dim:
            raise ValueError(f"base point has {x0.shape[0]} coordinates, ambient dimension is {self.ambient_dim}")
        x0.setflags(write=False)
        object.__setattr__(self, "base_point", x0)
        _validate(self)

    @property
    def kind(self) -> str:
        return self.form.kind

    # convenience constructors; polynomials may be given as expression strings
    @classmethod
    def implicit(cls, equations: Sequence, ambient_dim: int, base_point=None) -> "VarietySpec":
        eqs = tuple(_as_poly(e, ambient_dim) for e in equations)
        return cls(ambient_dim, _zeros(ambient_dim, base_point), Implicit(eqs))

    @classmethod
    def graph(cls, components: Sequence, ambient_dim: int, base_point=None) -> "VarietySpec":
        p = ambient_dim - len(components)
        if p < 1:
            raise ValueError("a graph needs at least one parameter")
        comps = tuple(_as_poly(c, p) for c in components)
        return cls(ambient_dim, _zeros(ambient_dim, base_point), Graph(p, comps))

    @classmethod
    def parametric(cls, coords: Sequence, param_dim: int, base_point=None) -> "VarietySpec":
        m = len(coords)
        polys = tuple(_as_poly(c, param_dim) for c in coords)
        return cls(m, _zeros(m, base_point), Parametric(polys))

    @classmethod
    def finite(cls, points, base_point=None) -> "VarietySpec":
        pts = np.array(points, dtype=complex, ndmin=2)
        m = pts.shape[1]
        return cls(m, _zeros(m, base_point), Finite(pts))

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "base_point": _cvec_json(self.base_point),
            "form": _form_json(self.form, self.ambient_dim),
        }

    @classmethod
    def from_json(cls, record: dict) -> "VarietySpec":
        m = int(record["ambient_dim"])
        x0 = _cvec_parse(record.get("base_point", [0] * m))
        return cls(m, x0, _form_parse(record["form"], m))


def _zeros(m, base_point):
    return np.zeros(m, dtype=complex) if base_point is None else base_point


def _as_poly(e, n: int) -> Poly:
    if isinstance(e, Poly):
        if e.num_vars != n:
            raise ValueError(f"polynomial in {e.num_vars} variables where {n} expected")
        return e
    return parse_poly(str(e), num_vars=n)


def _cvec_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def _cvec_parse(items) -> np.ndarray:
    out = []
    for z in items:
        if isinstance(z, (list, tuple)):
            out.append(complex(float(z[0]), float(z[1])))
        else:
            out.append(complex(z))
    return np.array(out, dtype=complex)


def _form_json(form: Form, m: int) -> dict:
    if isinstance(form, Implicit):
        return {"kind": "implicit", "equations": [to_string(p) for p in form.equations]}
    if isinstance(form, Graph):
        return {"kind": "graph", "param_dim": form.param_dim, "components": [to_string(p) for p in form.components]}
    if isinstance(form, Parametric):
        return {"kind": "parametric", "param_dim": form.param_dim, "map": [to_string(p) for p in form.map]}
    if isinstance(form, Finite):
        return {"kind": "finite", "points": [_cvec_json(p) for p in form.points]}
    return {"kind": "intersection", "parts": [part.to_json() for part in form.parts]}


def _form_parse(rec: dict, m: int) -> Form:
    kind = rec.get("kind")
    if kind == "implicit":
        names = rec.get("variables") or default_names(m)
        return Implicit(tuple(parse_poly(e, names) for e in rec["equations"]))
    if kind == "graph":
        comps = rec["components"]
        p = int(rec.get("param_dim", m - len(comps)))
        if p + len(comps) != m:
            raise ValueError("graph: param_dim + number of components must equal ambient_dim")
        names = rec.get("variables") or default_names(p)
        return Graph(p, tuple(parse_poly(c, names) for c in comps))
    if kind == "parametric":
        p = int(rec["param_dim"])
        names = rec.get("variables") or default_names(p)
        return Parametric(tuple(parse_poly(c, names) for c in rec["map"]))
    if kind == "finite":
        return Finite(np.array([_cvec_parse(p) for p in rec["points"]], dtype=complex, ndmin=2))
    if kind == "intersection":
        return Intersection(tuple(VarietySpec.from_json(r) for r in rec["parts"]))
    raise ValueError(f"unknown variety form {kind!r}")


# -- conversions and residuals ------------------------------------------


def graph_param_map(spec: VarietySpec) -> AffineMap:
    """Ambient point -> graph parameter ``u = x_head - x0_head``."""
    p = spec.form.param_dim
    lin = np.hstack([np.eye(p), np.zeros((p, spec.ambient_dim - p))])
    return AffineMap(lin, -spec.base_point[:p])


def graph_equations(spec: VarietySpec) -> tuple[Poly, ...]:
    """Ambient equations ``y_i - x0_i - f_i(x - x0) = 0`` of a graph."""
    form: Graph = spec.form
    m, p = spec.ambient_dim, form.param_dim
    to_u = graph_param_map(spec)
    out = []
    for i, f in enumerate(form.components):
        yi = Poly.variable(m, p + i) - spec.base_point[p + i]
        out.append(yi - compose_affine(f, to_u))
    return tuple(out)


def parametric_polys(spec: VarietySpec) -> tuple[Poly, ...]:
    """Coordinates of ``phi(t)`` as polynomials in the parameters."""
    form = spec.form
    if isinstance(form, Parametric):
        return form.map
    if isinstance(form, Graph):
        p = form.param_dim
        head = [Poly.variable(p, i) + spec.base_point[i] for i in range(p)]
        tail = [f + spec.base_point[p + i] for i, f in enumerate(form.components)]
        return tuple(head + tail)
    raise TypeError(f"{form.kind} form has no parametrization")


def is_linear(polys: Sequence[Poly]) -> bool:
    return all(q.degree <= 1 for q in polys)


def linear_system(polys: Sequence[Poly], n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(A, b)`` with ``polys(y) = A y - b`` for degree <= 1 polynomials."""
    A = np.zeros((len(polys), n), dtype=complex)
    b = np.zeros(len(polys), dtype=complex)
    for k, q in enumerate(polys):
        for alpha, c in q.terms:
            if sum(alpha) == 0:
                b[k] = -c
            else:
                A[k, alpha.index(1)] = c
    return A, b


def equation_residuals(polys: Sequence[Poly], points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    if not polys:
        return np.zeros(pts.shape[0])
    vals = np.stack([q.eval_many(pts) for q in polys], axis=1)
    return np.max(np.abs(vals), axis=1)


def _validate(spec: VarietySpec):
    form, m, x0 = spec.form, spec.ambient_dim, spec.base_point
    if isinstance(form, Implicit):
        for q in form.equations:
            if q.num_vars != m:
                raise ValueError("implicit equation has wrong number of variables")
        res = equation_residuals(form.equations, x0[None, :])[0]
    elif isinstance(form, Graph):
        if form.param_dim + len(form.components) != m:
            raise ValueError("graph: param_dim + number of components must equal ambient_dim")
        for q in form.components:
            if q.num_vars != form.param_dim:
                raise ValueError("graph component has wrong number of variables")
        res = max((abs(q(np.zeros(form.param_dim))) for q in form.components), default=0.0)
    elif isinstance(form, Parametric):
        if len(form.map) != m:
            raise ValueError("parametric map must have one coordinate per ambient dimension")
        p = form.param_dim
        if any(q.num_vars != p for q in form.map):
            raise ValueError("parametric coordinates use different parameter counts")
        image0 = np.array([q(np.zeros(p)) for q in form.map])
        res = float(np.linalg.norm(image0 - x0))
    elif isinstance(form, Finite):
        if form.points.shape[1] != m:
            raise ValueError("finite points have wrong dimension")
        res = float(np.min(np.linalg.norm(form.points - x0, axis=1)))
    else:
        for part in form.parts:
            if part.ambient_dim != m or not np.allclose(part.base_point, x0, rtol=0, atol=BASE_POINT_TOL):
                raise ValueError("intersection parts must share ambient dimension and base point")
        res = 0.0
    if res >= BASE_POINT_TOL:
        raise ValueError(f"base point is not on the {form.kind} set (residual {res:.3g})")
