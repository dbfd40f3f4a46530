"""Hyperplanes through a base point in C^m and the angle metric between them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AffineMap

ANGLE_ATOL = 1e-8


def hdot(x, y) -> complex:
    """Hermitian product <x, y> = sum x_i conj(y_i)."""
    return complex(np.vdot(np.asarray(y, dtype=complex), np.asarray(x, dtype=complex)))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """``{x : <x - base_point, normal> = 0}``; the normal is stored with unit norm."""

    base_point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        x0 = np.array(self.base_point, dtype=complex).reshape(-1)
        v = np.array(self.normal, dtype=complex).reshape(-1)
        if x0.shape != v.shape:
            raise ValueError("base point and normal have different lengths")
        if v.shape[0] < 2:
            raise ValueError("ambient dimension must be at least 2")
        nv = np.linalg.norm(v)
        if nv == 0:
            raise ValueError("zero normal vector")
        v = v / nv
        x0.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "base_point", x0)
        object.__setattr__(self, "normal", v)

    @property
    def ambient_dim(self) -> int:
        return self.normal.shape[0]

    @classmethod
    def coordinate(cls, m: int, index: int, base_point=None) -> "Hyperplane":
        """The hyperplane ``x_index = base_point_index``."""
        v = np.zeros(m, dtype=complex)
        v[index] = 1
        return cls(np.zeros(m) if base_point is None else base_point, v)

    def residual(self, x) -> complex:
        return hdot(np.asarray(x, dtype=complex) - self.base_point, self.normal)

    def contains(self, x, tol: float = 1e-10) -> bool:
        return abs(self.residual(x)) < tol

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return x - self.residual(x) * self.normal

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "base_point": [[float(z.real), float(z.imag)] for z in self.base_point],
            "normal": [[float(z.real), float(z.imag)] for z in self.normal],
        }

    @classmethod
    def from_json(cls, record: dict) -> "Hyperplane":
        x0 = [complex(a, b) for a, b in record["base_point"]]
        v = [complex(a, b) for a, b in record["normal"]]
        if len(x0) != record.get("ambient_dim", len(x0)):
            raise ValueError("ambient_dim does not match the stored vectors")
        return cls(x0, v)


def angle(h: Hyperplane, k: Hyperplane) -> float:
    """arccos |<v, w>| for the unit normals, in [0, pi/2]."""
    if h.ambient_dim != k.ambient_dim:
        raise ValueError("hyperplanes live in different ambient spaces")
    if not np.allclose(h.base_point, k.base_point, rtol=0, atol=1e-12):
        raise ValueError("hyperplanes pass through different base points")
    c = abs(hdot(h.normal, k.normal))
    return math.acos(min(1.0, max(0.0, c)))


@dataclass(frozen=True, eq=False)
class Frame:
    """Hermitian-orthonormal basis (rows of ``basis``) of a hyperplane's direction space."""

    hyperplane: Hyperplane
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex, ndmin=2)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    def coordinates(self, x) -> np.ndarray:
        """Hyperplane coordinates of points (rows) lying in the hyperplane."""
        x = np.asarray(x, dtype=complex)
        return (x - self.hyperplane.base_point) @ self.basis.conj().T


def _gram_schmidt(normal: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    out: list[np.ndarray] = []
    for c in candidates:
        w = c.astype(complex)
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for u in [normal] + out:
                w = w - np.vdot(u, w) * u
        nw = np.linalg.norm(w)
        if nw > 1e-8:
            out.append(w / nw)
        if len(out) == normal.shape[0] - 1:
            break
    return np.array(out)


def orthonormal_frame(h: Hyperplane, seed: int | None = None) -> Frame:
    """Orthonormal frame of ``h``.

    With ``seed=None`` the standard basis vectors are orthogonalized in order,
    so coordinate hyperplanes get coordinate frames. A seed instead draws a
    random starting family, deterministically.
    """
    m = h.ambient_dim
    if seed is None:
        candidates = np.eye(m, dtype=complex)
    else:
        candidates = complex_gaussian(np.random.default_rng(seed), (m + 2, m))
    basis = _gram_schmidt(h.normal, candidates)
    if basis.shape[0] != m - 1:
        raise RuntimeError("failed to complete an orthonormal frame")
    return Frame(h, basis)


def parametrization(frame: Frame) -> AffineMap:
    """Isometric affine parametrization ``t -> x0 + sum t_i b_i`` of the hyperplane."""
    return AffineMap(frame.basis.T, frame.hyperplane.base_point)


def sample_generic_hyperplane(m: int, base_point=None, seed: int | None = None) -> Hyperplane:
    """Hyperplane with a normal drawn uniformly from the unit sphere of C^m."""
    if m < 2:
        raise ValueError("ambient dimension must be at least 2")
    rng = np.random.default_rng(seed)
    v = complex_gaussian(rng, m)
    return Hyperplane(np.zeros(m) if base_point is None else base_point, v)


def _adapted_unitary(v: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Unitary U whose first column is ``direction`` and last column is ``v``."""
    m = v.shape[0]
    rest = _gram_schmidt(v, np.vstack([direction, np.eye(m, dtype=complex)]))
    cols = list(rest[: m - 1]) + [v]
    return np.array(cols).T


def min_angle_hyperplane_through(y, h0: Hyperplane) -> Hyperplane:
    """Hyperplane through the base point of ``h0`` containing ``y`` closest to ``h0`` in angle.

    Coordinates are rotated so that the base point is the origin, ``h0`` is
    ``{x_m = 0}`` and ``y = (y_1, 0, ..., 0, y_m)``; the answer is then
    ``x_m = q x_1`` with ``q = y_m / y_1``. When ``y`` lies on the normal
    line of ``h0`` (``y_1 = 0``) every hyperplane through ``y`` is orthogonal
    to ``h0``; we return the one whose normal is orthogonal to ``y`` and
    closest to the first standard basis vector not parallel to ``y``.
    """
    x0 = h0.base_point
    d = np.asarray(y, dtype=complex).reshape(-1) - x0
    if d.shape[0] != h0.ambient_dim:
        raise ValueError("point and hyperplane dimensions differ")
    nd = np.linalg.norm(d)
    if nd == 0:
        raise ValueError("y coincides with the base point")
    v = h0.normal
    ym = hdot(d, v)
    tangential = d - ym * v
    nt = np.linalg.norm(tangential)
    if abs(ym) <= 1e-15 * nd:
        return h0
    if nt <= 1e-14 * nd:
        u = d / nd
        for e in np.eye(h0.ambient_dim, dtype=complex):
            w = e - np.vdot(u, e) * u
            if np.linalg.norm(w) > 1e-8:
                return Hyperplane(x0, w)
    e1 = tangential / nt
    U = _adapted_unitary(v, e1)
    y1 = hdot(d, e1)
    q1 = ym / y1
    n_adapted = np.zeros(h0.ambient_dim, dtype=complex)
    n_adapted[0] = -np.conj(q1)
    n_adapted[-1] = 1.0
    return Hyperplane(x0, U @ n_adapted)


@dataclass(frozen=True)
class Lemma1Outcome:
    status: str  # "pass" | "fail" | "skip"
    reason: str
    lhs: float = math.nan
    rhs: float = math.nan
    min_angle: float = math.nan


def lemma1_constant(a: float, full: bool = False) -> float:
    """a' = 0.9 tan(a): |q_1| >= tan(a) once the angle is at least a.

    Without the closeness hypothesis the far case contributes the factor 1/10,
    so the unconditional constant is ``min(0.1, 0.9 tan a)``.
    """
    c = 0.9 * math.tan(a)
    return min(0.1, c) if full else c


def lemma1_bound_check(y0: Sequence[complex], y1: Sequence[complex], h0: Hyperplane, a: float,
                       full: bool = False) -> Lemma1Outcome:
    """Check ``|y1 - y0| >= a' |y0 - x0|`` under the lemma's hypotheses.

    Hypotheses (otherwise ``skip``): ``y0`` in ``h0``, ``y1 != x0``,
    ``|y0 - y1| < |y0 - x0| / 10`` (dropped when ``full``) and the minimal
    angle between ``h0`` and a hyperplane through ``y1`` is at least ``a``.
    """
    x0 = h0.base_point
    y0 = np.asarray(y0, dtype=complex)
    y1 = np.asarray(y1, dtype=complex)
    r0 = float(np.linalg.norm(y0 - x0))
    gap = float(np.linalg.norm(y1 - y0))
    if np.linalg.norm(y1 - x0) == 0:
        return Lemma1Outcome("skip", "y1 is the base point")
    if not h0.contains(y0, tol=1e-10 * max(1.0, r0)):
        return Lemma1Outcome("skip", "y0 not in H0")
    if not full and not gap < r0 / 10:
        return Lemma1Outcome("skip", "closeness |y0-y1| < |y0|/10 fails", lhs=gap)
    theta = angle(h0, min_angle_hyperplane_through(y1, h0))
    if theta < a:
        return Lemma1Outcome("skip", "minimal angle below threshold", lhs=gap, min_angle=theta)
    rhs = lemma1_constant(a, full) * r0
    status = "pass" if gap >= rhs else "fail"
    return Lemma1Outcome(status, "bound checked", lhs=gap, rhs=rhs, min_angle=theta)


def random_lemma1_configuration(rng: np.random.Generator, m: int, gap_scale: float = 0.1, base_point=None):
    """Random ``(h0, y0, y1)`` with ``y0`` in ``h0`` and ``y1`` uniform in the open ball
    of radius ``gap_scale |y0 - x0|`` around ``y0``."""
    x0 = np.zeros(m, dtype=complex) if base_point is None else np.asarray(base_point, dtype=complex)
    h0 = Hyperplane(x0, complex_gaussian(rng, m))
    y0 = h0.project(x0 + complex_gaussian(rng, m))
    r0 = np.linalg.norm(y0 - x0)
    d = complex_gaussian(rng, m)
    d /= np.linalg.norm(d)
    rad = gap_scale * r0 * rng.random() ** (1.0 / (2 * m))
    return h0, y0, y0 + rad * d
