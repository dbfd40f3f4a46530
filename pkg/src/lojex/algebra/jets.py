"""Affine maps, composition, and truncated Taylor jets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .poly import ZERO_TOL, MultiIndex, Poly, _clean, _horner, grlex_key

DEFAULT_JET_ORDER = 12


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``t -> linear @ t + translation`` from C^domain_dim to C^codomain_dim."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear, dtype=complex, ndmin=2)
        tr = np.array(self.translation, dtype=complex).reshape(-1)
        if lin.shape[0] != tr.shape[0]:
            raise ValueError(f"linear part {lin.shape} does not match translation of length {tr.shape[0]}")
        lin.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(np.eye(n, dtype=complex), np.zeros(n, dtype=complex))

    @property
    def domain_dim(self) -> int:
        return self.linear.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.linear.shape[0]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        return t @ self.linear.T + self.translation

    def then(self, outer: "AffineMap") -> "AffineMap":
        """The composite ``outer(self(t))``."""
        return AffineMap(outer.linear @ self.linear, outer.linear @ self.translation + outer.translation)


def compose_affine(p: Poly, a: AffineMap) -> Poly:
    """Exact pullback ``q(t) = p(a(t))``."""
    if a.codomain_dim != p.num_vars:
        raise ValueError(f"map lands in C^{a.codomain_dim} but polynomial has {p.num_vars} variables")
    k = a.domain_dim
    if p.is_zero():
        return Poly.zero(k)
    coords = [Poly.linear(list(a.linear[i]), a.translation[i]) for i in range(p.num_vars)]
    return _horner(list(p.terms), coords, 0, Poly.zero(k))


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients of total degree <= ``order`` at some center."""

    num_vars: int
    order: int
    coeffs: tuple[tuple[MultiIndex, complex], ...] = ()

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation degree must be non-negative")
        for alpha, _ in self.coeffs:
            if len(alpha) != self.num_vars or sum(alpha) > self.order:
                raise ValueError(f"multi-index {alpha} outside the jet")

    @classmethod
    def from_dict(cls, num_vars: int, order: int, coeffs: Mapping[Sequence[int], complex]) -> "Jet":
        items = [(tuple(a), c) for a, c in coeffs.items() if sum(a) <= order]
        return cls(num_vars, order, _clean(items, ZERO_TOL))

    @classmethod
    def of(cls, p: Poly, order: int = DEFAULT_JET_ORDER) -> "Jet":
        return cls(p.num_vars, order, tuple(t for t in p.terms if sum(t[0]) <= order))

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return dict(self.coeffs).get(tuple(alpha), 0j)

    def derivative_at_center(self, alpha: Sequence[int]) -> complex:
        """D^alpha f(center) = alpha! * coefficient."""
        return self.coefficient(alpha) * math.prod(math.factorial(a) for a in alpha)

    def to_poly(self) -> Poly:
        return Poly(self.num_vars, self.coeffs)

    def _check(self, other: "Jet"):
        if other.num_vars != self.num_vars:
            raise ValueError("jets in different numbers of variables")

    def __add__(self, other: "Jet") -> "Jet":
        self._check(other)
        k = min(self.order, other.order)
        items = [t for t in self.coeffs + other.coeffs if sum(t[0]) <= k]
        return Jet(self.num_vars, k, _clean(items, ZERO_TOL))

    def __neg__(self) -> "Jet":
        return Jet(self.num_vars, self.order, tuple((a, -c) for a, c in self.coeffs))

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (-other)

    def __mul__(self, other: "Jet") -> "Jet":
        self._check(other)
        k = min(self.order, other.order)
        out: dict[MultiIndex, complex] = {}
        for a, ca in self.coeffs:
            for b, cb in other.coeffs:
                if sum(a) + sum(b) <= k:
                    key = tuple(x + y for x, y in zip(a, b))
                    out[key] = out.get(key, 0j) + ca * cb
        return Jet(self.num_vars, k, _clean(out.items(), ZERO_TOL))

    def first_nonvanishing(self, tol: float = 0.0) -> tuple[int, MultiIndex, complex] | None:
        """Lowest degree carrying a coefficient of modulus > ``tol``, with its first witness."""
        for alpha, c in sorted(self.coeffs, key=lambda t: grlex_key(t[0])):
            if abs(c) > tol:
                return sum(alpha), alpha, c
        return None


def taylor_jet(p: Poly, center, order: int = DEFAULT_JET_ORDER) -> Jet:
    """Coefficients of ``p`` recentred at ``center``, truncated at total degree ``order``."""
    center = np.ravel(np.asarray(center, dtype=complex))
    if center.shape[0] != p.num_vars:
        raise ValueError(f"center has {center.shape[0]} coordinates, polynomial has {p.num_vars} variables")
    if order < 0:
        raise ValueError("truncation degree must be non-negative")
    if not np.any(center):
        return Jet.of(p, order)
    shifted = compose_affine(p, AffineMap(np.eye(p.num_vars), center))
    return Jet.of(shifted, order)
