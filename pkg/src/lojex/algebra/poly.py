"""Sparse multivariate polynomials with complex coefficients.

Terms are kept in graded lexicographic order (lowest total degree first,
descending lex inside a degree), so two equal polynomials always have the
same representation and the lowest-degree homogeneous part is a prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

# Coefficients whose modulus falls below this after arithmetic are dropped.
ZERO_TOL = 1e-14

MultiIndex = tuple[int, ...]


def grlex_key(alpha: MultiIndex) -> tuple:
    return (sum(alpha), tuple(-a for a in alpha))


def _clean(items: Iterable[tuple[MultiIndex, complex]], tol: float) -> tuple:
    merged: dict[MultiIndex, complex] = {}
    for alpha, c in items:
        merged[alpha] = merged.get(alpha, 0j) + complex(c)
    kept = [(a, c) for a, c in merged.items() if abs(c) > 0 and abs(c) >= tol]
    kept.sort(key=lambda t: grlex_key(t[0]))
    return tuple(kept)


@dataclass(frozen=True)
class Poly:
    """Immutable sparse polynomial in ``num_vars`` complex variables."""

    num_vars: int
    terms: tuple[tuple[MultiIndex, complex], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        for alpha, _ in self.terms:
            if len(alpha) != self.num_vars:
                raise ValueError(f"multi-index {alpha} has wrong length for {self.num_vars} variables")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_dict(cls, num_vars: int, coeffs: Mapping[Sequence[int], complex], tol: float = ZERO_TOL) -> "Poly":
        items = [(tuple(int(a) for a in alpha), c) for alpha, c in coeffs.items()]
        for alpha, _ in items:
            if len(alpha) != num_vars or min(alpha, default=0) < 0:
                raise ValueError(f"invalid multi-index {alpha} for {num_vars} variables")
        return cls(num_vars, _clean(items, tol))

    @classmethod
    def zero(cls, num_vars: int) -> "Poly":
        return cls(num_vars, ())

    @classmethod
    def constant(cls, num_vars: int, value: complex) -> "Poly":
        return cls.from_dict(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Poly":
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range")
        alpha = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls(num_vars, ((alpha, 1 + 0j),))

    @classmethod
    def linear(cls, coeffs: Sequence[complex], const: complex = 0j) -> "Poly":
        n = len(coeffs)
        d = {tuple(1 if i == j else 0 for i in range(n)): c for j, c in enumerate(coeffs)}
        d[(0,) * n] = const
        return cls.from_dict(n, d)

    # -- basic queries --------------------------------------------------
    def as_dict(self) -> dict[MultiIndex, complex]:
        return dict(self.terms)

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return self.as_dict().get(tuple(alpha), 0j)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return sum(self.terms[-1][0]) if self.terms else -1

    @property
    def order(self) -> int:
        """Lowest total degree of a term; -1 for the zero polynomial."""
        return sum(self.terms[0][0]) if self.terms else -1

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.num_vars != self.num_vars:
                raise ValueError("polynomials live in different numbers of variables")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Poly.constant(self.num_vars, complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly(self.num_vars, _clean(self.terms + other.terms, ZERO_TOL))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.num_vars, tuple((a, -c) for a, c in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[MultiIndex, complex] = {}
        for a, ca in self.terms:
            for b, cb in other.terms:
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0j) + ca * cb
        return Poly(self.num_vars, _clean(out.items(), ZERO_TOL))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation -----------------------------------------------------
    def __call__(self, point):
        return evaluate(self, point)

    def eval_many(self, points) -> np.ndarray:
        """Vectorized evaluation at the rows of an ``(N, num_vars)`` array."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim != 2 or pts.shape[1] != self.num_vars:
            raise ValueError(f"expected points of shape (N, {self.num_vars}), got {pts.shape}")
        out = np.zeros(pts.shape[0], dtype=complex)
        if not self.terms:
            return out
        maxdeg = max(max(a) for a, _ in self.terms)
        powers = np.ones((maxdeg + 1,) + pts.shape, dtype=complex)
        for k in range(1, maxdeg + 1):
            powers[k] = powers[k - 1] * pts
        cols = np.arange(self.num_vars)
        for alpha, c in self.terms:
            out += c * np.prod(powers[list(alpha), :, cols].T, axis=1)
        return out

    def __str__(self):
        return to_string(self)


def _horner(groups: list[tuple[MultiIndex, object]], values: Sequence, var: int, zero):
    """Nested Horner evaluation, one variable at a time.

    Works over any ring whose elements support ``+`` and ``*`` (numbers or Polys).
    """
    if var == len(values):
        acc = zero
        for _, c in groups:
            acc = acc + c
        return acc
    by_power: dict[int, list] = {}
    for alpha, c in groups:
        by_power.setdefault(alpha[var], []).append((alpha, c))
    top = max(by_power)
    acc = zero
    x = values[var]
    for k in range(top, -1, -1):
        acc = acc * x
        if k in by_power:
            acc = acc + _horner(by_power[k], values, var + 1, zero)
    return acc


def evaluate(p: Poly, point) -> complex:
    pt = [complex(v) for v in np.ravel(np.asarray(point, dtype=complex))]
    if len(pt) != p.num_vars:
        raise ValueError(f"point has {len(pt)} coordinates, polynomial has {p.num_vars} variables")
    if not p.terms:
        return 0j
    return complex(_horner(list(p.terms), pt, 0, 0j))


def partial_derivative(p: Poly, var_index: int) -> Poly:
    if not 0 <= var_index < p.num_vars:
        raise IndexError(f"variable index {var_index} out of range for {p.num_vars} variables")
    out = []
    for alpha, c in p.terms:
        k = alpha[var_index]
        if k:
            beta = alpha[:var_index] + (k - 1,) + alpha[var_index + 1 :]
            out.append((beta, c * k))
    return Poly(p.num_vars, _clean(out, ZERO_TOL))


def derivative(p: Poly, alpha: Sequence[int]) -> Poly:
    """Iterated partial derivative D^alpha p."""
    q = p
    for i, k in enumerate(alpha):
        for _ in range(k):
            q = partial_derivative(q, i)
    return q


def homogeneous_part(p: Poly, degree: int) -> Poly:
    return Poly(p.num_vars, tuple(t for t in p.terms if sum(t[0]) == degree))


def truncate(p: Poly, max_degree: int) -> Poly:
    return Poly(p.num_vars, tuple(t for t in p.terms if sum(t[0]) <= max_degree))


def leading_form(p: Poly) -> tuple[int, Poly]:
    """Lowest-degree homogeneous part of ``p`` and its degree."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no leading form")
    r = p.order
    return r, homogeneous_part(p, r)


def jacobian_polys(polys: Sequence[Poly]) -> list[list[Poly]]:
    return [[partial_derivative(q, j) for j in range(q.num_vars)] for q in polys]


def max_abs_coefficient(p: Poly) -> float:
    return max((abs(c) for _, c in p.terms), default=0.0)


# -- printing ----------------------------------------------------------


def default_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_coeff(c: complex) -> tuple[str, str]:
    """Return (sign, unsigned literal) such that sign*literal == c exactly."""
    sign = "+"
    if c.real < 0 or (c.real == 0 and c.imag < 0):
        sign, c = "-", -c
    re, im = abs(c.real), c.imag
    if im == 0:
        return sign, _fmt_real(re)
    if re == 0:
        # parenthesized so that "a + bi*x" is not read back as the literal (a+bi)
        return sign, f"({_fmt_real(im)}i)"
    op = "+" if im > 0 else "-"
    return sign, f"({_fmt_real(re)}{op}{_fmt_real(abs(im))}i)"


def _fmt_monomial(alpha: MultiIndex, names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, alpha):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def to_string(p: Poly, names: Sequence[str] | None = None) -> str:
    """Render in the expression grammar accepted by :func:`parse_poly`."""
    names = list(names) if names is not None else default_names(p.num_vars)
    if len(names) != p.num_vars:
        raise ValueError("wrong number of variable names")
    if not p.terms:
        return "0"
    out = []
    for i, (alpha, c) in enumerate(p.terms):
        sign, lit = _fmt_coeff(c)
        mono = _fmt_monomial(alpha, names)
        if mono and lit in ("1.0",):
            body = mono
        elif mono:
            body = f"{lit}*{mono}"
        else:
            body = lit
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)
