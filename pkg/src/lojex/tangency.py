"""Order of tangency of graph manifolds, and the exponent bound it implies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_JET_ORDER, AffineMap, Poly, compose_affine, leading_form, taylor_jet
from .geometry import complex_gaussian

JET_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class TangencyReport:
    """``s_prime`` is None when every jet coefficient up to degree ``K`` vanishes."""

    K: int
    s_prime: int | None
    witness_alpha: tuple[int, ...] | None
    witness_modulus: float | None
    witness_component: int | None = None

    @property
    def s(self) -> int | None:
        return None if self.s_prime is None else self.s_prime - 1

    @property
    def exceeds_K(self) -> bool:
        return self.s_prime is None

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "s_prime": self.s_prime,
            "s": self.s,
            "witness_alpha": None if self.witness_alpha is None else list(self.witness_alpha),
            "witness_modulus": self.witness_modulus,
        }


def order_of_tangency(f: Sequence[Poly], g: Sequence[Poly], center=None, K: int = DEFAULT_JET_ORDER,
                      tol: float = JET_ZERO_TOL) -> TangencyReport:
    """Lowest total degree at which the jets of ``f`` and ``g`` at ``center`` differ."""
    f, g = list(f), list(g)
    if not f:
        raise ValueError("need at least one component")
    if len(f) != len(g):
        raise ValueError(f"component counts differ: {len(f)} vs {len(g)}")
    p = f[0].num_vars
    if any(q.num_vars != p for q in f + g):
        raise ValueError("components have different parameter counts")
    if K < 1:
        raise ValueError("truncation K must be at least 1")
    center = np.zeros(p, dtype=complex) if center is None else np.asarray(center, dtype=complex)
    best = None
    for i, (a, b) in enumerate(zip(f, g)):
        hit = taylor_jet(a - b, center, K).first_nonvanishing(tol)
        if hit is not None and (best is None or hit[0] < best[0]):
            best = (hit[0], hit[1], abs(hit[2]), i)
    if best is None:
        return TangencyReport(K, None, None, None, None)
    deg, alpha, mod, comp = best
    return TangencyReport(K, deg, tuple(alpha), float(mod), comp)


@dataclass(frozen=True)
class ExponentBound:
    """``value`` is a certified lower bound for the exponent; ``unbounded`` means only ``floor`` is certified."""

    value: int | None
    unbounded: bool
    floor: int

    def to_json(self) -> dict:
        return {"value": self.value if not self.unbounded else "unbounded", "floor": self.floor}


def exponent_lower_bound(report: TangencyReport) -> ExponentBound:
    if report.s_prime is None:
        return ExponentBound(None, True, report.K + 1)
    return ExponentBound(report.s_prime, False, report.s_prime)


def _restrict_to_line(p: Poly, direction: np.ndarray) -> Poly:
    return compose_affine(p, AffineMap(direction.reshape(-1, 1), np.zeros(direction.shape[0])))


def line_vanishing_order(p: Poly, direction, K: int = DEFAULT_JET_ORDER, tol: float = JET_ZERO_TOL) -> int | None:
    """Vanishing order at 0 of ``t -> p(t v)``; None when it exceeds ``K``."""
    v = np.ravel(np.asarray(direction, dtype=complex))
    if v.shape[0] != p.num_vars:
        raise ValueError("direction has the wrong length")
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    hit = taylor_jet(_restrict_to_line(p, v), np.zeros(1), K).first_nonvanishing(tol)
    return None if hit is None else hit[0]


def generic_line_order(p: Poly, trials: int = 5, seed: int = 0, K: int = DEFAULT_JET_ORDER,
                       tol: float = JET_ZERO_TOL) -> int:
    """Smallest vanishing order over random lines through 0; generically the leading-form degree."""
    if p.is_zero():
        raise ValueError("zero polynomial has no finite order")
    if trials < 3:
        raise ValueError("need at least 3 trials")
    rng = np.random.default_rng(seed)
    orders = []
    for _ in range(trials):
        v = complex_gaussian(rng, p.num_vars)
        orders.append(line_vanishing_order(p, v / np.linalg.norm(v), K, tol))
    finite = [o for o in orders if o is not None]
    if not finite:
        raise ValueError(f"every line exceeded K={K}; the zero tolerance is too coarse for this input")
    r = min(finite)
    if p.order <= K:
        expected = leading_form(p)[0]
        if r != expected:
            raise ValueError(f"line orders {orders} disagree with the leading-form degree {expected}")
    return r
