"""Points on a local set with log-uniformly distributed distances to the base point."""

from __future__ import annotations

import numpy as np

from ..geometry import complex_gaussian
from .oracles import _project_step, _system, distances
from .spec import (
    Finite,
    Graph,
    Implicit,
    Intersection,
    Parametric,
    VarietySpec,
    equation_residuals,
    is_linear,
    linear_system,
    parametric_polys,
)

ON_SET_TOL = 1e-9


class SamplingError(RuntimeError):
    pass


def log_uniform_radii(rng: np.random.Generator, radius: float, depth: int, count: int) -> np.ndarray:
    """``count`` radii with log2 uniform on ``[log2 r - depth, log2 r]``."""
    return radius * 2.0 ** (-depth * rng.random(count))


def _unit_directions(rng, count, dim) -> np.ndarray:
    d = complex_gaussian(rng, (count, dim))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _on_parametrized(spec: VarietySpec, rho: np.ndarray, rng) -> np.ndarray:
    sys = _system(parametric_polys(spec))
    x0 = spec.base_point
    dirs = _unit_directions(rng, rho.shape[0], sys.n)

    def dist_at(s):
        return np.linalg.norm(sys.values(s[:, None] * dirs) - x0, axis=1)

    hi = rho.copy()
    for _ in range(200):
        short = dist_at(hi) < rho
        if not short.any():
            break
        hi[short] *= 2.0
    lo = np.zeros_like(rho)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = dist_at(mid) < rho
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return sys.values(hi[:, None] * dirs)


def _on_implicit(spec: VarietySpec, equations, rho: np.ndarray, rng, budget: int) -> np.ndarray:
    x0 = spec.base_point
    m = spec.ambient_dim
    equations = tuple(q for q in equations if not q.is_zero())
    n = rho.shape[0]
    if not equations:
        return x0 + rho[:, None] * _unit_directions(rng, n, m)
    if is_linear(equations):
        A, b = linear_system(equations, m)
        out = np.empty((n, m), dtype=complex)
        todo = np.arange(n)
        for _ in range(budget):
            if todo.size == 0:
                break
            q = x0 + _unit_directions(rng, todo.size, m)
            foot = distances(spec, q).feet - x0
            nf = np.linalg.norm(foot, axis=1)
            ok = nf > 1e-8
            out[todo[ok]] = x0 + foot[ok] * (rho[todo[ok]] / nf[ok])[:, None]
            todo = todo[~ok]
        if todo.size:
            raise SamplingError("the linear set is the base point only; cannot sample at positive radius")
        return out
    sys = _system(equations)
    out = np.empty((n, m), dtype=complex)
    todo = np.arange(n)
    for _ in range(budget):
        if todo.size == 0:
            break
        target = rho[todo]
        Y = x0 + target[:, None] * _unit_directions(rng, todo.size, m)
        for _ in range(6):
            for _ in range(30):
                Y = _project_step(sys, Y, Y)
            r = np.linalg.norm(Y - x0, axis=1)
            Y = np.where((r > 0)[:, None], x0 + (Y - x0) * (target / np.maximum(r, 1e-300))[:, None], Y)
        for _ in range(30):
            Y = _project_step(sys, Y, Y)
        res = equation_residuals(equations, Y)
        r = np.linalg.norm(Y - x0, axis=1)
        ok = np.isfinite(res) & (res < ON_SET_TOL) & (r > 0.5 * target) & (r < 2.0 * target)
        out[todo[ok]] = Y[ok]
        todo = todo[~ok]
    if todo.size:
        raise SamplingError(f"{todo.size} projections onto the implicit set failed within the retry budget")
    return out


def sample_on_variety(spec: VarietySpec, radius: float, count: int, seed: int = 0, depth: int = 14,
                      budget: int = 8) -> np.ndarray:
    """``count`` points of ``spec`` with |x - x0| log-uniform in ``[radius 2^-depth, radius]``.

    Finite sets return their points. Implicit sets are sampled by Newton
    projection of random ambient points followed by radius correction.
    """
    rng = np.random.default_rng(seed)
    form = spec.form
    if isinstance(form, Finite):
        return np.array(form.points, dtype=complex)
    rho = log_uniform_radii(rng, radius, depth, count)
    if isinstance(form, (Graph, Parametric)):
        return _on_parametrized(spec, rho, rng)
    if isinstance(form, Implicit):
        return _on_implicit(spec, form.equations, rho, rng, budget)
    if isinstance(form, Intersection):
        from .ops import implicit_equations, resolve_intersection

        resolved = resolve_intersection(spec)
        if not isinstance(resolved.form, Intersection):
            return sample_on_variety(resolved, radius, count, seed, depth, budget)
        eqs = implicit_equations(spec)
        if eqs is None:
            raise SamplingError("cannot sample this intersection")
        return _on_implicit(spec, eqs, rho, rng, budget)
    raise TypeError(f"unknown form {form.kind}")


def ambient_probes(x0: np.ndarray, radius: float, count: int, rng, depth: int) -> np.ndarray:
    """Isotropic ambient points: Gaussian directions, log-uniform radii."""
    rho = log_uniform_radii(rng, radius, depth, count)
    return x0 + rho[:, None] * _unit_directions(rng, count, x0.shape[0])



