"""Distance oracles rho(x, V) for the forms of :class:`VarietySpec`.

Every oracle works on a batch of query points at once (rows of an
``(N, m)`` array); complex coordinates are handled directly, which for
holomorphic residuals is the same as Gauss-Newton on the realification
R^{2m}. Returned distances are always ``|x - foot|`` for a foot point on
the set, hence upper bounds on the true distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from ..algebra import Poly, partial_derivative
from ..geometry import complex_gaussian
from .spec import (
    Finite,
    Graph,
    Implicit,
    Intersection,
    Parametric,
    VarietySpec,
    equation_residuals,
    graph_equations,
    is_linear,
    linear_system,
    parametric_polys,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OracleOptions:
    starts: int = 16
    max_iter: int = 200
    gtol: float = 1e-10
    stationarity_tol: float = 1e-8
    penalties: tuple[float, ...] = (1e2, 1e4, 1e6, 1e8, 1e10)
    polish_iter: int = 8
    residual_tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True, eq=False)
class DistanceResult:
    distance: float
    foot_point: np.ndarray
    method: str
    certified: bool
    converged: bool = True
    stationarity: float = 0.0


@dataclass(frozen=True, eq=False)
class DistanceBatch:
    distances: np.ndarray
    feet: np.ndarray
    method: str
    certified: bool
    converged: np.ndarray = field(default=None)
    stationarity: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.distances.shape[0]
        if self.converged is None:
            object.__setattr__(self, "converged", np.ones(n, dtype=bool))
        if self.stationarity is None:
            object.__setattr__(self, "stationarity", np.zeros(n))

    def __len__(self):
        return self.distances.shape[0]

    def __getitem__(self, i) -> DistanceResult:
        return DistanceResult(
            float(self.distances[i]),
            self.feet[i],
            self.method,
            self.certified,
            bool(self.converged[i]),
            float(self.stationarity[i]),
        )


class UnsupportedIntersection(ValueError):
    pass


# -- polynomial systems evaluated in batch --------------------------------


class _System:
    """A list of polynomials with their Jacobian, evaluated on row batches."""

    def __init__(self, polys):
        self.polys = tuple(polys)
        self.n = self.polys[0].num_vars if self.polys else 0
        self.jac = [[partial_derivative(q, j) for j in range(self.n)] for q in self.polys]
        self._hess = None

    @property
    def hess(self):
        if self._hess is None:
            self._hess = [[[partial_derivative(d, l) for l in range(self.n)] for d in row] for row in self.jac]
        return self._hess

    def second_derivatives(self, pts: np.ndarray) -> np.ndarray:
        """``out[b, i, k, l] = d^2 poly_i / dt_k dt_l`` at each row."""
        out = np.empty((pts.shape[0], len(self.polys), self.n, self.n), dtype=complex)
        for i, rows in enumerate(self.hess):
            for k in range(self.n):
                for l in range(k, self.n):
                    out[:, i, k, l] = out[:, i, l, k] = rows[k][l].eval_many(pts)
        return out

    def values(self, pts: np.ndarray) -> np.ndarray:
        return np.stack([q.eval_many(pts) for q in self.polys], axis=1)

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        out = np.empty((pts.shape[0], len(self.polys), self.n), dtype=complex)
        for i, row in enumerate(self.jac):
            for j, q in enumerate(row):
                out[:, i, j] = q.eval_many(pts)
        return out


@lru_cache(maxsize=256)
def _system(polys: tuple[Poly, ...]) -> _System:
    return _System(polys)


def _as_batch(spec: VarietySpec, x) -> np.ndarray:
    pts = np.array(x, dtype=complex, ndmin=2)
    if pts.shape[1] != spec.ambient_dim:
        raise ValueError(f"query has {pts.shape[1]} coordinates, set lives in C^{spec.ambient_dim}")
    return pts


def _norms(a: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a, axis=-1)


# -- exact oracles ----------------------------------------------------------


def _finite(points: np.ndarray, X: np.ndarray) -> DistanceBatch:
    d = np.linalg.norm(X[:, None, :] - points[None, :, :], axis=2)
    idx = np.argmin(d, axis=1)
    return DistanceBatch(d[np.arange(X.shape[0]), idx], points[idx].copy(), "finite", True)


def _linear_implicit(A: np.ndarray, b: np.ndarray, X: np.ndarray) -> DistanceBatch:
    if A.shape[0] == 0:
        return DistanceBatch(np.zeros(X.shape[0]), X.copy(), "linear", True)
    pinv = np.linalg.pinv(A, rcond=1e-12)
    y_part = pinv @ b
    if np.linalg.norm(A @ y_part - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
        raise ValueError("inconsistent linear equations: the set is empty")
    feet = X - (X @ A.T - b) @ pinv.T
    return DistanceBatch(_norms(X - feet), feet, "linear", True)


def _linear_parametric(polys, X: np.ndarray) -> DistanceBatch:
    p = polys[0].num_vars
    L, minus_c = linear_system(polys, p)
    c = -minus_c
    Q = L @ np.linalg.pinv(L, rcond=1e-12)
    feet = c + (X - c) @ Q.T
    return DistanceBatch(_norms(X - feet), feet, "linear", True)


# -- Gauss-Newton for parametrized sets ---------------------------------


def _gauss_newton(sys: _System, X: np.ndarray, T0: np.ndarray, opts: OracleOptions):
    """Damped Gauss-Newton on ``min |phi(t) - x|^2``, one row per (query, start)."""
    T = T0.copy()
    B = T.shape[0]
    p = T.shape[1]
    R = sys.values(T) - X
    r2 = np.sum(np.abs(R) ** 2, axis=1)
    stat = np.full(B, np.inf)
    active = np.ones(B, dtype=bool)
    eye = np.eye(p)
    for _ in range(opts.max_iter):
        a = np.flatnonzero(active)
        if a.size == 0:
            break
        Ta, Ra = T[a], R[a]
        J = sys.jacobian(Ta)
        g = np.einsum("bmp,bm->bp", J.conj(), Ra)
        nJ = np.sqrt(np.sum(np.abs(J) ** 2, axis=(1, 2)))
        nR = np.sqrt(r2[a])
        stat[a] = _norms(g) / np.maximum(nJ * nR, 1e-300)
        onset = nR <= 8 * _EPS * (_norms(X[a]) + 1e-300)
        stat[a[onset]] = 0.0
        done = (stat[a] < opts.gtol) | onset
        active[a[done]] = False
        a, Ta, J, g = a[~done], Ta[~done], J[~done], g[~done]
        if a.size == 0:
            break
        JhJ = np.einsum("bmp,bmq->bpq", J.conj(), J)
        lam = 1e-14 * np.trace(JhJ, axis1=1, axis2=2).real + 1e-300
        step = np.linalg.solve(JhJ + lam[:, None, None] * eye, -g[..., None])[..., 0]
        newton = _newton_step(sys, Ta, R[a], JhJ, g)
        if newton is not None:
            use, nstep = newton
            step[use] = nstep[use]
        alpha = np.ones(a.size)
        pending = np.arange(a.size)
        for _ in range(40):
            Tn = Ta[pending] + alpha[pending, None] * step[pending]
            Rn = sys.values(Tn) - X[a[pending]]
            rn2 = np.sum(np.abs(Rn) ** 2, axis=1)
            ok = rn2 < r2[a[pending]]
            rows = a[pending[ok]]
            T[rows], R[rows], r2[rows] = Tn[ok], Rn[ok], rn2[ok]
            pending = pending[~ok]
            if pending.size == 0:
                break
            alpha[pending] *= 0.5
        # no decrease along the Gauss-Newton direction: a stationary point to working precision
        active[a[pending]] = False
        stat[a[pending]] = np.minimum(stat[a[pending]], opts.stationarity_tol / 2)
    return T, R, r2, stat


def _newton_step(sys: _System, T, R, JhJ, g):
    """Full Newton step on the realified objective, where its Hessian is positive definite.

    With Wirtinger derivatives the Hessian couples ``delta`` and ``conj(delta)``
    through ``C = sum_i r_i conj(phi_i'')``; we solve the equivalent real system.
    """
    p = T.shape[1]
    H2 = sys.second_derivatives(T)
    C = np.einsum("bm,bmkl->bkl", R, H2.conj())
    Ar, Ai, Cr, Ci = JhJ.real, JhJ.imag, C.real, C.imag
    M = np.block([[Ar + Cr, -(Ai - Ci)], [Ai + Ci, Ar - Cr]])
    M = 0.5 * (M + np.swapaxes(M, 1, 2))
    ev = np.linalg.eigvalsh(M)
    use = ev[:, 0] > 1e-10 * np.maximum(ev[:, -1], 1e-300)
    if not use.any():
        return None
    rhs = -np.concatenate([g.real, g.imag], axis=1)
    sol = np.zeros_like(rhs)
    sol[use] = np.linalg.solve(M[use], rhs[use][..., None])[..., 0]
    return use, sol[:, :p] + 1j * sol[:, p:]


def _param_starts(spec: VarietySpec, sys: _System, X: np.ndarray, opts: OracleOptions, nstarts: int) -> np.ndarray:
    p = sys.n
    x0 = spec.base_point
    if isinstance(spec.form, Graph):
        base = X[:, :p] - x0[:p]
    else:
        J0 = sys.jacobian(np.zeros((1, p)))[0]
        base = np.linalg.lstsq(J0, (X - x0).T, rcond=None)[0].T
    rng = np.random.default_rng(opts.seed)
    scale = np.maximum(_norms(X - x0), 1e-300)
    starts = [base, np.zeros_like(base)]
    sigmas = (0.05, 0.2, 0.5, 1.0)
    for k in range(max(nstarts - 2, 0)):
        noise = complex_gaussian(rng, base.shape)
        starts.append(base + sigmas[k % len(sigmas)] * scale[:, None] * noise)
    return np.stack(starts[:nstarts], axis=1)  # (N, S, p)


def _parametric(spec: VarietySpec, X: np.ndarray, opts: OracleOptions) -> DistanceBatch:
    polys = parametric_polys(spec)
    if is_linear(polys):
        return _linear_parametric(polys, X)
    sys = _system(polys)
    S = max(opts.starts, 1)
    T0 = _param_starts(spec, sys, X, opts, S)
    N, p = X.shape[0], sys.n
    Xr = np.repeat(X, S, axis=0)
    T, R, r2, stat = _gauss_newton(sys, Xr, T0.reshape(N * S, p), opts)
    r2 = r2.reshape(N, S)
    best = np.argmin(r2, axis=1)
    rows = np.arange(N) * S + best
    feet = sys.values(T[rows])
    st = stat[rows]
    return DistanceBatch(_norms(X - feet), feet, "gauss-newton", False, st < opts.stationarity_tol, st)


# -- penalty continuation for implicit sets -------------------------------


def _penalty_solve(sys: _System, X: np.ndarray, Y0: np.ndarray, opts: OracleOptions) -> np.ndarray:
    Y = Y0.copy()
    B, m = Y.shape
    eye = np.eye(m)
    inner = max(opts.max_iter // max(len(opts.penalties), 1), 1)
    for mu in opts.penalties:
        H = sys.values(Y)
        phi = np.sum(np.abs(Y - X) ** 2, axis=1) + mu * np.sum(np.abs(H) ** 2, axis=1)
        active = np.ones(B, dtype=bool)
        for _ in range(inner):
            a = np.flatnonzero(active)
            if a.size == 0:
                break
            Ya = Y[a]
            Ha = sys.values(Ya)
            J = sys.jacobian(Ya)
            grad = (Ya - X[a]) + mu * np.einsum("bkm,bk->bm", J.conj(), Ha)
            A = eye + mu * np.einsum("bkm,bkn->bmn", J.conj(), J)
            step = np.linalg.solve(A, -grad[..., None])[..., 0]
            scale = _norms(Ya - X[a]) + _norms(Ya) + 1e-300
            tiny = _norms(step) <= 1e-14 * scale
            active[a[tiny]] = False
            alpha = np.ones(a.size)
            pending = np.flatnonzero(~tiny)
            for _ in range(40):
                if pending.size == 0:
                    break
                rows = a[pending]
                Yn = Y[rows] + alpha[pending, None] * step[pending]
                Hn = sys.values(Yn)
                phin = np.sum(np.abs(Yn - X[rows]) ** 2, axis=1) + mu * np.sum(np.abs(Hn) ** 2, axis=1)
                ok = phin < phi[rows]
                Y[rows[ok]], phi[rows[ok]] = Yn[ok], phin[ok]
                pending = pending[~ok]
                alpha[pending] *= 0.5
            active[a[pending]] = False
    return Y


def _project_step(sys: _System, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """One SQP step: nearest point to X on the linearization of the set at Y."""
    H = sys.values(Y)
    J = sys.jacobian(Y)
    c = np.einsum("bkm,bm->bk", J, Y - X) - H
    Jp = np.linalg.pinv(J, rcond=1e-10)
    return X + np.einsum("bmk,bk->bm", Jp, c)


def _tangential_fraction(sys: _System, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """|tangential part of (y - x)| / |y - x|; zero at a constrained stationary point."""
    J = sys.jacobian(Y)
    d = Y - X
    Jp = np.linalg.pinv(J, rcond=1e-10)
    normal = np.einsum("bmk,bk->bm", Jp, np.einsum("bkm,bm->bk", J, d))
    nd = _norms(d)
    out = _norms(d - normal) / np.maximum(nd, 1e-300)
    out[nd == 0] = 0.0
    return out


def _polish(sys: _System, X: np.ndarray, Y: np.ndarray, opts: OracleOptions) -> np.ndarray:
    res = np.max(np.abs(sys.values(Y)), axis=1)
    for _ in range(opts.polish_iter):
        Yn = _project_step(sys, X, Y)
        resn = np.max(np.abs(sys.values(Yn)), axis=1)
        moved = _norms(Yn - Y)
        ok = np.isfinite(resn) & (resn <= np.maximum(res, opts.residual_tol)) & (moved <= 0.5 * _norms(Y - X) + 1e-300)
        Y = np.where(ok[:, None], Yn, Y)
        res = np.where(ok, resn, res)
    return Y


def _implicit(spec: VarietySpec, equations, X: np.ndarray, opts: OracleOptions) -> DistanceBatch:
    equations = tuple(q for q in equations if not q.is_zero())
    if not equations:
        return DistanceBatch(np.zeros(X.shape[0]), X.copy(), "linear", True)
    if is_linear(equations):
        A, b = linear_system(equations, spec.ambient_dim)
        return _linear_implicit(A, b, X)
    sys = _system(equations)
    N, m = X.shape
    x0 = spec.base_point
    S = max(opts.starts, 2)
    rng = np.random.default_rng(opts.seed)
    scale = np.maximum(_norms(X - x0), 1e-300)
    starts = [X, np.broadcast_to(x0, X.shape)]
    sigmas = (0.05, 0.2, 0.5, 1.0)
    for k in range(S - 2):
        starts.append(X + sigmas[k % len(sigmas)] * scale[:, None] * complex_gaussian(rng, X.shape))
    Y0 = np.stack(starts, axis=1).reshape(N * S, m)
    Xr = np.repeat(X, S, axis=0)
    Y = _penalty_solve(sys, Xr, Y0, opts)
    Y = _polish(sys, Xr, Y, opts)
    res = np.max(np.abs(sys.values(Y)), axis=1)
    d = _norms(Xr - Y)
    d = np.where(res <= opts.residual_tol, d, np.inf).reshape(N, S)
    best = np.argmin(d, axis=1)
    rows = np.arange(N) * S + best
    feet = Y[rows]
    dist = d[np.arange(N), best]
    # the base point is always a feasible candidate
    d0 = _norms(X - x0)
    use0 = ~(dist <= d0)
    feet[use0] = x0
    dist = np.where(use0, d0, dist)
    st = _tangential_fraction(sys, X, feet)
    return DistanceBatch(dist, feet, "penalty", False, st < opts.stationarity_tol, st)


# -- dispatch ---------------------------------------------------------------


def distances(spec: VarietySpec, x, options: OracleOptions | None = None) -> DistanceBatch:
    """Distances from every row of ``x`` to ``spec``."""
    opts = options or OracleOptions()
    X = _as_batch(spec, x)
    form = spec.form
    if isinstance(form, Finite):
        return _finite(np.asarray(form.points), X)
    if isinstance(form, (Graph, Parametric)):
        return _parametric(spec, X, opts)
    if isinstance(form, Implicit):
        return _implicit(spec, form.equations, X, opts)
    from .ops import resolve_intersection

    resolved = resolve_intersection(spec)
    if isinstance(resolved.form, Intersection):
        raise UnsupportedIntersection("intersection of these forms is not supported by the distance oracle")
    return distances(resolved, X, opts)


def distance(spec: VarietySpec, x, options: OracleOptions | None = None) -> DistanceResult:
    return distances(spec, np.asarray(x, dtype=complex)[None, :], options)[0]


# -- brute-force reference ---------------------------------------------------


def _ball_samples(dim: int, radius: float, count: int) -> np.ndarray:
    sampler = qmc.Halton(d=dim, scramble=False)
    vol_ratio = (2.0**dim) / (math.pi ** (dim / 2) / math.gamma(dim / 2 + 1))
    out = np.empty((0, dim))
    while out.shape[0] < count:
        need = int((count - out.shape[0]) * vol_ratio * 1.3) + 16
        pts = 2.0 * sampler.random(need) - 1.0
        out = np.vstack([out, pts[np.sum(pts**2, axis=1) <= 1.0]])
    return radius * out[:count]


def distances_bruteforce(spec: VarietySpec, x, radius: float = 2.0, samples: int = 10_000,
                         options: OracleOptions | None = None) -> DistanceBatch:
    """Reference oracle: dense low-discrepancy parameter search plus local refinement."""
    opts = options or OracleOptions()
    X = _as_batch(spec, x)
    form = spec.form
    if isinstance(form, Finite):
        return _finite(np.asarray(form.points), X)
    if not isinstance(form, (Graph, Parametric)):
        raise TypeError("brute-force oracle needs a graph, parametric or finite set")
    if samples < 1000:
        raise ValueError("brute-force oracle needs at least 1000 samples")
    sys = _system(parametric_polys(spec))
    p = sys.n
    raw = _ball_samples(2 * p, radius, samples)
    T = raw[:, :p] + 1j * raw[:, p:]
    T[0] = 0.0  # keep the base point itself in the sample
    img = sys.values(T)
    N = X.shape[0]
    best = np.empty((N, p), dtype=complex)
    for lo in range(0, N, 64):
        chunk = X[lo : lo + 64]
        d2 = np.sum(np.abs(chunk[:, None, :] - img[None, :, :]) ** 2, axis=2)
        best[lo : lo + 64] = T[np.argmin(d2, axis=1)]
    Tf, R, r2, stat = _gauss_newton(sys, X, best, opts)
    feet = sys.values(Tf)
    return DistanceBatch(_norms(X - feet), feet, "bruteforce", True, stat < opts.stationarity_tol, stat)


def distance_bruteforce(spec: VarietySpec, x, radius: float = 2.0, samples: int = 10_000,
                        options: OracleOptions | None = None) -> DistanceResult:
    return distances_bruteforce(spec, np.asarray(x, dtype=complex)[None, :], radius, samples, options)[0]


def membership(spec: VarietySpec, x, tol: float = 1e-9) -> bool:
    x = np.asarray(x, dtype=complex).reshape(-1)
    form = spec.form
    if isinstance(form, Implicit):
        return bool(equation_residuals(form.equations, x[None, :])[0] < tol)
    if isinstance(form, Graph):
        return bool(equation_residuals(graph_equations(spec), x[None, :])[0] < tol)
    if isinstance(form, Intersection):
        return all(membership(part, x, tol) for part in form.parts)
    return distance(spec, x).distance < tol
