"""Empirical regular-separation exponents.

Probe points near the base point are binned into dyadic shells by their
distance to ``X ∩ Y``. Inside each shell the smallest value of ``log d_Y``
(one-sided, probes on X) or ``log(d_X + d_Y)`` (two-sided, ambient probes)
traces the lower envelope of the separation inequality, and the exponent is
the least-squares slope of that envelope over the deepest shells.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from .variety import (
    OracleOptions,
    VarietySpec,
    distances,
    intersect,
    membership,
    sample_on_variety,
)
from .variety.sampling import ambient_probes, log_uniform_radii

ONE_SIDED = "one-sided"
TWO_SIDED = "two-sided"


class DegenerateEstimate(ValueError):
    pass


class InsufficientShells(ValueError):
    pass


@dataclass(frozen=True)
class EstimatorOptions:
    radius: float = 1.0
    shells: int = 14
    per_shell: int = 64
    seed: int = 0
    mode: str = ONE_SIDED
    fit_fraction: float = 0.5
    min_shell_count: int = 3
    drop_tol: float = 1e-12
    containment_rtol: float = 1e-10
    degenerate_fraction: float = 0.5
    nu_floor: float = 0.9
    consistency_tol: float = 0.25
    two_sided_sampler: str = "stratified"
    oracle: OracleOptions = field(default_factory=OracleOptions)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.shells < 4:
            raise ValueError("need at least 4 shells")
        if self.per_shell < 16:
            raise ValueError("need at least 16 samples per shell")
        if self.mode not in (ONE_SIDED, TWO_SIDED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.two_sided_sampler not in ("stratified", "isotropic"):
            raise ValueError(f"unknown two-sided sampler {self.two_sided_sampler!r}")

    def replace(self, **changes) -> "EstimatorOptions":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(changes)
        return EstimatorOptions(**d)


@dataclass(frozen=True, eq=False)
class SeparationSample:
    x: np.ndarray
    d_X: float | None
    d_Y: float
    d_XY: float
    shell_index: int


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Kept probes as parallel arrays, plus what was filtered out on the way."""

    mode: str
    radius: float
    shells: int
    x: np.ndarray
    d_X: np.ndarray | None
    d_Y: np.ndarray
    d_XY: np.ndarray
    shell_index: np.ndarray
    raw_count: int
    dropped: int
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.d_Y.shape[0]

    def __iter__(self) -> Iterator[SeparationSample]:
        for i in range(len(self)):
            yield SeparationSample(
                self.x[i],
                None if self.d_X is None else float(self.d_X[i]),
                float(self.d_Y[i]),
                float(self.d_XY[i]),
                int(self.shell_index[i]),
            )

    def lhs(self) -> np.ndarray:
        """Left side of the separation inequality for each kept probe."""
        return self.d_Y if self.mode == ONE_SIDED else self.d_X + self.d_Y

    def subset(self, mask) -> "SampleSet":
        mask = np.asarray(mask)
        return SampleSet(
            self.mode, self.radius, self.shells, self.x[mask],
            None if self.d_X is None else self.d_X[mask],
            self.d_Y[mask], self.d_XY[mask], self.shell_index[mask],
            self.raw_count, self.dropped, dict(self.diagnostics),
        )

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "radius": self.radius,
            "shells": self.shells,
            "raw_count": self.raw_count,
            "dropped": self.dropped,
            "samples": [
                {
                    "x": [[float(z.real), float(z.imag)] for z in s.x],
                    "d_X": s.d_X,
                    "d_Y": s.d_Y,
                    "d_XY": s.d_XY,
                    "shell_index": s.shell_index,
                }
                for s in self
            ],
        }


@dataclass(frozen=True)
class ShellBin:
    shell: int
    log_r_center: float
    envelope: float
    count: int


@dataclass(frozen=True)
class ExponentEstimate:
    nu_hat: float | None
    c_hat: float | None
    bin_table: tuple[ShellBin, ...]
    fit_shells: tuple[int, ...]
    fit_residual: float | None
    degenerate: bool
    reason: str
    mode: str
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "nu_hat": self.nu_hat,
            "c_hat": self.c_hat,
            "fit_residual": self.fit_residual,
            "fit_shells": list(self.fit_shells),
            "degenerate": self.degenerate,
            "reason": self.reason,
            "mode": self.mode,
            "bin_table": [asdict(b) for b in self.bin_table],
            "diagnostics": self.diagnostics,
        }

    def bin_table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shell", "log_r_center", "envelope", "count"])
        for b in self.bin_table:
            w.writerow([b.shell, repr(b.log_r_center), repr(b.envelope), b.count])
        return buf.getvalue()


def shell_of(d_xy: np.ndarray, radius: float) -> np.ndarray:
    return np.floor(-np.log2(d_xy / radius)).astype(int)


def shell_center(shell: int, radius: float) -> float:
    """Natural log of the geometric midpoint of ``[r 2^-(j+1), r 2^-j]``."""
    return math.log(radius) - (shell + 0.5) * math.log(2.0)


def _near_set_probes(spec: VarietySpec, count: int, opts: EstimatorOptions, rng) -> np.ndarray:
    """On-set points, half of them pushed off by log-uniformly small relative offsets."""
    pts = sample_on_variety(spec, opts.radius, count, seed=int(rng.integers(2**31)), depth=opts.shells)
    if pts.shape[0] != count:
        idx = rng.integers(0, pts.shape[0], count)
        pts = pts[idx]
    m = spec.ambient_dim
    base = np.linalg.norm(pts - spec.base_point, axis=1)
    rel = log_uniform_radii(rng, 1.0, 2 * opts.shells, count)
    rel[: count // 2] = 0.0
    dirs = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return pts + (rel * base)[:, None] * dirs


def collect_samples(X: VarietySpec, Y: VarietySpec, x0=None, options: EstimatorOptions | None = None,
                    XY: VarietySpec | None = None) -> SampleSet:
    """Probe the separation of ``X`` and ``Y`` near the base point.

    ``XY`` may supply ``X ∩ Y`` in a better form than :func:`intersect` finds.
    """
    opts = options or EstimatorOptions()
    x0 = X.base_point if x0 is None else np.asarray(x0, dtype=complex)
    if not np.allclose(x0, X.base_point, atol=1e-9) or not np.allclose(x0, Y.base_point, atol=1e-9):
        raise ValueError("x0 must be the common base point of X and Y")
    if not membership(X, x0, 1e-9) or not membership(Y, x0, 1e-9):
        raise ValueError("base point is not on both sets")
    XY = intersect(X, Y) if XY is None else XY
    total = opts.shells * opts.per_shell
    rng = np.random.default_rng(opts.seed)
    if opts.mode == ONE_SIDED:
        pts = sample_on_variety(X, opts.radius, total, seed=opts.seed, depth=opts.shells)
        d_X = None
    else:
        if opts.two_sided_sampler == "isotropic":
            pts = ambient_probes(x0, opts.radius, total, rng, opts.shells)
        else:
            n_amb = total // 2
            n_x = (total - n_amb) // 2
            pts = np.vstack([
                ambient_probes(x0, opts.radius, n_amb, rng, opts.shells),
                _near_set_probes(X, n_x, opts, rng),
                _near_set_probes(Y, total - n_amb - n_x, opts, rng),
            ])
        d_X = distances(X, pts, opts.oracle)
    d_Y = distances(Y, pts, opts.oracle)
    d_XY = distances(XY, pts, opts.oracle)
    raw = pts.shape[0]
    keep = d_XY.distances >= opts.drop_tol
    diag = {
        "intersection_form": XY.kind,
        "oracle_methods": {"Y": d_Y.method, "XY": d_XY.method, **({"X": d_X.method} if d_X is not None else {})},
        "non_converged": int((~d_Y.converged).sum() + (~d_XY.converged).sum()
                             + (0 if d_X is None else (~d_X.converged).sum())),
    }
    dxy = d_XY.distances[keep]
    return SampleSet(
        opts.mode, opts.radius, opts.shells, pts[keep],
        None if d_X is None else d_X.distances[keep],
        d_Y.distances[keep], dxy,
        shell_of(dxy, opts.radius) if dxy.size else np.zeros(0, dtype=int),
        raw, int(raw - keep.sum()), diag,
    )


def _degenerate(samples: SampleSet, reason: str, diag: dict) -> ExponentEstimate:
    return ExponentEstimate(None, None, (), (), None, True, reason, samples.mode, diag)


def estimate_exponent(samples: SampleSet, options: EstimatorOptions | None = None) -> ExponentEstimate:
    """Slope of the per-shell lower envelope over the deepest shells."""
    opts = options or EstimatorOptions()
    diag = {"raw_count": samples.raw_count, "dropped": samples.dropped, **samples.diagnostics}
    if samples.raw_count == 0 or samples.dropped > opts.degenerate_fraction * samples.raw_count:
        return _degenerate(samples, "local containment: X∩Y fills the probe set", diag)
    lhs = samples.lhs()
    zero = lhs <= opts.containment_rtol * samples.d_XY
    diag["zero_lhs"] = int(zero.sum())
    if zero.sum() > opts.degenerate_fraction * len(samples):
        return _degenerate(samples, "local containment: Y contains the probe set", diag)
    ok = ~zero & (samples.shell_index >= 0) & (samples.shell_index < samples.shells)
    vals = np.log(lhs[ok])
    idx = samples.shell_index[ok]
    bins = []
    for j in np.unique(idx):
        sel = idx == j
        bins.append(ShellBin(int(j), shell_center(int(j), samples.radius), float(vals[sel].min()), int(sel.sum())))
    populated = [b for b in bins if b.count >= opts.min_shell_count]
    if len(populated) < 2:
        raise InsufficientShells(f"only {len(populated)} populated shells")
    k = max(2, math.ceil(samples.shells * opts.fit_fraction))
    fit = sorted(populated, key=lambda b: b.shell, reverse=True)[:k]
    xs = np.array([b.log_r_center for b in fit])
    ys = np.array([b.envelope for b in fit])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return ExponentEstimate(
        float(slope), float(math.exp(intercept)), tuple(bins), tuple(sorted(b.shell for b in fit)),
        float(np.sqrt(np.mean(resid**2))), False, "", samples.mode, diag,
    )


def estimate(X: VarietySpec, Y: VarietySpec, options: EstimatorOptions | None = None,
             XY: VarietySpec | None = None) -> ExponentEstimate:
    opts = options or EstimatorOptions()
    return estimate_exponent(collect_samples(X, Y, None, opts, XY), opts)


@dataclass(frozen=True)
class ViolationReport:
    fraction: float
    violations: int
    total: int
    worst_margin: float


def verify_separation(samples: SampleSet, nu: float, c: float, min_shell: int | None = None) -> ViolationReport:
    """How often ``lhs >= c d_XY^nu`` fails; margins are ``log lhs - log(c d_XY^nu)``."""
    if nu <= 0 or c <= 0:
        raise ValueError("nu and c must be positive")
    sel = np.ones(len(samples), dtype=bool) if min_shell is None else samples.shell_index >= min_shell
    lhs = samples.lhs()[sel]
    rhs = c * samples.d_XY[sel] ** nu
    with np.errstate(divide="ignore"):
        margin = np.log(lhs) - np.log(rhs)
    bad = int(np.sum(lhs < rhs))
    total = int(sel.sum())
    return ViolationReport(bad / total if total else 0.0, bad, total, float(margin.min()) if total else math.inf)


@dataclass(frozen=True)
class ModesConsistency:
    nu_one_sided: float
    nu_two_sided: float
    gap: float
    one_sided: ExponentEstimate
    two_sided: ExponentEstimate


def modes_consistency(X: VarietySpec, Y: VarietySpec, x0=None, options: EstimatorOptions | None = None) -> ModesConsistency:
    """Estimate in both formulations; they must agree once the exponent is at least 1."""
    opts = options or EstimatorOptions()
    one = estimate_exponent(collect_samples(X, Y, x0, opts.replace(mode=ONE_SIDED)), opts)
    two = estimate_exponent(collect_samples(X, Y, x0, opts.replace(mode=TWO_SIDED)), opts)
    for est in (one, two):
        if est.degenerate:
            raise DegenerateEstimate(f"{est.mode} estimate is degenerate: {est.reason}")
        if est.nu_hat < opts.nu_floor:
            raise DegenerateEstimate(f"{est.mode} estimate {est.nu_hat:.3f} is below the floor {opts.nu_floor}")
    return ModesConsistency(one.nu_hat, two.nu_hat, abs(one.nu_hat - two.nu_hat), one, two)
