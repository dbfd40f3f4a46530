"""Verification checks run by scenarios. Each returns a :class:`CheckOutcome`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry import (
    Hyperplane,
    lemma1_bound_check,
    lemma1_constant,
    orthonormal_frame,
    parametrization,
    random_lemma1_configuration,
    sample_generic_hyperplane,
)
from ..lojasiewicz import (
    DegenerateEstimate,
    EstimatorOptions,
    collect_samples,
    estimate_exponent,
    modes_consistency,
    shell_center,
)
from ..tangency import exponent_lower_bound, order_of_tangency
from ..variety import (
    UnsupportedIntersection,
    VarietySpec,
    ambient_probes,
    distances,
    hyperplane_variety,
    intersect,
    section,
)

PASS, FAIL, ERROR, SKIPPED = "pass", "fail", "error", "skipped"


@dataclass
class CheckOutcome:
    status: str
    reason: str = ""
    tolerances: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def derive_seed(*entropy: int) -> int:
    return int(np.random.SeedSequence([int(e) for e in entropy]).generate_state(1)[0])


def _estimate_record(est) -> dict:
    rec = est.to_json()
    rec.pop("diagnostics", None)
    return rec


def _hyperplanes(m: int, x0, trials: int, seed: int, normals=None) -> list[Hyperplane]:
    if normals is not None:
        from ..variety.spec import _cvec_parse

        return [Hyperplane(x0, _cvec_parse(n)) for n in normals]
    return [sample_generic_hyperplane(m, x0, derive_seed(seed, t)) for t in range(trials)]


def check_estimate(X: VarietySpec, Y: VarietySpec, options: EstimatorOptions, seed: int,
                   nu_range=None, repeats: int = 1) -> CheckOutcome:
    tol = {"nu_range": nu_range, "nu_floor": options.nu_floor}
    runs = []
    for k in range(repeats):
        opts = options.replace(seed=derive_seed(seed, k))
        runs.append(estimate_exponent(collect_samples(X, Y, None, opts), opts))
    first = runs[0]
    results = {"estimate": _estimate_record(first)}
    if repeats > 1:
        results["nu_hats"] = [r.nu_hat for r in runs]
    diag = first.diagnostics
    if any(r.degenerate for r in runs):
        bad = next(r for r in runs if r.degenerate)
        return CheckOutcome(ERROR, f"degenerate estimate: {bad.reason}", tol, results, diag)
    nus = [r.nu_hat for r in runs]
    if nu_range is not None:
        lo, hi = nu_range
        ok = all(lo <= v <= hi for v in nus)
        reason = f"nu_hat {'within' if ok else 'outside'} [{lo}, {hi}]"
        return CheckOutcome(PASS if ok else FAIL, reason, tol, results, diag)
    ok = all(v >= options.nu_floor for v in nus)
    return CheckOutcome(PASS if ok else FAIL, f"nu_hat {'>=' if ok else '<'} floor {options.nu_floor}",
                        tol, results, diag)


def check_section_monotonicity(X: VarietySpec, Y: VarietySpec, options: EstimatorOptions, seed: int,
                               trials: int = 20, tol: float = 0.2, pass_fraction: float = 0.9,
                               median_range=None, hyperplanes=None) -> CheckOutcome:
    """Sectioning by generic hyperplanes through the base point should not raise the exponent."""
    tols = {"tol_section": tol, "pass_fraction": pass_fraction, "median_range": median_range,
            "nu_floor": options.nu_floor}
    XY = intersect(X, Y)
    amb_opts = options.replace(seed=derive_seed(seed, 0))
    ambient = estimate_exponent(collect_samples(X, Y, None, amb_opts, XY), amb_opts)
    results = {"ambient": _estimate_record(ambient)}
    if ambient.degenerate:
        return CheckOutcome(ERROR, f"degenerate ambient estimate: {ambient.reason}", tols, results)
    if ambient.nu_hat < options.nu_floor:
        return CheckOutcome(ERROR, f"ambient estimate {ambient.nu_hat:.4f} below floor {options.nu_floor}",
                            tols, results)
    hs = _hyperplanes(X.ambient_dim, X.base_point, trials, derive_seed(seed, 1), hyperplanes)
    per_trial = []
    for t, h in enumerate(hs):
        rec = {"trial": t, "normal": [[float(z.real), float(z.imag)] for z in h.normal]}
        try:
            sx, sy, sxy = section(X, h), section(Y, h), section(XY, h)
            opts = options.replace(seed=derive_seed(seed, 2, t))
            est = estimate_exponent(collect_samples(sx, sy, None, opts, sxy), opts)
        except (DegenerateEstimate, ValueError, UnsupportedIntersection) as e:
            rec.update(status="degenerate", reason=f"{type(e).__name__}: {e}", nu_hat=None)
            per_trial.append(rec)
            continue
        if est.degenerate:
            rec.update(status="degenerate", reason=est.reason, nu_hat=None)
        else:
            ok = est.nu_hat <= ambient.nu_hat + tol
            rec.update(status=PASS if ok else FAIL, nu_hat=est.nu_hat)
        per_trial.append(rec)
    # purity: the ambient estimate is reproduced after the trials
    again = estimate_exponent(collect_samples(X, Y, None, amb_opts, XY), amb_opts)
    counted = [r for r in per_trial if r["status"] != "degenerate"]
    nus = [r["nu_hat"] for r in counted]
    passed = sum(r["status"] == PASS for r in counted)
    results.update(
        trials=per_trial,
        degenerate_trials=len(per_trial) - len(counted),
        passed_trials=passed,
        counted_trials=len(counted),
        pass_fraction=passed / len(counted) if counted else None,
        median_section_nu=float(np.median(nus)) if nus else None,
        ambient_reproduced=again.nu_hat == ambient.nu_hat,
    )
    if not counted:
        return CheckOutcome(SKIPPED, "every sectioned trial was degenerate", tols, results)
    reasons = []
    ok = passed / len(counted) >= pass_fraction
    if not ok:
        reasons.append(f"only {passed}/{len(counted)} trials within tolerance")
    if median_range is not None:
        med = results["median_section_nu"]
        if not median_range[0] <= med <= median_range[1]:
            ok = False
            reasons.append(f"median {med:.4f} outside {median_range}")
    if not results["ambient_reproduced"]:
        ok = False
        reasons.append("ambient estimate not reproduced after sectioning")
    return CheckOutcome(PASS if ok else FAIL, "; ".join(reasons) or f"{passed}/{len(counted)} trials within tolerance",
                        tols, results)


def comparability_ratios(X: VarietySpec, h: Hyperplane, options: EstimatorOptions, seed: int,
                         floor: float = 1e-12) -> dict:
    """Per-shell maxima of ``dist(x, X ∩ h) / dist(x, X)`` for ``x`` in ``h``, shells by ``|x - x0|``."""
    rng = np.random.default_rng(seed)
    frame = orthonormal_frame(h)
    count = options.shells * options.per_shell
    coords = ambient_probes(np.zeros(X.ambient_dim - 1, dtype=complex), options.radius, count, rng, options.shells)
    pts = parametrization(frame)(coords)
    XH = intersect(X, hyperplane_variety(h))
    d_x = distances(X, pts, options.oracle).distances
    d_xh = distances(XH, pts, options.oracle).distances
    keep = d_x >= floor
    radius = np.linalg.norm(pts - X.base_point, axis=1)
    shell = np.floor(-np.log2(radius / options.radius)).astype(int)
    rows = []
    for j in sorted(set(shell[keep].tolist())):
        if not 0 <= j < options.shells:
            continue
        sel = keep & (shell == j)
        if sel.sum() < options.min_shell_count:
            continue
        rows.append({"shell": j, "log_r_center": shell_center(j, options.radius),
                     "max_ratio": float(np.max(d_xh[sel] / d_x[sel])), "count": int(sel.sum())})
    return {"intersection_form": XH.kind, "excluded": int((~keep).sum()), "shells": rows}


def check_distance_comparability(X: VarietySpec, options: EstimatorOptions, seed: int, trials: int = 20,
                                 ratio_bound: float = 3.0, min_growth_slope: float = -0.1,
                                 pass_fraction: float = 0.9, hyperplanes=None) -> CheckOutcome:
    """Distance to ``X ∩ H`` should be comparable to distance to ``X`` for points of ``H``."""
    tols = {"ratio_bound": ratio_bound, "min_growth_slope": min_growth_slope, "pass_fraction": pass_fraction}
    hs = _hyperplanes(X.ambient_dim, X.base_point, trials, derive_seed(seed, 1), hyperplanes)
    per_trial = []
    for t, h in enumerate(hs):
        rec = {"trial": t, "normal": [[float(z.real), float(z.imag)] for z in h.normal]}
        try:
            table = comparability_ratios(X, h, options, derive_seed(seed, 2, t))
        except (UnsupportedIntersection, ValueError) as e:
            rec.update(status=SKIPPED, reason=f"{type(e).__name__}: {e}")
            per_trial.append(rec)
            continue
        rows = table["shells"]
        if len(rows) < 2:
            rec.update(status=SKIPPED, reason="fewer than 2 populated shells", **table)
            per_trial.append(rec)
            continue
        c = np.array([r["max_ratio"] for r in rows])
        spread = float(c.max() / c.min())
        slope = float(np.polyfit([r["log_r_center"] for r in rows], np.log(c), 1)[0])
        ok = spread <= ratio_bound and slope >= min_growth_slope
        rec.update(status=PASS if ok else FAIL, spread=spread, growth_slope=slope, **table)
        per_trial.append(rec)
    counted = [r for r in per_trial if r["status"] != SKIPPED]
    passed = sum(r["status"] == PASS for r in counted)
    results = {"trials": per_trial, "skipped_trials": len(per_trial) - len(counted),
               "passed_trials": passed, "counted_trials": len(counted)}
    if not counted:
        return CheckOutcome(SKIPPED, "no trial could be evaluated", tols, results)
    frac = passed / len(counted)
    results["pass_fraction"] = frac
    ok = frac >= pass_fraction
    return CheckOutcome(PASS if ok else FAIL, f"{passed}/{len(counted)} trials with bounded ratios", tols, results)


def check_tangency(X: VarietySpec, Y: VarietySpec, options: EstimatorOptions, seed: int, K: int = 12,
                   tol: float = 0.2, jet_tol: float = 1e-10) -> CheckOutcome:
    """Order of tangency ``s`` must satisfy ``s <= nu_hat - 1 + tol``."""
    tols = {"tol": tol, "jet_tol": jet_tol}
    report = order_of_tangency(X.form.components, Y.form.components, None, K, jet_tol)
    results = {"tangency": report.to_json(), "exponent_lower_bound": exponent_lower_bound(report).to_json()}
    if report.s_prime is None:
        return CheckOutcome(SKIPPED, f"order of tangency exceeds K={K}", tols, results)
    opts = options.replace(seed=derive_seed(seed, 0))
    est = estimate_exponent(collect_samples(X, Y, None, opts), opts)
    results["estimate"] = _estimate_record(est)
    if est.degenerate:
        return CheckOutcome(ERROR, f"degenerate estimate: {est.reason}", tols, results, est.diagnostics)
    ok = report.s <= est.nu_hat - 1 + tol
    return CheckOutcome(PASS if ok else FAIL, f"s={report.s}, nu_hat={est.nu_hat:.4f}", tols, results,
                        est.diagnostics)


def check_lemma1(m: int, seed: int, a: float = math.pi / 4, configurations: int = 500, max_draws: int = 20000,
                 full: bool = False) -> CheckOutcome:
    """Random configurations meeting the lemma's hypotheses must all satisfy its bound."""
    const = lemma1_constant(a, full)
    tols = {"a": a, "constant": const, "configurations": configurations, "full": full}
    rng = np.random.default_rng(seed)
    gap_scale = 2.0 if full else 0.1
    eligible = passed = 0
    skips: dict[str, int] = {}
    worst = math.inf
    max_angle = 0.0
    counterexamples = []
    draws = 0
    while eligible < configurations and draws < max_draws:
        draws += 1
        h0, y0, y1 = random_lemma1_configuration(rng, m, gap_scale)
        out = lemma1_bound_check(y0, y1, h0, a, full)
        if not math.isnan(out.min_angle):
            max_angle = max(max_angle, out.min_angle)
        if out.status == "skip":
            skips[out.reason] = skips.get(out.reason, 0) + 1
            continue
        eligible += 1
        worst = min(worst, out.lhs / out.rhs)
        if out.status == "pass":
            passed += 1
        elif len(counterexamples) < 5:
            counterexamples.append({"lhs": out.lhs, "rhs": out.rhs, "min_angle": out.min_angle})
    results = {"draws": draws, "eligible": eligible, "passed": passed, "counterexamples": eligible - passed,
               "skips": dict(sorted(skips.items())), "worst_ratio": worst if eligible else None,
               "max_min_angle_seen": max_angle, "examples": counterexamples}
    if eligible - passed:
        return CheckOutcome(FAIL, f"{eligible - passed} counterexamples", tols, results)
    if eligible < configurations:
        return CheckOutcome(FAIL, f"only {eligible} of {configurations} configurations met the hypotheses "
                                  f"in {draws} draws (largest minimal angle seen {max_angle:.4f})", tols, results)
    return CheckOutcome(PASS, f"{eligible} configurations, no counterexample", tols, results)


def check_modes_consistency(X: VarietySpec, Y: VarietySpec, options: EstimatorOptions, seed: int,
                            gap_tol: float | None = None) -> CheckOutcome:
    gap_tol = options.consistency_tol if gap_tol is None else gap_tol
    tols = {"gap_tol": gap_tol, "nu_floor": options.nu_floor}
    try:
        mc = modes_consistency(X, Y, None, options.replace(seed=derive_seed(seed, 0)))
    except DegenerateEstimate as e:
        return CheckOutcome(ERROR, f"degenerate: {e}", tols)
    results = {"nu_one_sided": mc.nu_one_sided, "nu_two_sided": mc.nu_two_sided, "gap": mc.gap,
               "one_sided": _estimate_record(mc.one_sided), "two_sided": _estimate_record(mc.two_sided)}
    ok = mc.gap <= gap_tol
    return CheckOutcome(PASS if ok else FAIL, f"gap {mc.gap:.4f} {'<=' if ok else '>'} {gap_tol}", tols, results)
