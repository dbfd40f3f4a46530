"""Running scenarios and rendering their reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from typing import Any

import numpy as np

from .checks import (
    ERROR,
    FAIL,
    PASS,
    SKIPPED,
    CheckOutcome,
    check_distance_comparability,
    check_estimate,
    check_lemma1,
    check_modes_consistency,
    check_section_monotonicity,
    check_tangency,
    derive_seed,
)
from .scenario import CheckSpec, Scenario, load_scenario

SCHEMA_VERSION = 1
DURATION_KEY = "duration_s"

log = logging.getLogger(__name__)


def _run_check(sc: Scenario, spec: CheckSpec, seed: int) -> CheckOutcome:
    p = spec.params
    opts = sc.estimator
    if spec.type == "estimate":
        if p["mode"] is not None:
            opts = opts.replace(mode=p["mode"])
        return check_estimate(sc.X, sc.Y, opts, seed, p["nu_range"], int(p["repeats"]))
    if spec.type == "section_monotonicity":
        return check_section_monotonicity(sc.X, sc.Y, opts, seed, p["trials"], p["tol"], p["pass_fraction"],
                                          p["median_range"], p["hyperplanes"])
    if spec.type == "distance_comparability":
        return check_distance_comparability(sc.X, opts, seed, p["trials"], p["ratio_bound"],
                                            p["min_growth_slope"], p["pass_fraction"], p["hyperplanes"])
    if spec.type == "tangency":
        return check_tangency(sc.X, sc.Y, opts, seed, p["K"], p["tol"], p["jet_tol"])
    if spec.type == "lemma1":
        dim = p["dim"] if p["dim"] is not None else sc.ambient_dim
        return check_lemma1(dim, seed, float(p["a"]), int(p["configurations"]), int(p["max_draws"]), bool(p["full"]))
    if spec.type == "modes_consistency":
        return check_modes_consistency(sc.X, sc.Y, opts, seed, p["gap_tol"])
    raise ValueError(f"unknown check {spec.type!r}")


def run_checks(sc: Scenario) -> dict:
    """Run every check in order; a failing or raising check does not stop the rest."""
    t_start = time.perf_counter()
    records = []
    for i, spec in enumerate(sc.checks):
        seed = derive_seed(sc.seed, i)
        t0 = time.perf_counter()
        try:
            out = _run_check(sc, spec, seed)
        except Exception as e:  # recorded in the report, never fatal
            log.debug("check %d raised", i, exc_info=True)
            out = CheckOutcome(ERROR, f"{type(e).__name__}: {e}")
        rec = {
            "index": i,
            "type": spec.type,
            "seed": seed,
            "inputs": spec.params,
            "status": out.status,
            "reason": out.reason,
            "tolerances": out.tolerances,
            "results": out.results,
            "diagnostics": out.diagnostics,
            DURATION_KEY: time.perf_counter() - t0,
        }
        log.info("check %d %s: %s (%s)", i, spec.type, out.status, out.reason)
        records.append(rec)
    counts = {s: sum(r["status"] == s for r in records) for s in (PASS, FAIL, ERROR, SKIPPED)}
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": sc.name,
        "seed": sc.seed,
        "estimator": {k: getattr(sc.estimator, k) for k in sorted(sc.estimator.__dataclass_fields__) if k != "oracle"},
        "checks": records,
        "summary": counts,
        "exit_status": exit_status_of(records),
        DURATION_KEY: time.perf_counter() - t_start,
    }


def exit_status_of(records) -> int:
    return 1 if any(r["status"] in (FAIL, ERROR) for r in records) else 0


def run_scenario(path, seed: int | None = None) -> dict:
    sc = load_scenario(path)
    if seed is not None:
        sc = sc.with_seed(seed)
    return run_checks(sc)


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def strip_durations(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: strip_durations(v) for k, v in obj.items() if k != DURATION_KEY}
    if isinstance(obj, list):
        return [strip_durations(v) for v in obj]
    return obj


_HEADLINE = {
    "estimate": ("nu_hat", lambda r: r.get("estimate", {}).get("nu_hat")),
    "section_monotonicity": ("pass_fraction", lambda r: r.get("pass_fraction")),
    "distance_comparability": ("pass_fraction", lambda r: r.get("pass_fraction")),
    "tangency": ("s", lambda r: r.get("tangency", {}).get("s")),
    "lemma1": ("counterexamples", lambda r: r.get("counterexamples")),
    "modes_consistency": ("gap", lambda r: r.get("gap")),
}


def to_csv(report: dict) -> str:
    """One flat row per check."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "type", "status", "seed", "metric", "value", "tolerances", "reason"])
    for r in report["checks"]:
        name, get = _HEADLINE[r["type"]]
        value = get(r["results"])
        w.writerow([r["index"], r["type"], r["status"], r["seed"], name, "" if value is None else repr(value),
                    json.dumps(_plain(r["tolerances"]), sort_keys=True), r["reason"]])
    return buf.getvalue()


def shell_tables(report: dict) -> str:
    """Per-shell envelope tables of every estimate in the report, for ``--verbose``."""
    lines = []

    def walk(obj, label):
        if isinstance(obj, dict):
            if "bin_table" in obj and obj.get("bin_table"):
                lines.append(f"# {label}  nu_hat={obj.get('nu_hat')}")
                lines.append("shell  log_r_center  envelope  count")
                for b in obj["bin_table"]:
                    lines.append(f"{b['shell']:5d}  {b['log_r_center']:12.5f}  {b['envelope']:9.4f}  {b['count']:5d}")
            for k, v in obj.items():
                walk(v, f"{label}/{k}")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(v, f"{label}[{i}]")

    for r in report["checks"]:
        walk(r["results"], f"check {r['index']} {r['type']}")
    return "\n".join(lines)
