"""Scenario files: JSON descriptions of set pairs and the checks to run on them."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..algebra import PolySyntaxError
from ..lojasiewicz import EstimatorOptions
from ..variety import Graph, VarietySpec
from ..variety.spec import _cvec_parse, _form_parse

CHECK_TYPES = (
    "estimate",
    "section_monotonicity",
    "distance_comparability",
    "tangency",
    "lemma1",
    "modes_consistency",
)

# parameter name -> default, per check type
CHECK_PARAMS: dict[str, dict[str, Any]] = {
    "estimate": {"mode": None, "nu_range": None, "repeats": 1},
    "section_monotonicity": {
        "trials": 20, "tol": 0.2, "pass_fraction": 0.9, "median_range": None, "hyperplanes": None,
    },
    "distance_comparability": {
        "trials": 20, "ratio_bound": 3.0, "min_growth_slope": -0.1, "pass_fraction": 0.9, "hyperplanes": None,
    },
    "tangency": {"K": 12, "tol": 0.2, "jet_tol": 1e-10},
    "lemma1": {"a": 0.7853981633974483, "configurations": 500, "max_draws": 20000, "dim": None, "full": False},
    "modes_consistency": {"gap_tol": None},
}

NEEDS_Y = {"estimate", "section_monotonicity", "tangency", "modes_consistency"}
ESTIMATOR_KEYS = {
    "radius", "shells", "per_shell", "mode", "fit_fraction", "min_shell_count", "drop_tol",
    "containment_rtol", "nu_floor", "consistency_tol", "two_sided_sampler",
}


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.message = message
        self.line = line
        self.path = path
        where = f"{path or '<scenario>'}:{line}: " if line else f"{path}: " if path else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class CheckSpec:
    type: str
    params: dict
    line: int | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    ambient_dim: int
    base_point: np.ndarray
    X: VarietySpec
    Y: VarietySpec | None
    estimator: EstimatorOptions
    checks: tuple[CheckSpec, ...]
    source: dict = field(default_factory=dict, compare=False)

    def with_checks(self, checks) -> "Scenario":
        return Scenario(self.name, self.seed, self.ambient_dim, self.base_point, self.X, self.Y,
                        self.estimator, tuple(checks), self.source)

    def with_seed(self, seed: int) -> "Scenario":
        return Scenario(self.name, int(seed), self.ambient_dim, self.base_point, self.X, self.Y,
                        self.estimator, self.checks, self.source)


class _Lines:
    """Best-effort line numbers for keys, for error messages."""

    def __init__(self, text: str):
        self.text = text

    def of_key(self, key: str, occurrence: int = 0) -> int | None:
        hits = [m.start() for m in re.finditer(r'"%s"\s*:' % re.escape(key), self.text)]
        if occurrence < len(hits):
            return self.text.count("\n", 0, hits[occurrence]) + 1
        return None


def _variety(rec, m: int, x0: np.ndarray, name: str, lines: _Lines) -> VarietySpec:
    if not isinstance(rec, dict):
        raise ScenarioError(f"{name} must be an object", lines.of_key(name))
    try:
        return VarietySpec(m, x0, _form_parse(rec, m))
    except PolySyntaxError as e:
        raise ScenarioError(f"{name}: bad polynomial: {e}", lines.of_key(name)) from e
    except (KeyError, ValueError, TypeError) as e:
        raise ScenarioError(f"{name}: {e}", lines.of_key(name)) from e


def parse_scenario(text: str, path: str | None = None) -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg} (column {e.colno})", e.lineno, path) from e
    lines = _Lines(text)
    try:
        return _build(raw, lines)
    except ScenarioError as e:
        raise ScenarioError(e.message, e.line, path) from None


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", None, str(p)) from e
    return parse_scenario(text, str(p))


def _build(raw: Any, lines: _Lines) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("top level must be an object", 1)
    known = {"name", "seed", "ambient_dim", "base_point", "X", "Y", "estimator", "checks"}
    for key in raw:
        if key not in known:
            raise ScenarioError(f"unknown field {key!r}", lines.of_key(key))
    if "ambient_dim" not in raw:
        raise ScenarioError("missing field 'ambient_dim'", 1)
    m = raw["ambient_dim"]
    if not isinstance(m, int) or m < 1:
        raise ScenarioError("ambient_dim must be a positive integer", lines.of_key("ambient_dim"))
    try:
        x0 = _cvec_parse(raw.get("base_point", [0] * m))
    except (TypeError, ValueError, IndexError) as e:
        raise ScenarioError(f"base_point: {e}", lines.of_key("base_point")) from e
    if x0.shape != (m,):
        raise ScenarioError(f"base_point has {x0.size} coordinates, expected {m}", lines.of_key("base_point"))
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed must be a non-negative integer", lines.of_key("seed"))
    if "X" not in raw:
        raise ScenarioError("missing field 'X'", 1)
    X = _variety(raw["X"], m, x0, "X", lines)
    Y = _variety(raw["Y"], m, x0, "Y", lines) if raw.get("Y") is not None else None

    est = raw.get("estimator", {})
    if not isinstance(est, dict):
        raise ScenarioError("estimator must be an object", lines.of_key("estimator"))
    for key in est:
        if key not in ESTIMATOR_KEYS:
            raise ScenarioError(f"unknown estimator option {key!r}", lines.of_key(key))
    try:
        options = EstimatorOptions(**est)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"estimator: {e}", lines.of_key("estimator")) from e

    checks_raw = raw.get("checks", [])
    if not isinstance(checks_raw, list):
        raise ScenarioError("checks must be a list", lines.of_key("checks"))
    checks = []
    for i, rec in enumerate(checks_raw):
        line = lines.of_key("type", i)
        if not isinstance(rec, dict) or "type" not in rec:
            raise ScenarioError(f"check #{i} needs a 'type'", line or lines.of_key("checks"))
        ctype = rec["type"]
        if ctype not in CHECK_TYPES:
            raise ScenarioError(f"unknown check type {ctype!r}; expected one of {', '.join(CHECK_TYPES)}", line)
        params = dict(CHECK_PARAMS[ctype])
        for key, value in rec.items():
            if key == "type":
                continue
            if key not in params:
                raise ScenarioError(f"check {ctype!r} has no parameter {key!r}", line)
            params[key] = value
        _validate_check(ctype, params, X, Y, m, line)
        checks.append(CheckSpec(ctype, params, line))
    return Scenario(str(raw.get("name", "")), seed, m, x0, X, Y, options, tuple(checks), raw)


def _validate_check(ctype: str, params: dict, X: VarietySpec, Y: VarietySpec | None, m: int, line):
    if ctype in NEEDS_Y and Y is None:
        raise ScenarioError(f"check {ctype!r} needs a second set 'Y'", line)
    if ctype == "tangency":
        if not (isinstance(X.form, Graph) and isinstance(Y.form, Graph)):
            raise ScenarioError("tangency needs X and Y in graph form", line)
        if X.form.param_dim != Y.form.param_dim:
            raise ScenarioError("tangency needs graphs over the same parameter space", line)
        if not isinstance(params["K"], int) or params["K"] < 1:
            raise ScenarioError("tangency K must be a positive integer", line)
    if ctype in ("section_monotonicity", "distance_comparability"):
        if m < 2:
            raise ScenarioError(f"{ctype} needs ambient dimension at least 2", line)
        if not isinstance(params["trials"], int) or params["trials"] < 1:
            raise ScenarioError("trials must be a positive integer", line)
        if params["hyperplanes"] is not None:
            hs = params["hyperplanes"]
            if not isinstance(hs, list) or not all(isinstance(h, list) and len(h) == m for h in hs):
                raise ScenarioError(f"hyperplanes must be a list of normals with {m} entries", line)
    if ctype == "estimate":
        rng_ = params["nu_range"]
        if rng_ is not None and (not isinstance(rng_, list) or len(rng_) != 2 or rng_[0] > rng_[1]):
            raise ScenarioError("nu_range must be [low, high]", line)
        if params["mode"] not in (None, "one-sided", "two-sided"):
            raise ScenarioError("mode must be 'one-sided' or 'two-sided'", line)
    if ctype == "lemma1":
        if not 0 < float(params["a"]) <= np.pi / 2:
            raise ScenarioError("lemma1 angle a must lie in (0, pi/2]", line)
        dim = params["dim"] if params["dim"] is not None else m
        if dim < 2:
            raise ScenarioError("lemma1 needs dimension at least 2", line)
