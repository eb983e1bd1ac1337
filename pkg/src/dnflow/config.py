"""JSON scenario configuration: parsing, validation, serialization.

A configuration document fully describes one transient problem plus solver
options and optional experiment parameters:

    {
      "model": {
        "beta": {"family": "power", "kappa": 1.0, "gamma": 2.0},
        "p": 1.5,
        "u_min": 0.5,
        "u_max": 2.0
      },
      "domain":   {"length": 1.0, "cells": 64},
      "alpha":    1.0,
      "time":     {"horizon": 5.0, "step": 0.001},
      "initial":  {"type": "constant", "value": 1.0},
      "boundary": {"type": "constant", "left": 1.0, "right": 2.0},
      "solver":   {"newton_tol": 1e-10, "newton_max_iter": 50, "eps_reg": 1e-8},
      "experiment": {"levels": 3, "burn_in_fraction": 0.1}
    }

``initial`` also accepts ``{"type": "linear", "left": ..., "right": ...}``
and ``{"type": "values", "values": [...]}``.  ``boundary`` also accepts
``step`` (``before``/``after`` pairs plus ``time``) and ``sinusoid``
(per-endpoint ``base``/``amplitude``/``omega`` objects).

Validation is strict and never clamps: malformed JSON, schema problems and
admissibility violations (data outside [u_min, u_max], exponents out of
range, ...) each raise a distinct error class naming every offending field.
"""

import json
import numpy as np
from dataclasses import dataclass, field
from pathlib import Path

from .constitutive import ConstitutiveModel, LinearBeta, PowerBeta
from .grid import Grid
from .stepper import (ConstantSchedule, Scenario, SinusoidSchedule,
                      SolverOptions, StepSchedule)

SOLVER_DEFAULTS = {"newton_tol": 1e-10, "newton_max_iter": 50, "eps_reg": 1e-8}
EXPERIMENT_DEFAULTS = {"levels": 3, "burn_in_fraction": 0.1, "late_fraction": 0.5}


class ConfigError(ValueError):
    """Base class for configuration problems."""


class MalformedConfigError(ConfigError):
    """The document is not valid JSON."""


class SchemaError(ConfigError):
    """Missing, unknown or wrongly typed fields."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("configuration schema violations: " + "; ".join(self.violations))


class AdmissibilityError(ConfigError):
    """Structurally valid but the data violate the model assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("inadmissible configuration: " + "; ".join(self.violations))


@dataclass
class Config:
    """Validated configuration with all defaults filled in."""

    model: dict
    domain: dict
    alpha: float
    time: dict
    initial: dict
    boundary: dict
    solver: dict = field(default_factory=lambda: dict(SOLVER_DEFAULTS))
    experiment: dict = field(default_factory=lambda: dict(EXPERIMENT_DEFAULTS))

    def build_model(self) -> ConstitutiveModel:
        beta = self.model["beta"]
        if beta["family"] == "power":
            law = PowerBeta(beta["kappa"], beta["gamma"])
        else:
            law = LinearBeta()
        return ConstitutiveModel(law, self.model["p"],
                                 self.model["u_min"], self.model["u_max"])

    def build_grid(self) -> Grid:
        return Grid(self.domain["length"], self.domain["cells"])

    def build_schedule(self):
        b = self.boundary
        if b["type"] == "constant":
            return ConstantSchedule(b["left"], b["right"])
        if b["type"] == "step":
            return StepSchedule(tuple(b["before"]), tuple(b["after"]), b["time"])
        left, right = b["left"], b["right"]
        return SinusoidSchedule(left["base"], right["base"],
                                left["amplitude"], right["amplitude"],
                                left["omega"], right["omega"])

    def build_initial(self, grid: Grid):
        ini = self.initial
        if ini["type"] == "constant":
            return np.full(grid.cells + 1, float(ini["value"]))
        if ini["type"] == "linear":
            return np.linspace(float(ini["left"]), float(ini["right"]), grid.cells + 1)
        return np.asarray(ini["values"], float)

    def build_scenario(self) -> Scenario:
        grid = self.build_grid()
        return Scenario(grid, self.build_model(), self.alpha,
                        self.time["horizon"], self.time["step"],
                        self.build_initial(grid), self.build_schedule())

    def build_solver_options(self, **overrides) -> SolverOptions:
        return SolverOptions(newton_tol=self.solver["newton_tol"],
                             newton_max_iter=self.solver["newton_max_iter"],
                             eps_reg=self.solver["eps_reg"], **overrides)


def serialize_config(config: Config) -> str:
    payload = {"model": config.model, "domain": config.domain,
               "alpha": config.alpha, "time": config.time,
               "initial": config.initial, "boundary": config.boundary,
               "solver": config.solver, "experiment": config.experiment}
    return json.dumps(payload, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# validation machinery
# ---------------------------------------------------------------------------

def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


class _Walker:
    """Collects schema violations while extracting typed fields."""

    def __init__(self):
        self.problems = []

    def require(self, obj, key, kind, where):
        if key not in obj:
            self.problems.append(f"{where}.{key} is missing")
            return None
        val = obj[key]
        if kind == "number" and not _is_num(val):
            self.problems.append(f"{where}.{key} must be a number")
            return None
        if kind == "int" and not (isinstance(val, int) and not isinstance(val, bool)):
            self.problems.append(f"{where}.{key} must be an integer")
            return None
        if kind == "object" and not isinstance(val, dict):
            self.problems.append(f"{where}.{key} must be an object")
            return None
        if kind == "string" and not isinstance(val, str):
            self.problems.append(f"{where}.{key} must be a string")
            return None
        if kind == "pair" and not (isinstance(val, list) and len(val) == 2
                                   and all(_is_num(v) for v in val)):
            self.problems.append(f"{where}.{key} must be a pair of numbers")
            return None
        if kind == "numbers" and not (isinstance(val, list) and len(val) >= 2
                                      and all(_is_num(v) for v in val)):
            self.problems.append(f"{where}.{key} must be a list of numbers")
            return None
        return val

    def reject_unknown(self, obj, allowed, where):
        for key in obj:
            if key not in allowed:
                self.problems.append(f"{where}.{key} is not a recognized field")


def _validate_schema(doc):
    w = _Walker()
    if not isinstance(doc, dict):
        raise SchemaError(["top level must be a JSON object"])
    w.reject_unknown(doc, {"model", "domain", "alpha", "time", "initial",
                           "boundary", "solver", "experiment"}, "config")

    model = w.require(doc, "model", "object", "config")
    if model is not None:
        w.reject_unknown(model, {"beta", "p", "u_min", "u_max"}, "model")
        beta = w.require(model, "beta", "object", "model")
        if beta is not None:
            family = w.require(beta, "family", "string", "model.beta")
            if family == "power":
                w.reject_unknown(beta, {"family", "kappa", "gamma"}, "model.beta")
                w.require(beta, "kappa", "number", "model.beta")
                w.require(beta, "gamma", "number", "model.beta")
            elif family == "linear":
                w.reject_unknown(beta, {"family"}, "model.beta")
            elif family is not None:
                w.problems.append("model.beta.family must be 'power' or 'linear'")
        w.require(model, "p", "number", "model")
        w.require(model, "u_min", "number", "model")
        w.require(model, "u_max", "number", "model")

    domain = w.require(doc, "domain", "object", "config")
    if domain is not None:
        w.reject_unknown(domain, {"length", "cells"}, "domain")
        w.require(domain, "length", "number", "domain")
        w.require(domain, "cells", "int", "domain")

    w.require(doc, "alpha", "number", "config")

    time = w.require(doc, "time", "object", "config")
    if time is not None:
        w.reject_unknown(time, {"horizon", "step"}, "time")
        w.require(time, "horizon", "number", "time")
        w.require(time, "step", "number", "time")

    initial = w.require(doc, "initial", "object", "config")
    if initial is not None:
        kind = w.require(initial, "type", "string", "initial")
        if kind == "constant":
            w.reject_unknown(initial, {"type", "value"}, "initial")
            w.require(initial, "value", "number", "initial")
        elif kind == "linear":
            w.reject_unknown(initial, {"type", "left", "right"}, "initial")
            w.require(initial, "left", "number", "initial")
            w.require(initial, "right", "number", "initial")
        elif kind == "values":
            w.reject_unknown(initial, {"type", "values"}, "initial")
            w.require(initial, "values", "numbers", "initial")
        elif kind is not None:
            w.problems.append("initial.type must be 'constant', 'linear' or 'values'")

    boundary = w.require(doc, "boundary", "object", "config")
    if boundary is not None:
        kind = w.require(boundary, "type", "string", "boundary")
        if kind == "constant":
            w.reject_unknown(boundary, {"type", "left", "right"}, "boundary")
            w.require(boundary, "left", "number", "boundary")
            w.require(boundary, "right", "number", "boundary")
        elif kind == "step":
            w.reject_unknown(boundary, {"type", "before", "after", "time"}, "boundary")
            w.require(boundary, "before", "pair", "boundary")
            w.require(boundary, "after", "pair", "boundary")
            w.require(boundary, "time", "number", "boundary")
        elif kind == "sinusoid":
            w.reject_unknown(boundary, {"type", "left", "right"}, "boundary")
            for side in ("left", "right"):
                end = w.require(boundary, side, "object", "boundary")
                if end is not None:
                    w.reject_unknown(end, {"base", "amplitude", "omega"},
                                     f"boundary.{side}")
                    w.require(end, "base", "number", f"boundary.{side}")
                    w.require(end, "amplitude", "number", f"boundary.{side}")
                    w.require(end, "omega", "number", f"boundary.{side}")
        elif kind is not None:
            w.problems.append("boundary.type must be 'constant', 'step' or 'sinusoid'")

    solver = doc.get("solver", {})
    if not isinstance(solver, dict):
        w.problems.append("config.solver must be an object")
    else:
        w.reject_unknown(solver, set(SOLVER_DEFAULTS), "solver")
        for key in solver:
            if key == "newton_max_iter":
                if not (isinstance(solver[key], int) and not isinstance(solver[key], bool)):
                    w.problems.append("solver.newton_max_iter must be an integer")
            elif key in SOLVER_DEFAULTS and not _is_num(solver[key]):
                w.problems.append(f"solver.{key} must be a number")

    experiment = doc.get("experiment", {})
    if not isinstance(experiment, dict):
        w.problems.append("config.experiment must be an object")
    else:
        w.reject_unknown(experiment, set(EXPERIMENT_DEFAULTS) | {"gamma"}, "experiment")
        for key in experiment:
            if key == "levels":
                if not (isinstance(experiment[key], int) and not isinstance(experiment[key], bool)):
                    w.problems.append("experiment.levels must be an integer")
            elif not _is_num(experiment[key]):
                w.problems.append(f"experiment.{key} must be a number")

    if w.problems:
        raise SchemaError(w.problems)


def _validate_admissibility(cfg: Config):
    bad = []
    m = cfg.model
    beta = m["beta"]
    if beta["family"] == "power":
        if not beta["kappa"] > 0:
            bad.append(f"model.beta.kappa must be positive (got {beta['kappa']})")
        if not beta["gamma"] >= 1:
            bad.append(f"model.beta.gamma must be >= 1 (got {beta['gamma']})")
    if not 1.0 < m["p"] <= 2.0:
        bad.append(f"model.p must lie in (1, 2] (got {m['p']})")
    if not 0.0 < m["u_min"] <= m["u_max"]:
        bad.append("model range must satisfy 0 < u_min <= u_max "
                   f"(got [{m['u_min']}, {m['u_max']}])")
    if not cfg.domain["length"] > 0:
        bad.append(f"domain.length must be positive (got {cfg.domain['length']})")
    if not cfg.domain["cells"] >= 1:
        bad.append(f"domain.cells must be >= 1 (got {cfg.domain['cells']})")
    if not cfg.alpha > 0:
        bad.append(f"alpha must be positive (got {cfg.alpha})")
    if not cfg.time["step"] > 0:
        bad.append(f"time.step must be positive (got {cfg.time['step']})")
    elif not cfg.time["horizon"] >= cfg.time["step"]:
        bad.append("time.horizon must cover at least one step")
    if not cfg.solver["newton_tol"] > 0:
        bad.append("solver.newton_tol must be positive")
    if not cfg.solver["newton_max_iter"] >= 1:
        bad.append("solver.newton_max_iter must be >= 1")
    if not cfg.solver["eps_reg"] >= 0:
        bad.append("solver.eps_reg must be nonnegative")

    if bad:
        raise AdmissibilityError(bad)

    u_min, u_max = m["u_min"], m["u_max"]

    def in_range(x):
        return u_min <= x <= u_max

    ini = cfg.initial
    if ini["type"] == "constant" and not in_range(ini["value"]):
        bad.append(f"initial.value {ini['value']} outside [{u_min}, {u_max}]")
    if ini["type"] == "linear":
        for side in ("left", "right"):
            if not in_range(ini[side]):
                bad.append(f"initial.{side} {ini[side]} outside [{u_min}, {u_max}]")
    if ini["type"] == "values":
        if cfg.domain["cells"] >= 1 and len(ini["values"]) != cfg.domain["cells"] + 1:
            bad.append(f"initial.values must have cells + 1 = "
                       f"{cfg.domain['cells'] + 1} entries (got {len(ini['values'])})")
        if not all(in_range(v) for v in ini["values"]):
            bad.append(f"initial.values must all lie in [{u_min}, {u_max}]")

    b = cfg.boundary
    if b["type"] == "constant":
        for side in ("left", "right"):
            if not in_range(b[side]):
                bad.append(f"boundary.{side} {b[side]} outside [{u_min}, {u_max}] "
                           "(data must stay strictly positive and admissible)")
    if b["type"] == "step":
        if b["time"] < 0:
            bad.append("boundary.time must be nonnegative")
        for phase in ("before", "after"):
            for v in b[phase]:
                if not in_range(v):
                    bad.append(f"boundary.{phase} value {v} outside [{u_min}, {u_max}]")
    if b["type"] == "sinusoid":
        for side in ("left", "right"):
            end = b[side]
            lo = end["base"] - abs(end["amplitude"])
            hi = end["base"] + abs(end["amplitude"])
            if lo < u_min or hi > u_max:
                bad.append(f"boundary.{side} sweeps [{lo:g}, {hi:g}], outside "
                           f"[{u_min}, {u_max}]")

    if bad:
        raise AdmissibilityError(bad)


def parse_config(source) -> Config:
    """Parse and validate a configuration from a path or a JSON string.

    Raises :class:`MalformedConfigError`, :class:`SchemaError` or
    :class:`AdmissibilityError`; on success returns a :class:`Config` with
    defaults filled in.
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        text = Path(source).read_text()

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedConfigError(f"not valid JSON: {err}") from err

    _validate_schema(doc)

    solver = dict(SOLVER_DEFAULTS)
    solver.update(doc.get("solver", {}))
    solver["newton_max_iter"] = int(solver["newton_max_iter"])
    experiment = dict(EXPERIMENT_DEFAULTS)
    experiment.update(doc.get("experiment", {}))
    experiment["levels"] = int(experiment["levels"])

    cfg = Config(model=doc["model"], domain=doc["domain"],
                 alpha=float(doc["alpha"]), time=doc["time"],
                 initial=doc["initial"], boundary=doc["boundary"],
                 solver=solver, experiment=experiment)
    _validate_admissibility(cfg)
    return cfg
