"""Run configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .. import symmetry
from ..core import Params, on_surface
from ..dynamics import Formulation, Method

FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class Output:
    path: str
    format: str

    @classmethod
    def from_path(cls, path: str) -> "Output":
        fmt = "json" if str(path).lower().endswith(".json") else "csv"
        return cls(str(path), fmt)


@dataclass(frozen=True)
class RunConfig:
    formulation: Formulation = Formulation.DIRAC_BRACKET_CANONICAL_H
    params: Params = Params()
    initial: tuple[float, ...] = ()
    dt: float = 1e-3
    t_end: float = 10.0
    method: Method = Method.RK4
    outputs: tuple[Output, ...] = ()
    seed: int = 42

    def to_dict(self) -> dict:
        return {
            "formulation": self.formulation.value,
            "params": {"lam": self.params.lam, "mass": self.params.mass},
            "initial": list(self.initial),
            "dt": self.dt,
            "t_end": self.t_end,
            "method": self.method.value,
            "outputs": [{"path": o.path, "format": o.format} for o in self.outputs],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config", "top level must be a JSON object")
        known = set(cls.__dataclass_fields__)
        for key in d:
            if key not in known:
                raise ConfigError(key, "unknown field")
        kw = {}
        if "formulation" in d:
            kw["formulation"] = _enum(Formulation, d["formulation"], "formulation")
        if "method" in d:
            kw["method"] = _enum(Method, d["method"], "method")
        if "params" in d:
            p = d["params"]
            if not isinstance(p, dict) or set(p) - {"lam", "mass"}:
                raise ConfigError("params", "expected an object with keys lam and mass")
            kw["params"] = _params(p.get("lam", 1.0), p.get("mass", 1.0))
        if "initial" in d:
            kw["initial"] = _reals(d["initial"], "initial")
        for key in ("dt", "t_end"):
            if key in d:
                kw[key] = _real(d[key], key)
        if "seed" in d:
            if isinstance(d["seed"], bool) or not isinstance(d["seed"], int):
                raise ConfigError("seed", "must be an integer")
            kw["seed"] = d["seed"]
        if "outputs" in d:
            outs = []
            for i, o in enumerate(d["outputs"]):
                if not isinstance(o, dict) or "path" not in o:
                    raise ConfigError(f"outputs[{i}]", "expected an object with a path")
                fmt = o.get("format", Output.from_path(o["path"]).format)
                outs.append(Output(str(o["path"]), fmt))
            kw["outputs"] = tuple(outs)
        return cls(**kw).validated()

    def validated(self) -> "RunConfig":
        if self.formulation is Formulation.DARBOUX_CANONICAL_H and self.params.lam <= 0:
            raise ConfigError("params.lam", "the Darboux chart needs lam > 0")
        if self.initial and len(self.initial) != self.formulation.dim:
            raise ConfigError(
                "initial",
                f"{self.formulation.value} needs {self.formulation.dim} values, got {len(self.initial)}",
            )
        if not all(math.isfinite(v) for v in self.initial):
            raise ConfigError("initial", "values must be finite")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt", "must be positive and finite")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError("t_end", "must be positive and finite")
        if self.dt > self.t_end:
            raise ConfigError("dt", "must not exceed t_end")
        for i, o in enumerate(self.outputs):
            if o.format not in FORMATS:
                raise ConfigError(f"outputs[{i}].format", f"expected one of {', '.join(FORMATS)}")
        return self

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw).validated()

    def initial_state(self) -> np.ndarray:
        if self.initial:
            return np.array(self.initial, float)
        return default_initial(self.formulation, self.params, self.seed)


def default_initial(form: Formulation, params: Params, seed: int) -> np.ndarray:
    """Seeded regular on-surface start, expressed in the coordinates of ``form``."""
    rng = np.random.default_rng(seed)
    while True:
        z = on_surface(rng.uniform(-2, 2, 8), params)
        if np.hypot(*z[4:6]) > 0.5 and np.hypot(*z[2:4]) > 0.5:
            break
    if form is Formulation.DARBOUX_CANONICAL_H:
        return symmetry.darboux_forward(z, params)[:6]
    if form is Formulation.REDUCED_LIE_POISSON:
        return symmetry.invariants_dirac(z, params)
    return z


def parse_reals(text: str, field_name: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(field_name, f"expected comma-separated reals, got {text!r}") from None


def _enum(cls, value, name):
    try:
        return cls(value)
    except ValueError:
        raise ConfigError(name, f"expected one of {', '.join(m.value for m in cls)}, got {value!r}") from None


def _real(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    return float(value)


def _reals(values, name) -> tuple[float, ...]:
    if not isinstance(values, list):
        raise ConfigError(name, "expected a list of numbers")
    return tuple(_real(v, name) for v in values)


def _params(lam, mass) -> Params:
    try:
        return Params(_real(lam, "params.lam"), _real(mass, "params.mass"))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("params", str(e)) from None


__all__ = ["ConfigError", "Output", "RunConfig", "default_initial", "parse_reals", "FORMATS"]
