"""Experiment configuration: JSON schema ingestion and object resolution.

A config file is a single JSON object with a versioned "schema" field.  The
pieces a command needs are resolved lazily: classify-weight only requires
"weight", criterion runs additionally require exponents and (depending on
the criterion) a measure, a target weight, or an operator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .measures import AtomicMeasure, QuadratureGrid, RadialDensityMeasure
from .spaces import (
    ConformalPower,
    Identity,
    MapComposition,
    Moebius,
    OperatorSpec,
    Polynomial,
    PowerMap,
    Scale,
)
from .weights import RadialWeight

SCHEMA_VERSION = 1


def _complex_of(value, where):
    try:
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError):
        raise ConfigError(f"expected [re, im] pair at {where}", field=where)


def parse_weight(spec):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("weight spec must be an object with a 'kind'", field="weight")
    kind = spec["kind"]
    try:
        if kind == "power":
            return RadialWeight.power(float(spec["alpha"]))
        if kind == "log_power":
            return RadialWeight.log_power(float(spec["alpha"]), float(spec["b"]))
        if kind == "table":
            return RadialWeight.from_table(spec["r"], spec["w"])
    except KeyError as exc:
        raise ConfigError(f"weight spec missing {exc}", field="weight")
    raise ConfigError(f"unknown weight kind {kind!r}", field="weight")


def parse_function(spec):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("function spec must be an object with a 'kind'", field="function")
    kind = spec["kind"]
    try:
        if kind == "poly":
            coeffs = [_complex_of(c, "function.coeffs") for c in spec["coeffs"]]
            return Polynomial(coeffs)
        if kind == "conformal_power":
            return ConformalPower(
                _complex_of(spec["a"], "function.a"),
                float(spec["gamma"]),
                complex(spec.get("scale", 1.0)),
            )
    except KeyError as exc:
        raise ConfigError(f"function spec missing {exc}", field="function")
    raise ConfigError(f"unknown function kind {kind!r}", field="function")


def parse_selfmap(spec):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("self-map spec must be an object with a 'kind'", field="phi")
    kind = spec["kind"]
    try:
        if kind == "identity":
            return Identity()
        if kind == "scale":
            return Scale(float(spec["r"]))
        if kind == "power":
            return PowerMap(int(spec["k"]))
        if kind == "moebius":
            return Moebius(_complex_of(spec["c"], "phi.c"))
        if kind == "composition":
            return MapComposition([parse_selfmap(m) for m in spec["maps"]])
    except KeyError as exc:
        raise ConfigError(f"self-map spec missing {exc}", field="phi")
    raise ConfigError(f"unknown self-map kind {kind!r}", field="phi")


def parse_measure(spec, grid):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("measure spec must be an object with a 'kind'", field="measure")
    kind = spec["kind"]
    try:
        if kind == "power_density":
            return RadialDensityMeasure.from_power(float(spec["beta"]), grid)
        if kind == "weight_density":
            return RadialDensityMeasure.from_weight(parse_weight(spec["weight"]), grid)
        if kind == "atoms_csv":
            return AtomicMeasure.from_csv(spec["path"])
    except KeyError as exc:
        raise ConfigError(f"measure spec missing {exc}", field="measure")
    except OSError as exc:
        raise ConfigError(f"cannot read atoms csv: {exc}", field="measure")
    raise ConfigError(f"unknown measure kind {kind!r}", field="measure")


def parse_operator(spec):
    if not isinstance(spec, dict):
        raise ConfigError("operator spec must be an object", field="operator")
    phi = parse_selfmap(spec.get("phi", {"kind": "identity"}))
    u = parse_function(spec.get("u", {"kind": "poly", "coeffs": [[1.0, 0.0]]}))
    n = int(spec.get("n", 0))
    if n < 0:
        raise ConfigError("operator n must be nonnegative", field="operator.n")
    return OperatorSpec(phi, u, n)


@dataclass
class ExperimentConfig:
    """Validated configuration with raw specs kept for the report echo."""

    raw: dict
    seed: int = 0
    p: float = 2.0
    q: float = 2.0
    n: int = 0
    grid_level: int = 9
    lattice_r: float = 0.3
    gamma: float | None = None
    convention: str = "standard"
    _grid: QuadratureGrid | None = field(default=None, repr=False)

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict) or not raw:
            raise ConfigError("config must be a non-empty JSON object")
        schema = raw.get("schema")
        if schema != SCHEMA_VERSION:
            raise ConfigError(
                f"config schema must be {SCHEMA_VERSION} (got {schema!r})", field="schema"
            )
        cfg = cls(raw=raw)
        cfg.seed = int(raw.get("seed", 0))
        cfg.p = float(raw.get("p", 2.0))
        cfg.q = float(raw.get("q", 2.0))
        cfg.n = int(raw.get("n", raw.get("operator", {}).get("n", 0)))
        cfg.grid_level = int(raw.get("grid_level", 9))
        cfg.lattice_r = float(raw.get("lattice_r", 0.3))
        cfg.gamma = None if raw.get("gamma") is None else float(raw["gamma"])
        cfg.convention = raw.get("carleson_convention", "standard")
        if cfg.p <= 0 or cfg.q <= 0:
            raise ConfigError("exponents p, q must be positive", field="p")
        if not (0.0 < cfg.lattice_r < 1.0):
            raise ConfigError("lattice_r must lie in (0, 1)", field="lattice_r")
        if cfg.convention not in ("standard", "literal"):
            raise ConfigError("carleson_convention must be standard or literal",
                              field="carleson_convention")
        if not (1 <= cfg.grid_level <= 24):
            raise ConfigError("grid_level must lie in 1..24", field="grid_level")
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        return cls.from_dict(raw)

    def grid(self, level=None):
        if level is not None and (self._grid is None or self._grid.levels != level):
            return QuadratureGrid(level)
        if self._grid is None:
            self._grid = QuadratureGrid(self.grid_level)
        return self._grid

    def require(self, key):
        if key not in self.raw:
            raise ConfigError(f"config needs a {key!r} section", field=key)
        return self.raw[key]

    def weight(self):
        return parse_weight(self.require("weight"))

    def target_weight(self):
        return parse_weight(self.require("target_weight"))

    def measure(self, grid=None):
        return parse_measure(self.require("measure"), grid or self.grid())

    def operator(self):
        return parse_operator(self.require("operator"))

    def function(self):
        return parse_function(self.require("function"))

    def rng(self):
        return np.random.default_rng(self.seed)
