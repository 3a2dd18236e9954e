"""TOML run configuration.

Example::

    schema = 1
    unit = "s"                      # time unit of durations and rates: "s" or "yr"

    [material]
    K = 1.0e4                       # bulk modulus; required with yeoh networks only

    [[material.networks]]
    model = "yeoh"                  # neo-hookean | blatz-ko | ogden-hill | yeoh
    c1 = 50.0
    c2 = -10.0
    c3 = 1.0
    kinetics = { type = "constant", k = 0.05 }   # permanent | constant | arrhenius

    [program]
    algorithmic_tangent = false
    # F0 = [[0.8, 0, 0], [0, 1, 0], [0, 0, 1]]   # applied instantaneously at t = 0

    [[program.steps]]
    duration = 10.0
    substeps = 100
    control = { type = "uniaxial", stretch = 2.0 }  # uniaxial | full-F | stress-free
    temperature = 293.15            # or { start = 293.15, end = 373.0 }
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import tomli

from .driver import (ConstantTemperature, FullF, LinearRamp, LoadStep, StressFree,
                     UniaxialStretch)
from .engine import MaterialSpec, Network
from .kinetics import Arrhenius, ConstantRate, Permanent
from .materials import BlatzKo, NeoHookean, OgdenHill, OgdenTerm, Volumetric, Yeoh

SCHEMA_VERSION = 1
UNITS = ("s", "yr")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    unit: str
    material: MaterialSpec
    steps: tuple
    F0: Optional[np.ndarray] = None
    algorithmic_tangent: bool = False


def _table(d: Any, path: str) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a table")
    return d


def _keys(d: dict, path: str, allowed: set) -> None:
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")


def _number(d: dict, key: str, path: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{path}.{key}", "missing required value")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(f"{path}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def _matrix(v: Any, path: str) -> np.ndarray:
    try:
        F = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a 3x3 array of numbers") from None
    if F.shape != (3, 3) or not np.all(np.isfinite(F)):
        raise ConfigError(path, "expected a 3x3 array of finite numbers")
    if np.linalg.det(F) <= 0.0:
        raise ConfigError(path, "deformation gradient must have positive determinant")
    return F


def _wrap(path: str, fn, *args):
    """Turn constructor validation errors into field-tagged config errors."""
    try:
        return fn(*args)
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None


def _kinetics(d: Any, path: str):
    if d is None:
        return Permanent()
    d = _table(d, path)
    kind = d.get("type")
    if kind == "permanent":
        _keys(d, path, {"type"})
        return Permanent()
    if kind == "constant":
        _keys(d, path, {"type", "k"})
        return _wrap(f"{path}.k", ConstantRate, _number(d, "k", path))
    if kind == "arrhenius":
        _keys(d, path, {"type", "A", "E_A", "R"})
        return _wrap(path, Arrhenius, _number(d, "A", path), _number(d, "E_A", path),
                     _number(d, "R", path, 8.314))
    raise ConfigError(f"{path}.type", f"expected permanent, constant or arrhenius, got {kind!r}")


def _network(d: Any, path: str) -> Network:
    d = _table(d, path)
    model = d.get("model")
    kin = _kinetics(d.get("kinetics"), f"{path}.kinetics")
    if model == "neo-hookean":
        _keys(d, path, {"model", "kinetics", "lam", "mu"})
        m = _wrap(path, NeoHookean, _number(d, "lam", path), _number(d, "mu", path))
    elif model == "blatz-ko":
        _keys(d, path, {"model", "kinetics", "f", "mu", "beta"})
        m = _wrap(path, BlatzKo, _number(d, "f", path), _number(d, "mu", path),
                  _number(d, "beta", path))
    elif model == "ogden-hill":
        _keys(d, path, {"model", "kinetics", "terms"})
        terms = d.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ConfigError(f"{path}.terms", "expected a non-empty array of terms")
        built = []
        for i, t in enumerate(terms):
            tp = f"{path}.terms[{i}]"
            t = _table(t, tp)
            _keys(t, tp, {"mu", "alpha", "beta"})
            built.append(_wrap(tp, OgdenTerm, _number(t, "mu", tp), _number(t, "alpha", tp),
                               _number(t, "beta", tp)))
        m = OgdenHill(tuple(built))
    elif model == "yeoh":
        _keys(d, path, {"model", "kinetics", "c1", "c2", "c3", "b1", "b2", "b3"})
        has_c = any(k in d for k in ("c1", "c2", "c3"))
        has_b = any(k in d for k in ("b1", "b2", "b3"))
        if has_c == has_b:
            raise ConfigError(path, "give either c1..c3 or b1..b3")
        if has_c:
            m = _wrap(path, Yeoh, _number(d, "c1", path), _number(d, "c2", path, 0.0),
                      _number(d, "c3", path, 0.0))
        else:
            m = _wrap(path, Yeoh.from_b, _number(d, "b1", path), _number(d, "b2", path, 0.0),
                      _number(d, "b3", path, 0.0))
    else:
        raise ConfigError(f"{path}.model",
                          f"expected neo-hookean, blatz-ko, ogden-hill or yeoh, got {model!r}")
    return Network(m, kin)


def _control(d: Any, path: str):
    d = _table(d, path)
    kind = d.get("type")
    if kind == "uniaxial":
        _keys(d, path, {"type", "stretch"})
        s = _number(d, "stretch", path)
        if s <= 0.0:
            raise ConfigError(f"{path}.stretch", "stretch must be positive")
        return UniaxialStretch(s)
    if kind == "full-F":
        _keys(d, path, {"type", "F"})
        if "F" not in d:
            raise ConfigError(f"{path}.F", "missing required value")
        return FullF(_matrix(d["F"], f"{path}.F"))
    if kind == "stress-free":
        _keys(d, path, {"type"})
        return StressFree()
    raise ConfigError(f"{path}.type", f"expected uniaxial, full-F or stress-free, got {kind!r}")


def _temperature(v: Any, path: str):
    if v is None:
        return ConstantTemperature(293.15)
    if isinstance(v, dict):
        _keys(v, path, {"start", "end"})
        temp = LinearRamp(_number(v, "start", path), _number(v, "end", path))
        vals = (temp.T_start, temp.T_end)
    elif isinstance(v, (int, float)) and not isinstance(v, bool):
        temp = ConstantTemperature(float(v))
        vals = (temp.T,)
    else:
        raise ConfigError(path, "expected a number or a {start, end} table")
    if not all(np.isfinite(T) and T > 0.0 for T in vals):
        raise ConfigError(path, "temperature must be positive kelvin")
    return temp


def _step(d: Any, path: str) -> LoadStep:
    d = _table(d, path)
    _keys(d, path, {"duration", "substeps", "control", "temperature"})
    duration = _number(d, "duration", path)
    if duration <= 0.0:
        raise ConfigError(f"{path}.duration", "duration must be positive")
    n = d.get("substeps")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"{path}.substeps", f"expected a positive integer, got {n!r}")
    if "control" not in d:
        raise ConfigError(f"{path}.control", "missing required value")
    return LoadStep(duration, n, _control(d["control"], f"{path}.control"),
                    _temperature(d.get("temperature"), f"{path}.temperature"))


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded TOML document."""
    _keys(data, "config", {"schema", "unit", "material", "program"})
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError("schema", f"expected schema = {SCHEMA_VERSION}, got {data.get('schema')!r}")
    unit = data.get("unit", "s")
    if unit not in UNITS:
        raise ConfigError("unit", f"expected one of {UNITS}, got {unit!r}")
    mat = _table(data.get("material"), "material")
    _keys(mat, "material", {"K", "networks"})
    nets = mat.get("networks")
    if not isinstance(nets, list) or not nets:
        raise ConfigError("material.networks", "expected at least one network")
    networks = tuple(_network(n, f"material.networks[{i}]") for i, n in enumerate(nets))
    vol = _wrap("material.K", Volumetric, _number(mat, "K", "material")) if "K" in mat else None
    material = _wrap("material.K", MaterialSpec, networks, vol)
    prog = _table(data.get("program"), "program")
    _keys(prog, "program", {"steps", "F0", "algorithmic_tangent"})
    steps = prog.get("steps")
    if not isinstance(steps, list) or not steps:
        raise ConfigError("program.steps", "expected at least one step")
    built = tuple(_step(s, f"program.steps[{i}]") for i, s in enumerate(steps))
    F0 = _matrix(prog["F0"], "program.F0") if "F0" in prog else None
    alg = prog.get("algorithmic_tangent", False)
    if not isinstance(alg, bool):
        raise ConfigError("program.algorithmic_tangent", "expected true or false")
    return RunConfig(unit, material, built, F0, alg)


def load_config(path) -> RunConfig:
    """Read and validate a TOML file; syntax errors report line and column."""
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("toml", str(exc)) from None
    except OSError as exc:
        raise ConfigError("file", str(exc)) from None
    return parse_config(data)
