"""JSON run configuration for the command line tool.

Complex numbers may be written as a number, a ``[re, im]`` pair or a
Python-style string such as ``"0.5-0.2j"``.  See the README for the full
schema; :meth:`RunConfig.to_dict` produces a document that parses back to an
equal config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .ahlfors import CartesianGrid, PolarGrid
from .geometry import CurveSpec, GeometryError

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_complex"]

ORACLES = ("mobius",)


class ConfigError(ValueError):
    """Problem in a configuration file; the message names the offending field."""


def parse_complex(value: Any, where: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a complex number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"{where}: cannot parse {value!r} as a complex number") from None
    if isinstance(value, (list, tuple)) and len(value) == 2 \
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number, [re, im] or a string, got {value!r}")


def _complex_list(value, where):
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    return [parse_complex(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _cx(z: complex) -> list:
    return [z.real, z.imag]


def _number(d: dict, key: str, where: str, default=None, kind=float):
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (kind is int and int(v) != v):
        raise ConfigError(f"{where}.{key}: expected {'an integer' if kind is int else 'a number'}, got {v!r}")
    return kind(v)


def _parse_curve(d: Any, where: str) -> CurveSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = d.get("kind")
    reversed_ = bool(d.get("reversed", False))
    try:
        if kind == "circle":
            return CurveSpec.circle(parse_complex(d.get("center", 0), f"{where}.center"),
                                    _number(d, "radius", where), reversed_)
        if kind == "ellipse":
            axes = d.get("semi_axes")
            if not (isinstance(axes, list) and len(axes) == 2):
                raise ConfigError(f"{where}.semi_axes: expected two numbers")
            return CurveSpec.ellipse(parse_complex(d.get("center", 0), f"{where}.center"),
                                     axes, _number(d, "rotation", where, 0.0), reversed_)
        if kind == "trig":
            coeffs = d.get("coefficients")
            if not isinstance(coeffs, list):
                raise ConfigError(f"{where}.coefficients: expected a list of [k, c_k] pairs")
            pairs = []
            for i, item in enumerate(coeffs):
                if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)):
                    raise ConfigError(f"{where}.coefficients[{i}]: expected [k, c_k]")
                pairs.append((item[0], parse_complex(item[1], f"{where}.coefficients[{i}]")))
            return CurveSpec.trig(pairs, reversed_)
    except GeometryError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.kind: expected 'circle', 'ellipse' or 'trig', got {kind!r}")


def _parse_grid(d: Any, where: str):
    if d is None:
        return None
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = d.get("kind")
    if kind == "cartesian":
        lims = {}
        for key in ("xlim", "ylim"):
            if key in d:
                v = d[key]
                if not (isinstance(v, list) and len(v) == 2):
                    raise ConfigError(f"{where}.{key}: expected [min, max]")
                lims[key] = (float(v[0]), float(v[1]))
        return CartesianGrid(_number(d, "lines", where, 21, int), _number(d, "points", where, 200, int), **lims)
    if kind == "polar":
        return PolarGrid(parse_complex(d.get("center", 0), f"{where}.center"),
                         _number(d, "r_min", where, 0.0), _number(d, "r_max", where, 1.0),
                         _number(d, "circles", where, 9, int), _number(d, "rays", where, 24, int),
                         _number(d, "points", where, 200, int))
    raise ConfigError(f"{where}.kind: expected 'cartesian' or 'polar', got {kind!r}")


@dataclass
class RunConfig:
    curves: list
    a: complex
    zeros: list | None = None
    aux: list | None = None
    n: int = 128
    grid: Any = None
    initial: list | None = None
    max_iter: int = 4000
    tol: float = 1e-12
    oracle: str | None = None
    out: str = "out"
    plain_cauchy: bool = False
    verbose: bool = False

    @property
    def m(self) -> int:
        return len(self.curves)

    @classmethod
    def from_dict(cls, d: Any) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("top level: expected a JSON object")
        known = {"curves", "a", "zeros", "aux", "n", "grid", "search", "oracle", "out",
                 "plain_cauchy", "verbose"}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown field")
        curves = d.get("curves")
        if not isinstance(curves, list) or not curves:
            raise ConfigError("curves: expected a non-empty list (outer curve last)")
        specs = [_parse_curve(c, f"curves[{i}]") for i, c in enumerate(curves)]
        m = len(specs)
        if "a" not in d:
            raise ConfigError("a: missing")
        a = parse_complex(d["a"], "a")

        zeros = None if d.get("zeros") is None else _complex_list(d["zeros"], "zeros")
        if zeros is not None and len(zeros) != m - 1:
            raise ConfigError(f"zeros: expected {m - 1} entries (one per hole), got {len(zeros)}")
        aux = None if d.get("aux") is None else _complex_list(d["aux"], "aux")
        if aux is not None and len(aux) != m - 1:
            raise ConfigError(f"aux: expected {m - 1} entries (one per hole), got {len(aux)}")

        n = d.get("n", 128)
        if isinstance(n, bool) or not isinstance(n, int) or n < 4 or n % 2:
            raise ConfigError(f"n: must be an even integer >= 4, got {n!r}")

        search = d.get("search", {}) or {}
        if not isinstance(search, dict):
            raise ConfigError("search: expected an object")
        initial = None if search.get("initial") is None else _complex_list(search["initial"], "search.initial")
        if initial is not None and len(initial) != m - 1:
            raise ConfigError(f"search.initial: expected {m - 1} entries, got {len(initial)}")
        max_iter = _number(search, "max_iter", "search", 4000, int)
        tol = _number(search, "tol", "search", 1e-12)

        oracle = d.get("oracle")
        if oracle is not None and oracle not in ORACLES:
            raise ConfigError(f"oracle: expected one of {ORACLES}, got {oracle!r}")
        out = d.get("out", "out")
        if not isinstance(out, str):
            raise ConfigError("out: expected a path string")
        for key in ("plain_cauchy", "verbose"):
            if not isinstance(d.get(key, False), bool):
                raise ConfigError(f"{key}: expected true or false")

        return cls(specs, a, zeros, aux, n, _parse_grid(d.get("grid"), "grid"), initial,
                   max_iter, tol, oracle, out, d.get("plain_cauchy", False), d.get("verbose", False))

    def to_dict(self) -> dict:
        out: dict = {"curves": [c.to_dict() for c in self.curves], "a": _cx(self.a), "n": self.n}
        if self.zeros is not None:
            out["zeros"] = [_cx(z) for z in self.zeros]
        if self.aux is not None:
            out["aux"] = [_cx(z) for z in self.aux]
        if self.grid is not None:
            out["grid"] = self.grid.to_dict()
        search: dict = {"max_iter": self.max_iter, "tol": self.tol}
        if self.initial is not None:
            search["initial"] = [_cx(z) for z in self.initial]
        out["search"] = search
        if self.oracle is not None:
            out["oracle"] = self.oracle
        out.update(out=self.out, plain_cauchy=self.plain_cauchy, verbose=self.verbose)
        return out


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return RunConfig.from_dict(data)
