"""Serializable descriptions of distributions and the factory that builds them.

JSON layout (one object per law)::

    {"family": "laplace", "params": {"shift": 0, "scale": 1}}
    {"family": "mixture",
     "components": [{"weight": 0.5, "spec": {...}}, {"weight": 0.5, "spec": {...}}]}
    {"family": "piecewise",
     "pieces": [{"lo": 0, "hi": 0.5, "density": {"type": "constant", "value": 1.5}},
                {"lo": 0.5, "hi": "inf", "density": {"type": "exp", "coef": 1, "rate": -2}}]}
    {"family": "gn_example", "params": {"n": 4}}
    {"family": "truncated", "params": {"n": 10, "target": {...}, "ref": {...}}}

The inline shorthand accepted by :func:`parse_spec` covers the same ground
with call syntax: ``laplace(0,1)``, ``gaussian(0.3,1)``, ``gn(4)``,
``mix(0.5*gaussian(-1,1), 0.5*gaussian(1,1))``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import SpecError
from .base import Distribution1D
from .families import Exponential, Gaussian, Laplace, Mixture, Piece, Piecewise, Uniform
from .special import make_gn, truncate_cdf

FAMILIES = ("gaussian", "laplace", "exponential", "uniform", "mixture", "piecewise",
            "gn_example", "truncated")

_PARAM_NAMES = {
    "gaussian": ("mean", "std"),
    "laplace": ("shift", "scale"),
    "exponential": ("rate",),
    "uniform": ("lo", "hi"),
    "gn_example": ("n",),
}
_DEFAULTS = {
    "gaussian": {"mean": 0.0, "std": 1.0},
    "laplace": {"shift": 0.0, "scale": 1.0},
    "exponential": {"rate": 1.0},
    "uniform": {"lo": 0.0, "hi": 1.0},
}
_ALIASES = {"normal": "gaussian", "gauss": "gaussian", "exp": "exponential", "gn": "gn_example",
            "mix": "mixture", "unif": "uniform"}


@dataclass
class DistributionSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    components: list[tuple[float, "DistributionSpec"]] = field(default_factory=list)
    pieces: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"family": self.family}
        if self.params:
            params = {}
            for k, v in self.params.items():
                params[k] = v.to_dict() if isinstance(v, DistributionSpec) else _enc(v)
            out["params"] = params
        if self.components:
            out["components"] = [{"weight": w, "spec": c.to_dict()} for w, c in self.components]
        if self.pieces:
            out["pieces"] = [{"lo": _enc(p["lo"]), "hi": _enc(p["hi"]), "density": dict(p["density"])}
                             for p in self.pieces]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise SpecError(f"distribution spec must be an object with a 'family' key: {d!r}")
        fam = _ALIASES.get(str(d["family"]).lower(), str(d["family"]).lower())
        if fam not in FAMILIES:
            raise SpecError(f"unknown family {d['family']!r}; expected one of {FAMILIES}")
        params = dict(d.get("params") or {})
        for key in ("target", "ref"):
            if key in params and isinstance(params[key], dict):
                params[key] = cls.from_dict(params[key])
        comps = []
        for c in d.get("components") or []:
            if isinstance(c, dict):
                w, sub = c.get("weight"), c.get("spec")
            else:
                w, sub = c
            if w is None or sub is None:
                raise SpecError(f"mixture component needs weight and spec: {c!r}")
            comps.append((float(w), sub if isinstance(sub, DistributionSpec) else cls.from_dict(sub)))
        pieces = []
        for p in d.get("pieces") or []:
            try:
                pieces.append({"lo": _dec(p["lo"]), "hi": _dec(p["hi"]), "density": dict(p["density"])})
            except (KeyError, TypeError) as exc:
                raise SpecError(f"malformed piece {p!r}") from exc
        return cls(fam, params, comps, pieces)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _enc(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _dec(v) -> float:
    if v is None:
        raise SpecError("piece endpoint missing")
    return float(v)


def _num(params: dict, key: str, fam: str) -> float:
    try:
        v = float(params[key])
    except KeyError as exc:
        raise SpecError(f"{fam} needs parameter {key!r}") from exc
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{fam} parameter {key!r} must be a number") from exc
    return v


def _piece(p: dict) -> Piece:
    dens = p["density"]
    kind = dens.get("type", "constant")
    if kind == "constant":
        return Piece(p["lo"], p["hi"], float(dens["value"]), 0.0)
    if kind == "exp":
        return Piece(p["lo"], p["hi"], float(dens["coef"]), float(dens["rate"]))
    raise SpecError(f"unknown piece density type {kind!r}")


def make_family(spec: DistributionSpec | dict) -> Distribution1D:
    """Build the law described by ``spec``."""
    if isinstance(spec, dict):
        spec = DistributionSpec.from_dict(spec)
    fam = spec.family
    p = {**_DEFAULTS.get(fam, {}), **spec.params}
    if fam == "gaussian":
        return Gaussian(_num(p, "mean", fam), _num(p, "std", fam))
    if fam == "laplace":
        return Laplace(_num(p, "shift", fam), _num(p, "scale", fam))
    if fam == "exponential":
        return Exponential(_num(p, "rate", fam))
    if fam == "uniform":
        return Uniform(_num(p, "lo", fam), _num(p, "hi", fam))
    if fam == "gn_example":
        n = _num(p, "n", fam)
        if n != int(n) or n < 1:
            raise SpecError("gn_example needs an integer n >= 1")
        return make_gn(int(n))
    if fam == "mixture":
        if not spec.components:
            raise SpecError("mixture needs components")
        return Mixture([w for w, _ in spec.components], [make_family(c) for _, c in spec.components])
    if fam == "piecewise":
        if not spec.pieces:
            raise SpecError("piecewise needs pieces")
        return Piecewise([_piece(q) for q in spec.pieces])
    if fam == "truncated":
        for key in ("target", "ref"):
            if not isinstance(p.get(key), DistributionSpec):
                raise SpecError(f"truncated needs a nested {key!r} spec")
        n = _num(p, "n", fam)
        if n != int(n) or n < 2:
            raise SpecError("truncated needs an integer n >= 2")
        return truncate_cdf(make_family(p["target"]), make_family(p["ref"]), int(n))
    raise SpecError(f"unknown family {fam!r}")


_TOKEN = re.compile(r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)|(?P<name>[A-Za-z_]\w*)|(?P<op>[(),*]))")


class _Parser:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise SpecError(f"cannot parse distribution shorthand {text!r} at position {pos}")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise SpecError(f"unexpected token {tok[1]!r} in distribution shorthand")
        self.i += 1
        return tok[1]

    def spec(self) -> DistributionSpec:
        name = self.take("name").lower()
        fam = _ALIASES.get(name, name)
        if fam not in FAMILIES:
            raise SpecError(f"unknown family {name!r}")
        self.take("op", "(")
        if fam == "mixture":
            comps = []
            while True:
                w = float(self.take("num"))
                self.take("op", "*")
                comps.append((w, self.spec()))
                if self.peek()[1] == ",":
                    self.take("op", ",")
                    continue
                break
            self.take("op", ")")
            return DistributionSpec("mixture", components=comps)
        if fam in ("piecewise", "truncated"):
            raise SpecError(f"{fam} has no shorthand form; use JSON")
        args = []
        if self.peek()[1] != ")":
            args.append(float(self.take("num")))
            while self.peek()[1] == ",":
                self.take("op", ",")
                args.append(float(self.take("num")))
        self.take("op", ")")
        names = _PARAM_NAMES[fam]
        if len(args) > len(names):
            raise SpecError(f"{fam} takes at most {len(names)} arguments")
        return DistributionSpec(fam, dict(zip(names, args)))


def parse_shorthand(text: str) -> DistributionSpec:
    p = _Parser(text)
    spec = p.spec()
    if p.peek()[0] is not None:
        raise SpecError(f"trailing input in distribution shorthand {text!r}")
    return spec


def parse_spec(text: str) -> DistributionSpec:
    """Parse inline JSON, a path to a JSON file, or the call shorthand."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return DistributionSpec.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON distribution spec: {exc}") from exc
    path = Path(text)
    if text.endswith(".json") or (path.suffix and path.exists()):
        try:
            return DistributionSpec.from_dict(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read distribution spec file {text!r}: {exc}") from exc
    return parse_shorthand(text)
