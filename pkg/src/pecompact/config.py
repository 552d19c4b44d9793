"""Metric configuration from key=value text, JSON files or command-line overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .model_geometry import RadialMetric, make_ads_schwarzschild, make_hyperbolic, rescale_defining_function

MODELS = ("hyperbolic", "ads_schw")


@dataclass(frozen=True)
class MetricConfig:
    model: str = "hyperbolic"
    n: int = 3
    m: float = 0.0
    beta: float | None = None
    r_max: float = 20.0
    grid_size: int = 400
    rescale_boundary: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")

    def build(self) -> RadialMetric:
        if self.model == "hyperbolic":
            return make_hyperbolic(self.n, r_max=self.r_max, grid_size=self.grid_size)
        g = make_ads_schwarzschild(self.n, self.m, beta=self.beta, r_max=self.r_max, grid_size=self.grid_size)
        if self.rescale_boundary:
            g = rescale_defining_function(g, g.params["C"])
        return g


def _coerce(name: str, raw):
    types = {f.name: f.type for f in fields(MetricConfig)}
    if name not in types:
        raise KeyError(f"unknown config key {name!r}")
    if raw is None or (isinstance(raw, str) and raw.lower() in ("none", "")):
        return None
    t = types[name]
    if "bool" in t:
        return raw if isinstance(raw, bool) else str(raw).lower() in ("1", "true", "yes")
    if "int" in t:
        return int(raw)
    if "float" in t:
        return float(raw)
    return str(raw)


def parse_text(text: str) -> dict:
    """key=value lines (``#`` comments allowed) or a JSON object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
    else:
        data = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"expected key=value, got {line!r}")
            k, v = line.split("=", 1)
            data[k.strip()] = v.strip()
    return {k: _coerce(k, v) for k, v in data.items()}


def load_config(path=None, **overrides) -> MetricConfig:
    cfg = MetricConfig()
    if path is not None:
        cfg = replace(cfg, **parse_text(Path(path).read_text()))
    clean = {k: _coerce(k, v) for k, v in overrides.items() if v is not None}
    return replace(cfg, **clean)
