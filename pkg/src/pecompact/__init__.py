"""Numerical lab for radially symmetric Poincare-Einstein metrics and their adapted compactifications."""

from .compactification_solver import Compactification, solve
from .config import MetricConfig, load_config
from .model_geometry import RadialMetric, make_ads_schwarzschild, make_hyperbolic, make_warped

__all__ = [
    "Compactification",
    "MetricConfig",
    "RadialMetric",
    "load_config",
    "make_ads_schwarzschild",
    "make_hyperbolic",
    "make_warped",
    "solve",
]

__version__ = "0.1.0"
