"""Driven three-level V-system: exact steady state, closed forms and pole analysis."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .core import BlochState, Regime, SystemParams, check_limit_hierarchy, normalize, reconstruct
from .master import AffineGenerator, build_generator, evolve, steady_state

__all__ = [
    "BACKEND", "BlochState", "Regime", "SystemParams", "check_limit_hierarchy",
    "normalize", "reconstruct", "AffineGenerator", "build_generator", "evolve",
    "steady_state",
]
