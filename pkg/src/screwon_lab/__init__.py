"""Numerical laboratory for the screwon model."""

from .core_types import DarbouxState, ModelParams, PhaseState, PolarCoords
from .conserved import ConservedSet, SubmanifoldTag

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "PhaseState",
    "PolarCoords",
    "DarbouxState",
    "ConservedSet",
    "SubmanifoldTag",
]
