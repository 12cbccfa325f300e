"""Meyer wavelets on a periodic grid, wavelet-coefficient norms and Riesz transforms."""
from .grid import CoefficientField, GridFunction, GridSpec, analyze, synthesize
from .meyer import MeyerSystem, default_system

__version__ = "0.1.0"

__all__ = [
    "CoefficientField",
    "GridFunction",
    "GridSpec",
    "MeyerSystem",
    "analyze",
    "default_system",
    "synthesize",
]
