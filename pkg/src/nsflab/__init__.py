"""Composite-wave laboratory for the 1-D compressible Navier-Stokes-Fourier system."""

from .gas import GasParams, ThermoState
from .riemann import WavePattern, build_pattern, solve_pattern

__all__ = [
    "GasParams",
    "ThermoState",
    "WavePattern",
    "build_pattern",
    "solve_pattern",
]

__version__ = "0.1.0"
