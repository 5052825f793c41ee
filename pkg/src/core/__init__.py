from .errors import (
    DegenerateError,
    InputValidationError,
    NumericalDefectError,
    ensure_finite,
)
from .layers import GradientSpec, Layer, WallAssembly
from .waves import as_omega, characteristic_admittance, penetration_depth, wave_vector
from .weather import WeatherSeries, first_irregular_sample

__all__ = [
    "DegenerateError",
    "InputValidationError",
    "NumericalDefectError",
    "ensure_finite",
    "GradientSpec",
    "Layer",
    "WallAssembly",
    "as_omega",
    "characteristic_admittance",
    "penetration_depth",
    "wave_vector",
    "WeatherSeries",
    "first_irregular_sample",
]
