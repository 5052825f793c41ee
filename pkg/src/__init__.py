from .core import InputValidationError, NumericalDefectError
from .pipelines import (
    AliasingPipeline,
    BenchmarkPipeline,
    PhaseSpacePipeline,
    SimulatePipeline,
    ValidatePipeline,
)
from .utils import set_up_logger

__all__ = [
    "InputValidationError",
    "NumericalDefectError",
    "SimulatePipeline",
    "BenchmarkPipeline",
    "PhaseSpacePipeline",
    "AliasingPipeline",
    "ValidatePipeline",
    "set_up_logger",
]
