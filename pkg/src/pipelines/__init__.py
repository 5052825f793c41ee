from .aliasing_pipeline import AliasingPipeline
from .benchmark_pipeline import BenchmarkPipeline
from .phase_space_pipeline import PhaseSpacePipeline
from .simulate_pipeline import SimulatePipeline
from .validate_pipeline import ValidatePipeline

__all__ = [
    "SimulatePipeline",
    "BenchmarkPipeline",
    "PhaseSpacePipeline",
    "AliasingPipeline",
    "ValidatePipeline",
]
