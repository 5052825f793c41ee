from .settings import (
    aliasing_config,
    benchmark_config,
    phase_space_config,
    runtime_config,
    solver_config,
)

__all__ = [
    "solver_config",
    "runtime_config",
    "benchmark_config",
    "aliasing_config",
    "phase_space_config",
]
