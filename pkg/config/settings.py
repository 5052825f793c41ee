import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

load_dotenv()


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.split(",") if v.strip())


@dataclass
class SolverConfig:
    tau_noise: float = float(os.getenv("RICCATI_TAU_NOISE", "1e-6"))
    trend_lag_omega: float = 1e-9
    degenerate_threshold: float = 1e-14
    transfer_floor: float = 1e-300
    overflow_exponent: float = 709.0
    asymptote_slices: int = int(os.getenv("RICCATI_ASYMPTOTE_SLICES", "10000"))
    day_s: float = 86400.0
    fourier_nodes: int = 10


@dataclass
class RuntimeConfig:
    threads: int = int(os.getenv("RICCATI_THREADS", "1"))
    log_level: str = os.getenv("RICCATI_LOG_LEVEL", "INFO")
    log_dir: str = os.getenv("RICCATI_LOG_DIR", "logs")
    float_digits: int = 9
    default_setpoint_c: float = 20.0


@dataclass
class BenchmarkConfig:
    slices: tuple[int, ...] = (2, 5, 10, 59, 200, 1000, 10000)
    repeats: int = int(os.getenv("RICCATI_BENCH_REPEATS", "20"))
    reference_slices: int = 59
    min_speedup: float = 5.0


@dataclass
class AliasingConfig:
    padding_days: tuple[float, ...] = field(
        default_factory=lambda: _floats(os.getenv("RICCATI_PADDING_DAYS", "0,1,2,3,4,6,8"))
    )
    reference_padding_days: float = 20.0
    threshold_c: float = 0.01


@dataclass
class PhaseSpaceConfig:
    alpha_min: float = 1.0e-7
    alpha_max: float = 1.5e-5
    alpha_count: int = 25
    periods_s: tuple[float, ...] = (10.0, 3600.0, 86400.0, 31536000.0)


solver_config = SolverConfig()
runtime_config = RuntimeConfig()
benchmark_config = BenchmarkConfig()
aliasing_config = AliasingConfig()
phase_space_config = PhaseSpaceConfig()
