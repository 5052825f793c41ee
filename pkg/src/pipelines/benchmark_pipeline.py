import logging
import time
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import benchmark_config, solver_config
from src.core import InputValidationError, WallAssembly
from src.extractors import WallConfigExtractor, WeatherExtractor
from src.solvers import (
    PerturbationProfile,
    first_order_exterior,
    forward_transform,
    sliced_oracle_admittance,
    sol_air,
)
from src.storage import ResultsStorage

logger = logging.getLogger("app")

TIME_BUDGET_S = 1.0


def _best_time_ms(fn, repeats: int) -> float:
    """Smallest wall time of up to `repeats` calls, stopping once the budget is spent."""
    best = float("inf")
    spent = 0.0
    for _ in range(max(repeats, 1)):
        started = time.perf_counter()
        fn()
        elapsed = time.perf_counter() - started
        best = min(best, elapsed)
        spent += elapsed
        if spent > TIME_BUDGET_S:
            break
    return best * 1e3


def first_order_admittance(assembly: WallAssembly, omega: float) -> complex:
    """Single-step corrected exterior admittance Y_N + Y1_N at one frequency."""
    profiles = [
        PerturbationProfile.about_interior(layer) if layer.has_gradient else None
        for layer in assembly.layers
    ]
    return first_order_exterior(
        assembly.base().layers, profiles, assembly.h_int, assembly.h_ext, omega
    )


def timing_ratio(df: pd.DataFrame, slices: int) -> float | None:
    """Wall time of the M_s = `slices` chain over the single-step time, when both were timed."""
    sliced = df[(df["method"] == "sliced") & (df["M_s"] == slices)]
    if sliced.empty:
        return None
    ratio = sliced["wall_time_ms"].iloc[0] / df["wall_time_ms"].iloc[0]
    return None if np.isnan(ratio) else float(ratio)


class BenchmarkPipeline:
    """Error and cost of the single-step correction against sliced chains."""

    def __init__(
        self,
        config_path: Path,
        weather_path: Path | None = None,
        slices: tuple[int, ...] = benchmark_config.slices,
        timing: bool = True,
        out_path: Path | None = None,
        fmt: str = "csv",
    ):
        self.config_path = config_path
        self.weather_path = weather_path
        self.slices = tuple(slices)
        self.timing = timing
        self.out_path = out_path
        self.fmt = fmt
        self.wall_config_extractor = WallConfigExtractor()
        self.weather_extractor = WeatherExtractor()
        self.results_storage = ResultsStorage()

    def run(self) -> pd.DataFrame:
        try:
            logger.info("=" * 3)
            logger.info("BENCHMARK PIPELINE STARTED")
            logger.info("=" * 3)

            logger.info("[1/3] EXTRACTION")
            assembly, omega = self._extract()

            logger.info("[2/3] TRANSFORMATION")
            df = self._transform(assembly, omega)

            logger.info("[3/3] LOADING")
            self._load(df)

            logger.info("=" * 3)
            logger.info("PIPELINE COMPLETED SUCCESSFULLY")
            logger.info("=" * 3)
            return df

        except Exception as e:
            logger.error(f"PIPELINE ERROR : {e}")
            raise

    def _extract(self) -> tuple[WallAssembly, float]:
        if any(m < 1 for m in self.slices):
            raise InputValidationError("--ms-list values must be >= 1")
        wall = self.wall_config_extractor.extract(self.config_path)
        if not wall.assembly.has_gradients:
            raise InputValidationError("benchmark needs at least one graded layer")

        omega = 2.0 * np.pi / solver_config.day_s
        if self.weather_path is not None:
            weather = self.weather_extractor.extract(self.weather_path)
            t_sa = sol_air(
                weather.t_air, weather.g_solar, wall.assembly.h_ext, wall.sim.solar_absorptivity
            )
            spectrum = np.abs(forward_transform(t_sa))
            k = int(np.argmax(spectrum[1:])) + 1
            omega = 2.0 * np.pi * k / (len(weather) * weather.dt)
        logger.info(f"Benchmark frequency : {omega:.6g} rad/s")
        return wall.assembly, omega

    def _transform(self, assembly: WallAssembly, omega: float) -> pd.DataFrame:
        w = np.array([omega])
        asymptote = sliced_oracle_admittance(assembly, w, solver_config.asymptote_slices).chain.exterior

        def relative_error(value) -> float:
            return float(np.abs(value - asymptote)[0] / np.abs(asymptote)[0])

        rows = []
        riccati = first_order_admittance(assembly, omega)
        rows.append(
            {
                "method": "riccati_first_order",
                "M_s": 1,
                "relative_error": relative_error(riccati),
                "wall_time_ms": _best_time_ms(lambda: first_order_admittance(assembly, omega), benchmark_config.repeats)
                if self.timing
                else np.nan,
            }
        )
        for m in tqdm(self.slices, desc="sliced oracle", disable=None):
            value = sliced_oracle_admittance(assembly, w, m).chain.exterior
            rows.append(
                {
                    "method": "sliced",
                    "M_s": m,
                    "relative_error": relative_error(value),
                    "wall_time_ms": _best_time_ms(
                        lambda: sliced_oracle_admittance(assembly, w, m), benchmark_config.repeats
                    )
                    if self.timing
                    else np.nan,
                }
            )
            logger.debug(f"M_s = {m} : relative error {rows[-1]['relative_error']:.4%}")
        return pd.DataFrame(rows, columns=["method", "M_s", "relative_error", "wall_time_ms"])

    def _load(self, df: pd.DataFrame) -> None:
        riccati = df.iloc[0]
        crossing = df[(df["method"] == "sliced") & (df["relative_error"] < riccati["relative_error"])]
        if not crossing.empty:
            logger.info(
                f"Sliced chain beats the single-step error ({riccati['relative_error']:.3%}) "
                f"from M_s = {int(crossing['M_s'].iloc[0])}"
            )
        speedup = timing_ratio(df, benchmark_config.reference_slices)
        if speedup is not None:
            logger.info(f"Single step vs M_s = {benchmark_config.reference_slices} : {speedup:.1f}x faster")
            if speedup < benchmark_config.min_speedup:
                logger.warning(
                    f"Single step less than {benchmark_config.min_speedup:g}x faster than "
                    f"M_s = {benchmark_config.reference_slices}"
                )
        self.results_storage.save(df, self.out_path, self.fmt)
