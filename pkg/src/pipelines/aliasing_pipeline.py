import logging
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from config import aliasing_config, runtime_config, solver_config
from src.core import InputValidationError
from src.extractors import WallConfig, WallConfigExtractor, WeatherExtractor
from src.solvers import simulate
from src.storage import ResultsStorage

logger = logging.getLogger("app")


def first_day_error(wall: WallConfig, weather, padding_days: float, reference, history=None) -> float:
    """Max |T_si| deviation over the first simulated day against a reference run.

    With a `history`, the warm-up takes its last `padding_days` instead of
    replicating the first day.
    """
    setpoint = weather.setpoint(runtime_config.default_setpoint_c)
    sim = replace(wall.sim, warmup_duration=padding_days * solver_config.day_s)
    result = simulate(wall.assembly, weather, setpoint, sim, history=history)
    first_day = (result.time_s - result.time_s[0]) < solver_config.day_s
    return float(np.max(np.abs(result.t_si[first_day] - reference.t_si[first_day])))


class AliasingPipeline:
    """First-day wrap-around error as a function of warm-up padding."""

    def __init__(
        self,
        config_path: Path,
        weather_path: Path,
        padding_days: tuple[float, ...] = aliasing_config.padding_days,
        out_path: Path | None = None,
        fmt: str = "csv",
        threads: int | None = None,
        history_path: Path | None = None,
    ):
        self.config_path = config_path
        self.weather_path = weather_path
        self.padding_days = tuple(padding_days)
        self.out_path = out_path
        self.fmt = fmt
        self.threads = threads
        self.history_path = history_path
        self.wall_config_extractor = WallConfigExtractor()
        self.weather_extractor = WeatherExtractor()
        self.results_storage = ResultsStorage()

    def run(self) -> pd.DataFrame:
        try:
            logger.info("=" * 3)
            logger.info("ALIASING PIPELINE STARTED")
            logger.info("=" * 3)

            logger.info("[1/3] EXTRACTION")
            wall = self.wall_config_extractor.extract(self.config_path, threads=self.threads)
            weather = self.weather_extractor.extract(self.weather_path)
            history = None
            if self.history_path is not None:
                history = self.weather_extractor.extract(self.history_path)

            logger.info("[2/3] TRANSFORMATION")
            df = self._transform(wall, weather, history)

            logger.info("[3/3] LOADING")
            self.results_storage.save(df, self.out_path, self.fmt)

            logger.info("=" * 3)
            logger.info("PIPELINE COMPLETED SUCCESSFULLY")
            logger.info("=" * 3)
            return df

        except Exception as e:
            logger.error(f"PIPELINE ERROR : {e}")
            raise

    def _transform(self, wall: WallConfig, weather, history=None) -> pd.DataFrame:
        if any(p < 0 for p in self.padding_days):
            raise InputValidationError("padding days must be >= 0")
        setpoint = weather.setpoint(runtime_config.default_setpoint_c)
        reference_warmup = aliasing_config.reference_padding_days * solver_config.day_s
        if history is not None:
            # The whole measured history is the reference warm-up.
            reference_warmup = len(history) * history.dt
            longest = max(self.padding_days, default=0.0) * solver_config.day_s
            if longest > reference_warmup + 1e-6 * history.dt:
                raise InputValidationError(
                    f"padding of {longest / solver_config.day_s:g} day(s) exceeds the "
                    f"{reference_warmup / solver_config.day_s:g} day(s) of history"
                )
        reference_sim = replace(wall.sim, warmup_duration=reference_warmup)
        reference = simulate(wall.assembly, weather, setpoint, reference_sim, history=history)

        rows = []
        for days in self.padding_days:
            error = first_day_error(wall, weather, days, reference, history)
            rows.append({"padding_days": days, "first_day_max_error_C": error})
            logger.info(f"padding {days:g} d : first-day error {error:.4g} °C")

        below = [r["padding_days"] for r in rows if r["first_day_max_error_C"] < aliasing_config.threshold_c]
        if below:
            logger.info(f"Error below {aliasing_config.threshold_c} °C from {min(below):g} day(s) of padding")
        return pd.DataFrame(rows, columns=["padding_days", "first_day_max_error_C"])
